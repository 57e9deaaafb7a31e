#pragma once

#include "uavsim/metrics.hpp"
#include "uavsim/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uavsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

/// Defaults, then the config file (if any), then each `key=value` override in order.
Scenario load_scenario(const std::optional<std::filesystem::path>& config,
                       std::span<const std::string> overrides);

struct SingleOptions {
    std::optional<std::filesystem::path> config;
    std::vector<std::string> overrides;
    std::filesystem::path out = "results.csv";
    std::optional<std::filesystem::path> trace;     // engine dispatch trace
    std::optional<std::filesystem::path> mac_trace; // per-exchange MAC outcomes
    std::optional<std::filesystem::path> flows;     // per-flow counters
    std::optional<std::filesystem::path> mobility_trace; // `t x y z speed direction` per UAV update
};

/// Runs one scenario and appends its row to `out` (header written for a new file).
int run_single(const SingleOptions& options, std::ostream& log, std::ostream& err);

struct FamilyPoint {
    Scenario scenario;
    std::size_t point = 0; // index of the swept grid point
    std::uint32_t replication = 0;
};

inline constexpr std::uint32_t kDefaultReplications = 5;

/// n_sta grid shared by families 1 and 2.
std::vector<std::uint32_t> family_station_grid();
/// Velocity grid of family 3, m/s.
std::vector<double> family_speed_grid();
/// Traffic rates of family 3, bits/s.
std::vector<double> family_rate_grid();

/**
 * Grid for one family, point-major then replication; replication r runs
 * with seed base.seed + r. Throws ConfigError for an unknown family.
 *   1: rts_threshold {0, 65535} x n_sta
 *   2: mobility {gm, rd2d} x n_sta, RTS/CTS on
 *   3: traffic rate x uav_mean_speed at n_sta = 25, GM, RTS/CTS on
 */
std::vector<FamilyPoint> family_points(int family, const Scenario& base, std::uint32_t replications);

/// Runs every point on up to `jobs` worker threads; rows come back in input order.
std::vector<RunRow> run_points(std::span<const FamilyPoint> points, unsigned jobs,
                               std::ostream* progress = nullptr);

/// Mean over replications per grid point. Counters are rounded to the nearest integer;
/// a delay is the mean of the replications that have one.
std::vector<RunRow> aggregate_mean(std::span<const FamilyPoint> points, std::span<const RunRow> rows);

struct FamilyOptions {
    int family = 1;
    std::uint32_t replications = kDefaultReplications;
    std::filesystem::path out_dir = ".";
    std::optional<std::filesystem::path> config;
    std::vector<std::string> overrides;
    unsigned jobs = 1;
};

/// Writes family<N>_runs.csv and family<N>_mean.csv into out_dir.
int run_scenario_family(const FamilyOptions& options, std::ostream& log, std::ostream& err);

/**
 * Groups a results CSV by the `series` column and prints one `x y` block
 * per series value, sorted by x. Blocks are headed by `# series=value`
 * and separated by a blank line. Throws ConfigError for an unknown column.
 */
std::string plotdata(std::string_view csv, std::string_view x, std::string_view series,
                     std::string_view y);

struct PlotOptions {
    std::filesystem::path csv;
    std::string x = "n_sta";
    std::string series = "access";
    std::string y = "throughput_bps";
};

int emit_plotdata(const PlotOptions& options, std::ostream& out, std::ostream& err);

} // namespace uavsim
