#pragma once

#include "uavsim/time.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavsim {

enum class MobilityModelKind { ConstantPosition, GaussMarkov, RandomDirection2D };

/// Short label used in CSV output: const | gm | rd2d.
std::string_view short_name(MobilityModelKind kind);

/// Configuration problem. `line()` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line)
    {
    }

    int line() const noexcept { return line_; }

private:
    int line_;
};

/**
 * Complete description of one experiment run.
 *
 * Keys in the config document match these member names. Defaults for
 * the arena, grid, range and noise are modelling choices and can be
 * overridden from a config file or `--set key=value`.
 */
struct Scenario {
    std::uint32_t n_sta = 25;
    double sta_grid_spacing = 50.0;
    Box area{0.0, 400.0, 0.0, 400.0, 20.0, 50.0};

    MobilityModelKind uav_mobility = MobilityModelKind::GaussMarkov;
    double uav_mean_speed = 50.0;
    double gm_alpha = 0.85;
    double gm_timestep = 1.0;
    std::optional<double> gm_speed_std; // unset: 0.1 * uav_mean_speed
    double gm_direction_std = 0.2;
    double gm_pitch_std = 0.02;
    double gm_mean_pitch = 0.0;
    double rd_pause = 0.5;

    double max_range = 100.0;
    std::uint32_t rts_threshold = 65535;
    double data_rate_phy = 12e6;
    bool eifs = true;
    std::uint32_t queue_capacity = 500;
    double queue_max_delay = 0.5;

    double traffic_rate_per_sta = 6e6;
    std::uint32_t payload_size = 512;
    double on_duration = 1.0;
    double off_duration = 0.0;
    double app_start = 0.0;

    double sim_time = 30.0;
    std::uint64_t seed = 1;
    double beacon_interval = 0.1;

    double speed_noise_std() const { return gm_speed_std.value_or(0.1 * uav_mean_speed); }
};

/// Parses `key = value` lines (or whitespace-separated `key=value` tokens); `#` starts a comment.
Scenario parse_scenario(std::string_view text);

/// Applies one setting; throws ConfigError for unknown keys or malformed values.
void apply_setting(Scenario& scenario, std::string_view key, std::string_view value);

/// Throws ConfigError when an invariant does not hold.
void validate(const Scenario& scenario);

/// Canonical `key = value` rendering; parse_scenario(format_scenario(s)) reproduces s.
std::string format_scenario(const Scenario& scenario);

/// Sensor coordinates: ceil(sqrt(n)) square lattice, row-major, centred in the footprint, z = 0.
std::vector<Vec3> sensor_positions(const Scenario& scenario);

/// Centre of the footprint at mid altitude.
Vec3 uav_start_position(const Scenario& scenario);

struct SweepPoint {
    Scenario scenario; // scenario.seed already set to `seed`
    std::uint64_t seed = 0;
    std::size_t value_index = 0;
    std::uint32_t replication = 0;
};

/// Value-major, then replication; replication r uses seed base.seed + r.
std::vector<SweepPoint> expand_sweep(const Scenario& base, std::string_view parameter,
                                     std::span<const std::string> values,
                                     std::uint32_t replications);

bool is_sweepable(std::string_view parameter);

} // namespace uavsim
