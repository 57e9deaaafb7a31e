#pragma once

#include "uavsim/phy.hpp"
#include "uavsim/time.hpp"
#include "uavsim/traffic.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavsim {

/// Per-flow counters. Byte counts are application payload bytes.
struct FlowStats {
    std::uint32_t flow_id = 0;
    std::uint64_t tx_packets = 0;
    std::uint64_t tx_bytes = 0;
    std::uint64_t rx_packets = 0;
    std::uint64_t rx_bytes = 0;
    Time delay_sum{0};
    std::optional<Time> time_first_tx;
    std::optional<Time> time_last_rx;
    std::uint64_t packets_dropped = 0; // queue and retry-limit drops of undelivered packets
    std::uint64_t residual = 0;        // undelivered packets still queued or in service at stop
};

class FlowMonitor {
public:
    void on_tx(const Frame& frame, Time t);
    void on_rx(const DeliveryRecord& record);
    void on_drop(const Frame& frame);
    void set_residual(std::uint32_t flow_id, std::uint64_t packets);

    /// All flows seen so far, ordered by flow id.
    std::vector<FlowStats> flows() const;

private:
    FlowStats& flow(std::uint32_t id);

    std::map<std::uint32_t, FlowStats> flows_;
};

/// Sum of rx_bytes * 8 over sim_time seconds. Throws std::invalid_argument for sim_time <= 0.
double throughput(std::span<const FlowStats> stats, double sim_time);

enum class DelayMode {
    SumOfFlowMeans, // sum over flows of each flow's mean delay
    PooledMean,     // all delays over all received packets
};

struct DelayResult {
    std::optional<double> seconds; // absent when no flow received anything
    std::size_t excluded_flows = 0;
};

DelayResult average_delay(std::span<const FlowStats> stats, DelayMode mode);

struct RunRow {
    std::string scenario_id;
    std::uint64_t seed = 0;
    std::uint32_t n_sta = 0;
    std::string access;   // basic | rtscts
    std::string mobility; // const | gm | rd2d
    double uav_speed_mps = 0.0;
    double traffic_rate_bps = 0.0;
    double sim_time_s = 0.0;
    double throughput_bps = 0.0;
    std::optional<double> avg_delay_pooled_s;
    std::optional<double> avg_delay_eq2_s;
    std::uint64_t tx_packets = 0;
    std::uint64_t rx_packets = 0;
    std::uint64_t dropped_packets = 0;
    std::uint64_t collision_events = 0;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kCsvHeader =
    "scenario_id,seed,n_sta,access,mobility,uav_speed_mps,traffic_rate_bps,sim_time_s,"
    "throughput_bps,avg_delay_pooled_s,avg_delay_eq2_s,tx_packets,rx_packets,dropped_packets,"
    "collision_events";

/// One CSV line without the trailing newline. Absent delays render as NA.
std::string format_csv_row(const RunRow& row);

/// Header plus one line per row.
std::string format_csv(std::span<const RunRow> rows);

/// Writes format_csv(rows) to `path`; throws IoError naming the path.
void export_csv(const std::filesystem::path& path, std::span<const RunRow> rows);

/// Per-flow table including the residual counter.
std::string format_flows_csv(std::span<const FlowStats> flows);

/// Writes `text` to `path`; throws IoError naming the path.
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace uavsim
