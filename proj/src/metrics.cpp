#include "uavsim/metrics.hpp"

#include <fmt/format.h>

#include <fstream>

namespace uavsim {

FlowStats& FlowMonitor::flow(std::uint32_t id)
{
    auto [it, inserted] = flows_.try_emplace(id);
    if (inserted)
        it->second.flow_id = id;
    return it->second;
}

void FlowMonitor::on_tx(const Frame& frame, Time t)
{
    FlowStats& f = flow(frame.flow_id);
    ++f.tx_packets;
    f.tx_bytes += frame.payload_bytes;
    if (!f.time_first_tx)
        f.time_first_tx = t;
}

void FlowMonitor::on_rx(const DeliveryRecord& record)
{
    FlowStats& f = flow(record.flow_id);
    ++f.rx_packets;
    f.rx_bytes += record.payload_bytes;
    f.delay_sum += record.delay;
    f.time_last_rx = record.at;
}

void FlowMonitor::on_drop(const Frame& frame)
{
    ++flow(frame.flow_id).packets_dropped;
}

void FlowMonitor::set_residual(std::uint32_t flow_id, std::uint64_t packets)
{
    flow(flow_id).residual = packets;
}

std::vector<FlowStats> FlowMonitor::flows() const
{
    std::vector<FlowStats> out;
    out.reserve(flows_.size());
    for (const auto& [id, f] : flows_)
        out.push_back(f);
    return out;
}

double throughput(std::span<const FlowStats> stats, double sim_time)
{
    if (!(sim_time > 0.0))
        throw std::invalid_argument("sim_time must be positive");
    std::uint64_t bytes = 0;
    for (const auto& f : stats)
        bytes += f.rx_bytes;
    return static_cast<double>(bytes) * 8.0 / sim_time;
}

DelayResult average_delay(std::span<const FlowStats> stats, DelayMode mode)
{
    DelayResult result;
    double sum_of_means = 0.0;
    Time pooled_sum{0};
    std::uint64_t pooled_count = 0;
    for (const auto& f : stats) {
        if (f.rx_packets == 0) {
            ++result.excluded_flows;
            continue;
        }
        sum_of_means += to_seconds(f.delay_sum) / static_cast<double>(f.rx_packets);
        pooled_sum += f.delay_sum;
        pooled_count += f.rx_packets;
    }
    if (pooled_count == 0)
        return result;
    result.seconds = mode == DelayMode::SumOfFlowMeans
                         ? sum_of_means
                         : to_seconds(pooled_sum) / static_cast<double>(pooled_count);
    return result;
}

namespace {

std::string seconds_or_na(const std::optional<double>& v)
{
    return v ? fmt::format("{:.6f}", *v) : std::string("NA");
}

} // namespace

std::string format_csv_row(const RunRow& r)
{
    return fmt::format("{},{},{},{},{},{:.3f},{:.3f},{:.6f},{:.3f},{},{},{},{},{},{}", r.scenario_id,
                       r.seed, r.n_sta, r.access, r.mobility, r.uav_speed_mps, r.traffic_rate_bps,
                       r.sim_time_s, r.throughput_bps, seconds_or_na(r.avg_delay_pooled_s),
                       seconds_or_na(r.avg_delay_eq2_s), r.tx_packets, r.rx_packets,
                       r.dropped_packets, r.collision_events);
}

std::string format_csv(std::span<const RunRow> rows)
{
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += format_csv_row(r);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out)
        throw IoError("write failed: " + path.string());
}

void export_csv(const std::filesystem::path& path, std::span<const RunRow> rows)
{
    write_text_file(path, format_csv(rows));
}

std::string format_flows_csv(std::span<const FlowStats> flows)
{
    std::string out = "flow_id,tx_packets,tx_bytes,rx_packets,rx_bytes,delay_sum_s,"
                      "time_first_tx_s,time_last_rx_s,dropped_packets,residual_packets\n";
    for (const auto& f : flows) {
        out += fmt::format("{},{},{},{},{},{:.6f},{},{},{},{}\n", f.flow_id, f.tx_packets,
                           f.tx_bytes, f.rx_packets, f.rx_bytes, to_seconds(f.delay_sum),
                           f.time_first_tx ? fmt::format("{:.6f}", to_seconds(*f.time_first_tx)) : "NA",
                           f.time_last_rx ? fmt::format("{:.6f}", to_seconds(*f.time_last_rx)) : "NA",
                           f.packets_dropped, f.residual);
    }
    return out;
}

} // namespace uavsim
