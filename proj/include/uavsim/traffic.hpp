#pragma once

#include "uavsim/engine.hpp"
#include "uavsim/phy.hpp"
#include "uavsim/time.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

namespace uavsim {

struct FlowSpec {
    std::uint32_t flow_id = 0; // the sending station's node id
    double rate = 0.0;         // bits/s while ON
    std::uint32_t payload = 512;
    Time on_duration = std::chrono::seconds{1};
    Time off_duration{0};
    Time start{0};
    Time stop{0};
};

/// payload * 8 / rate, rounded to the nanosecond.
Time packet_gap(const FlowSpec& f);

/// True if `t` falls in an ON window (always true when off_duration is zero).
bool in_on_period(const FlowSpec& f, Time t);

/// t_prev + gap, pushed to the start of the next ON window if it lands in an OFF window.
Time next_packet_time(const FlowSpec& f, Time t_prev);

/// Constant-rate on-off application; hands each packet to `emit` as a DATA frame.
class OnOffSource {
public:
    using EmitFn = std::function<void(const Frame&)>;

    OnOffSource(Simulator& sim, FlowSpec spec, RngStream jitter, EmitFn emit);

    /// First packet at start plus a uniform offset in [0, gap).
    void start();

    std::uint64_t generated() const { return next_seq_; }
    const FlowSpec& spec() const { return spec_; }

private:
    void send();

    Simulator& sim_;
    FlowSpec spec_;
    RngStream jitter_;
    EmitFn emit_;
    std::uint64_t next_seq_ = 0;
};

struct DeliveryRecord {
    std::uint32_t flow_id = 0;
    std::uint64_t seq = 0;
    std::uint32_t payload_bytes = 0;
    Time delay{0};
    Time at{0};
};

/// AP application. Duplicates of an already delivered (flow, seq) are ignored.
class PacketSink {
public:
    std::optional<DeliveryRecord> receive(const Frame& frame, Time t);
    bool delivered(std::uint32_t flow_id, std::uint64_t seq) const;
    std::uint64_t duplicates() const { return duplicates_; }

private:
    std::unordered_map<std::uint32_t, std::vector<bool>> seen_;
    std::uint64_t duplicates_ = 0;
};

} // namespace uavsim
