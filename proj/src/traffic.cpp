#include "uavsim/traffic.hpp"

#include <cmath>

namespace uavsim {

Time packet_gap(const FlowSpec& f)
{
    return from_seconds(static_cast<double>(f.payload) * 8.0 / f.rate);
}

bool in_on_period(const FlowSpec& f, Time t)
{
    if (f.off_duration <= Time{0})
        return true;
    if (t < f.start)
        return false;
    const Time period = f.on_duration + f.off_duration;
    return (t - f.start) % period < f.on_duration;
}

Time next_packet_time(const FlowSpec& f, Time t_prev)
{
    const Time t = t_prev + packet_gap(f);
    if (in_on_period(f, t))
        return t;
    const Time period = f.on_duration + f.off_duration;
    return f.start + ((t - f.start) / period + 1) * period;
}

OnOffSource::OnOffSource(Simulator& sim, FlowSpec spec, RngStream jitter, EmitFn emit)
    : sim_(sim), spec_(spec), jitter_(std::move(jitter)), emit_(std::move(emit))
{
}

void OnOffSource::start()
{
    const double gap = to_seconds(packet_gap(spec_));
    const Time first = spec_.start + from_seconds(jitter_.uniform(0.0, gap));
    if (first < spec_.stop)
        sim_.schedule(first, EventKind::AppPacket, spec_.flow_id, [this] { send(); });
}

void OnOffSource::send()
{
    Frame f;
    f.kind = FrameKind::Data;
    f.src = spec_.flow_id;
    f.dst = kApId;
    f.mpdu_bytes = spec_.payload + kDataOverheadBytes;
    f.flow_id = spec_.flow_id;
    f.seq = next_seq_++;
    f.enqueue_time = sim_.now();
    f.payload_bytes = spec_.payload;
    emit_(f);

    const Time next = next_packet_time(spec_, sim_.now());
    if (next < spec_.stop)
        sim_.schedule(next, EventKind::AppPacket, spec_.flow_id, [this] { send(); }, next_seq_);
}

std::optional<DeliveryRecord> PacketSink::receive(const Frame& frame, Time t)
{
    auto& seen = seen_[frame.flow_id];
    if (seen.size() <= frame.seq)
        seen.resize(frame.seq + 1, false);
    if (seen[frame.seq]) {
        ++duplicates_;
        return std::nullopt;
    }
    seen[frame.seq] = true;
    return DeliveryRecord{frame.flow_id, frame.seq, frame.payload_bytes, t - frame.enqueue_time, t};
}

bool PacketSink::delivered(std::uint32_t flow_id, std::uint64_t seq) const
{
    const auto it = seen_.find(flow_id);
    return it != seen_.end() && seq < it->second.size() && it->second[seq];
}

} // namespace uavsim
