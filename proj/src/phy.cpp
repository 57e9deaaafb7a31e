#include "uavsim/phy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsim {

std::string_view to_string(FrameKind kind)
{
    switch (kind) {
    case FrameKind::Beacon: return "BEACON";
    case FrameKind::Rts: return "RTS";
    case FrameKind::Cts: return "CTS";
    case FrameKind::Data: return "DATA";
    case FrameKind::Ack: return "ACK";
    }
    return "?";
}

std::string_view to_string(RxOutcome outcome)
{
    switch (outcome) {
    case RxOutcome::Delivered: return "delivered";
    case RxOutcome::CollisionLoss: return "collision";
    case RxOutcome::OutOfRange: return "out-of-range";
    }
    return "?";
}

Time frame_airtime(std::uint32_t mpdu_bytes)
{
    constexpr std::uint64_t kBitsPerSymbol = 48; // 12 Mb/s * 4 us
    const std::uint64_t bits = 16 + 8 * static_cast<std::uint64_t>(mpdu_bytes) + 6;
    const std::uint64_t symbols = (bits + kBitsPerSymbol - 1) / kBitsPerSymbol;
    return std::chrono::microseconds{20} + std::chrono::microseconds{4 * symbols};
}

bool in_range(const Vec3& a, const Vec3& b, double max_range)
{
    return distance(a, b) <= max_range;
}

Time propagation_delay(double meters)
{
    constexpr double kSpeedOfLight = 299792458.0;
    return Time{std::llround(meters / kSpeedOfLight * 1e9)};
}

RxOutcome resolve_reception(NodeId receiver, const Transmission& tx,
                            std::span<const Transmission> log, const PositionOracle& position,
                            double max_range)
{
    const double d_start = distance(tx.tx_pos, position(receiver, tx.start));
    if (d_start > max_range)
        return RxOutcome::OutOfRange;
    const Time prop = propagation_delay(d_start);
    const Time arrive = tx.start + prop;
    const Time leave = tx.end + prop;
    if (distance(tx.end_pos, position(receiver, leave)) > max_range)
        return RxOutcome::OutOfRange;

    for (const auto& other : log) {
        if (other.id == tx.id)
            continue;
        Time begin = other.start;
        Time finish = other.end;
        if (other.frame.src != receiver) {
            const double d = distance(other.tx_pos, position(receiver, other.start));
            if (d > max_range)
                continue;
            const Time p = propagation_delay(d);
            begin += p;
            finish += p;
        }
        if (begin < leave && arrive < finish)
            return RxOutcome::CollisionLoss;
    }
    return RxOutcome::Delivered;
}

Channel::Channel(Simulator& sim, double max_range) : sim_(sim), max_range_(max_range) {}

NodeId Channel::add_node(PositionFn position, PhyListener* listener)
{
    nodes_.push_back(Node{std::move(position), listener, Time{0}, false, {}});
    return static_cast<NodeId>(nodes_.size() - 1);
}

bool Channel::sensing(const Node& n) const
{
    return n.tx_active || !n.arrivals.empty();
}

bool Channel::busy(NodeId listener) const
{
    return sensing(nodes_.at(listener));
}

bool Channel::transmitting(NodeId node) const
{
    return nodes_.at(node).tx_active;
}

std::size_t Channel::arriving(NodeId node) const
{
    return nodes_.at(node).arrivals.size();
}

void Channel::transmit(NodeId src, const Frame& frame)
{
    const Time now = sim_.now();
    Node& sender = nodes_.at(src);
    if (sender.tx_active)
        throw std::logic_error("node " + std::to_string(src) + " is already transmitting");

    const bool was_busy = sensing(sender);
    const Time end = now + frame_airtime(frame.mpdu_bytes);
    sender.tx_active = true;
    sender.tx_end = end;
    for (auto& a : sender.arrivals)
        if (a.end > now)
            a.corrupted = true;

    const std::uint64_t id = next_tx_id_++;
    Record& record = records_[id];
    record.tx = Transmission{id, frame, sender.position(now), Vec3{}, now, end};
    if (observer_ != nullptr)
        observer_->on_tx_start(record.tx);

    sim_.schedule(end, EventKind::PhyTxEnd, src, [this, src, id] { on_tx_end(src, id); }, id);

    for (NodeId n = 0; n < nodes_.size(); ++n) {
        if (n == src)
            continue;
        const double d = distance(record.tx.tx_pos, nodes_[n].position(now));
        if (d <= max_range_) {
            const Time prop = propagation_delay(d);
            const Time arrive_end = end + prop;
            sim_.schedule(now + prop, EventKind::PhyRxStart, n,
                          [this, n, id, arrive_end] { on_rx_start(n, id, arrive_end); }, id);
            sim_.schedule(arrive_end, EventKind::PhyRxEnd, n,
                          [this, n, id] { on_rx_end(n, id, true); }, id);
            ++record.pending_rx;
        } else if (n == frame.dst) {
            sim_.schedule(end, EventKind::PhyRxEnd, n, [this, n, id] { on_rx_end(n, id, false); }, id);
            ++record.pending_rx;
        }
    }

    if (!was_busy && sender.listener != nullptr)
        sender.listener->on_medium_busy();
}

void Channel::on_tx_end(NodeId src, std::uint64_t tx_id)
{
    Node& sender = nodes_[src];
    sender.tx_active = false;
    Record& record = records_.at(tx_id);
    record.ended = true;
    record.tx.end_pos = sender.position(sim_.now());
    if (observer_ != nullptr)
        observer_->on_tx_end(record.tx);
    const Frame frame = record.tx.frame;
    release(tx_id);

    if (sender.listener != nullptr) {
        sender.listener->on_tx_end(frame);
        if (!sensing(nodes_[src]))
            nodes_[src].listener->on_medium_idle();
    }
}

void Channel::on_rx_start(NodeId node, std::uint64_t tx_id, Time end)
{
    const Time now = sim_.now();
    Node& n = nodes_[node];
    const bool was_busy = sensing(n);
    bool corrupted = n.tx_active && n.tx_end > now;
    for (auto& a : n.arrivals) {
        if (a.end > now) {
            a.corrupted = true;
            corrupted = true;
        }
    }
    n.arrivals.push_back(Arrival{tx_id, end, corrupted});
    if (!was_busy && n.listener != nullptr)
        n.listener->on_medium_busy();
}

void Channel::on_rx_end(NodeId node, std::uint64_t tx_id, bool reachable)
{
    const Time now = sim_.now();
    const Record& record = records_.at(tx_id);
    RxOutcome outcome = RxOutcome::OutOfRange;
    if (reachable) {
        auto& arrivals = nodes_[node].arrivals;
        const auto it = std::find_if(arrivals.begin(), arrivals.end(),
                                     [tx_id](const Arrival& a) { return a.tx_id == tx_id; });
        const bool corrupted = it->corrupted;
        arrivals.erase(it);
        if (!in_range(record.tx.end_pos, nodes_[node].position(now), max_range_))
            outcome = RxOutcome::OutOfRange;
        else
            outcome = corrupted ? RxOutcome::CollisionLoss : RxOutcome::Delivered;
    }
    if (observer_ != nullptr)
        observer_->on_reception(node, record.tx, outcome);

    const Frame frame = record.tx.frame;
    auto& rec = records_.at(tx_id);
    --rec.pending_rx;
    release(tx_id);

    PhyListener* listener = nodes_[node].listener;
    if (listener != nullptr) {
        listener->on_rx_end(frame, outcome);
        if (reachable && !sensing(nodes_[node]))
            listener->on_medium_idle();
    }
}

void Channel::release(std::uint64_t tx_id)
{
    const auto it = records_.find(tx_id);
    if (it != records_.end() && it->second.ended && it->second.pending_rx == 0)
        records_.erase(it);
}

} // namespace uavsim
