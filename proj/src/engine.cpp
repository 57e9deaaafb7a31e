#include "uavsim/engine.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace uavsim {

std::string_view to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::MobilityTick: return "mobility-tick";
    case EventKind::BeaconTick: return "beacon-tick";
    case EventKind::AppPacket: return "app-packet";
    case EventKind::PhyTxEnd: return "phy-tx-end";
    case EventKind::PhyRxStart: return "phy-rx-start";
    case EventKind::PhyRxEnd: return "phy-rx-end";
    case EventKind::Timer: return "timer";
    case EventKind::NavExpiry: return "nav-expiry";
    case EventKind::BackoffSlot: return "backoff-slot";
    case EventKind::SimStop: return "sim-stop";
    }
    return "unknown";
}

EventId Simulator::schedule(Time at, EventKind kind, NodeId node, Callback fn, std::uint64_t detail)
{
    if (at < now_) {
        throw std::invalid_argument("cannot schedule event at " + std::to_string(at.count()) +
                                    " ns before current time " + std::to_string(now_.count()) +
                                    " ns");
    }
    const std::uint64_t seq = next_seq_++;
    heap_.push_back(Entry{at, seq, kind, node, detail, std::move(fn)});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
    return EventId{seq};
}

void Simulator::cancel(EventId id)
{
    if (!is_pending(id))
        return;
    if (finished_.size() <= id.seq())
        finished_.resize(std::max<std::size_t>(id.seq() + 1, finished_.size() * 2), false);
    finished_[id.seq()] = true;
}

bool Simulator::is_pending(EventId id) const
{
    if (!id.valid() || id.seq() >= next_seq_)
        return false;
    return id.seq() >= finished_.size() || !finished_[id.seq()];
}

EventId Simulator::stop_at(Time at)
{
    return schedule(at, EventKind::SimStop, kBroadcast, [this] { stop(); });
}

Time Simulator::run(Time stop_time)
{
    if (ran_)
        throw std::logic_error("simulator has already run; create a new instance");
    ran_ = true;

    while (!heap_.empty()) {
        if (heap_.front().time >= stop_time) {
            now_ = stop_time;
            break;
        }
        std::pop_heap(heap_.begin(), heap_.end(), Later{});
        Entry ev = std::move(heap_.back());
        heap_.pop_back();

        if (ev.seq < finished_.size() && finished_[ev.seq])
            continue;
        if (finished_.size() <= ev.seq)
            finished_.resize(std::max<std::size_t>(ev.seq + 1, finished_.size() * 2), false);
        finished_[ev.seq] = true;

        now_ = ev.time;
        ++dispatched_;
        if (trace_ != nullptr) {
            *trace_ << ev.time.count() << ' ' << to_string(ev.kind) << ' ';
            if (ev.node == kBroadcast)
                *trace_ << '*';
            else
                *trace_ << ev.node;
            *trace_ << ' ' << ev.detail << '\n';
        }
        if (hook_)
            hook_(DispatchRecord{ev.time, ev.seq, ev.kind, ev.node, ev.detail});
        ev.fn();
        if (stop_requested_)
            break;
    }
    return now_;
}

namespace {

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view purpose)
{
    const std::uint64_t label = fnv1a(purpose);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(label), static_cast<std::uint32_t>(label >> 32)};
    gen_.seed(seq);
}

std::uint32_t RngStream::uniform_int(std::uint32_t lo, std::uint32_t hi)
{
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(gen_);
}

double RngStream::uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
}

double RngStream::normal(double mean, double stddev)
{
    if (stddev <= 0.0)
        return mean;
    return std::normal_distribution<double>(mean, stddev)(gen_);
}

} // namespace uavsim
