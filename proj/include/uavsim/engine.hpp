#pragma once

#include "uavsim/time.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string_view>
#include <vector>

namespace uavsim {

enum class EventKind : std::uint8_t {
    MobilityTick,
    BeaconTick,
    AppPacket,
    PhyTxEnd,
    PhyRxStart,
    PhyRxEnd,
    Timer,
    NavExpiry,
    BackoffSlot,
    SimStop,
};

std::string_view to_string(EventKind kind);

/// Handle to a scheduled event. Default-constructed handles refer to nothing.
class EventId {
public:
    EventId() = default;

    bool valid() const { return seq_ != 0; }
    std::uint64_t seq() const { return seq_; }

private:
    friend class Simulator;
    explicit EventId(std::uint64_t seq) : seq_(seq) {}

    std::uint64_t seq_ = 0;
};

struct DispatchRecord {
    Time time;
    std::uint64_t seq;
    EventKind kind;
    NodeId node;
    std::uint64_t detail;
};

/**
 * Single-threaded discrete-event core.
 *
 * Events are dispatched in (time, seq) order where seq is the insertion
 * counter, so same-time events fire in the order they were scheduled.
 * Cancelled events stay in the heap and are skipped when popped.
 */
class Simulator {
public:
    using Callback = std::function<void()>;
    using DispatchHook = std::function<void(const DispatchRecord&)>;

    Time now() const noexcept { return now_; }

    /// Throws std::invalid_argument when `at` lies before now().
    EventId schedule(Time at, EventKind kind, NodeId node, Callback fn, std::uint64_t detail = 0);

    EventId schedule_in(Time delay, EventKind kind, NodeId node, Callback fn,
                        std::uint64_t detail = 0)
    {
        return schedule(now_ + delay, kind, node, std::move(fn), detail);
    }

    /// No-op for invalid, already dispatched or already cancelled handles.
    void cancel(EventId id);
    bool is_pending(EventId id) const;

    /// Schedules a SimStop event; the event before it in (time, seq) order is the last one run.
    EventId stop_at(Time at);
    /// Makes the currently dispatching event the last one executed.
    void stop() noexcept { stop_requested_ = true; }

    /**
     * Dispatches events until the queue drains, stop() is called, or the next
     * event is at or after `stop_time`. In the last case the clock is advanced
     * to `stop_time`. Returns the final virtual time. An engine runs once.
     */
    Time run(Time stop_time);

    std::uint64_t dispatched() const noexcept { return dispatched_; }
    std::size_t queued() const noexcept { return heap_.size(); }

    /// One line per dispatch: `t_ns kind node detail`.
    void set_trace(std::ostream* out) { trace_ = out; }
    void set_dispatch_hook(DispatchHook hook) { hook_ = std::move(hook); }

private:
    struct Entry {
        Time time;
        std::uint64_t seq;
        EventKind kind;
        NodeId node;
        std::uint64_t detail;
        Callback fn;
    };

    struct Later {
        bool operator()(const Entry& a, const Entry& b) const
        {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    Time now_{0};
    std::uint64_t next_seq_ = 1;
    std::uint64_t dispatched_ = 0;
    bool ran_ = false;
    bool stop_requested_ = false;
    std::vector<Entry> heap_;
    std::vector<bool> finished_; // indexed by seq: dispatched or cancelled
    std::ostream* trace_ = nullptr;
    DispatchHook hook_;
};

/**
 * Seeded random stream. Streams keyed by the same (seed, purpose) pair
 * produce identical draws; different purposes give unrelated sequences.
 */
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view purpose);

    std::uint64_t next() { return gen_(); }
    /// Uniform integer on the closed range [lo, hi].
    std::uint32_t uniform_int(std::uint32_t lo, std::uint32_t hi);
    /// Uniform real on [lo, hi).
    double uniform(double lo, double hi);
    double normal(double mean, double stddev);

private:
    std::mt19937_64 gen_;
};

inline RngStream rng_stream(std::uint64_t seed, std::string_view purpose)
{
    return RngStream(seed, purpose);
}

} // namespace uavsim
