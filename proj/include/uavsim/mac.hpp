#pragma once

#include "uavsim/engine.hpp"
#include "uavsim/phy.hpp"
#include "uavsim/time.hpp"

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>

namespace uavsim {

// 802.11a DCF timing.
inline constexpr Time kSlot = std::chrono::microseconds{9};
inline constexpr Time kSifs = std::chrono::microseconds{16};
inline constexpr Time kDifs = kSifs + 2 * kSlot; // 34 us
inline constexpr Time kPifs = kSifs + kSlot;     // 25 us
inline constexpr std::uint32_t kCwMin = 15;
inline constexpr std::uint32_t kCwMax = 1023;
inline constexpr std::uint32_t kRetryLimit = 7;
inline constexpr std::uint32_t kMissedBeaconLimit = 3;

/// SIFS + ACK airtime + DIFS.
Time eifs_duration();
/// SIFS + slot + ACK airtime, measured from the end of the DATA frame.
Time ack_timeout();
/// SIFS + slot + CTS airtime, measured from the end of the RTS frame.
Time cts_timeout();

enum class AccessMechanism { Basic, RtsCts };

/// RTS/CTS iff the MPDU is strictly larger than the threshold.
AccessMechanism select_access_mechanism(std::uint32_t mpdu_bytes, std::uint32_t rts_threshold);

/// Uniform integer on [0, cw].
std::uint32_t draw_backoff(std::uint32_t cw, RngStream& rng);

enum class DropReason { QueueFull, QueueExpired, RetryLimit };

std::string_view to_string(DropReason reason);

using DropFn = std::function<void(const Frame&, DropReason)>;

/// FIFO of DATA frames with a packet limit and a maximum residence time.
class MacQueue {
public:
    explicit MacQueue(std::size_t capacity = 500, Time max_delay = std::chrono::milliseconds{500});

    /// Purges expired frames, then appends; tail-drops when full. Returns false on drop.
    bool push(const Frame& frame, Time now, const DropFn& drop);
    /// Purges expired frames at the head, then removes and returns the head.
    std::optional<Frame> pop(Time now, const DropFn& drop);
    void purge_expired(Time now, const DropFn& drop);

    std::size_t size() const { return frames_.size(); }
    bool empty() const { return frames_.empty(); }
    std::size_t capacity() const { return capacity_; }
    const std::deque<Frame>& frames() const { return frames_; }

private:
    std::size_t capacity_;
    Time max_delay_;
    std::deque<Frame> frames_;
};

/// Per-station contention state.
struct DcfState {
    std::uint32_t cw = kCwMin;
    std::uint32_t backoff = 0; // slots left, relative to the current countdown start
    std::uint32_t retries = 0;
    Time nav_until{0};
    bool active = false;
    MacQueue queue;
    std::optional<Frame> in_service; // head frame being exchanged or retried
};

/**
 * Failed attempt (no CTS or ACK). Doubles the window up to CWmax and counts
 * the retry; past the retry limit the head frame is discarded and the
 * window resets. A fresh backoff is drawn from the resulting window.
 * Returns the dropped frame, if any.
 */
std::optional<Frame> on_tx_failure(DcfState& s, RngStream& rng,
                                   std::uint32_t retry_limit = kRetryLimit);

/// Delivered DATA: reset window and retries, release the head frame, draw a post-backoff.
void on_tx_success(DcfState& s, RngStream& rng);

/// nav_until = max(nav_until, t + duration). Returns true if the NAV moved.
bool update_nav(DcfState& s, const Frame& overheard, Time t);

struct MacConfig {
    std::uint32_t rts_threshold = 65535;
    bool eifs = true;
    Time beacon_interval = std::chrono::milliseconds{100};
    std::size_t queue_capacity = 500;
    Time queue_max_delay = std::chrono::milliseconds{500};
    std::uint32_t retry_limit = kRetryLimit;
};

/// Snapshot handed to observers whenever a MAC puts a frame on the air.
struct TxCheck {
    Time now{0};
    bool response = false; // SIFS-separated frame inside an exchange
    bool medium_busy = false;
    Time nav_until{0};
    bool active = true;
};

class MacObserver {
public:
    virtual ~MacObserver() = default;
    virtual void on_mac_tx(NodeId, const Frame&, const TxCheck&) {}
    virtual void on_dcf_update(NodeId, const DcfState&) {}
};

struct MacHooks {
    DropFn on_drop;
    MacObserver* observer = nullptr;
    std::ostream* trace = nullptr; // `t node seq kind outcome cw backoff retries`
};

/**
 * Station side of DCF. Contention runs only while the station is active,
 * idle in its exchange, the medium is idle and the NAV has expired. The
 * countdown starts DIFS (or EIFS after a corrupted reception) into each
 * idle period and is frozen, slot-accurately, whenever the medium goes busy.
 */
class StationMac final : public PhyListener {
public:
    StationMac(NodeId id, Simulator& sim, Channel& channel, const MacConfig& config,
               RngStream backoff_rng, MacHooks hooks);

    /// Hands an application DATA frame to the MAC queue.
    void enqueue(const Frame& data);

    NodeId id() const { return id_; }
    const DcfState& state() const { return dcf_; }
    bool in_exchange() const { return phase_ != Phase::Contend; }

    void on_medium_busy() override;
    void on_medium_idle() override;
    void on_rx_end(const Frame& frame, RxOutcome outcome) override;
    void on_tx_end(const Frame& frame) override;

private:
    enum class Phase { Contend, TxRts, WaitCts, CtsSifs, TxData, WaitAck };

    bool has_frame() const { return dcf_.in_service.has_value() || !dcf_.queue.empty(); }
    bool contention_allowed() const;
    void update_contention();
    void freeze();
    void resume();
    void schedule_access();
    void on_access();
    void start_exchange();
    void send_data();
    void on_response_timeout();
    void on_success();
    void on_beacon();
    void on_beacon_watchdog();
    void on_nav_expiry();
    Frame data_frame() const;
    void transmit(const Frame& frame, bool response);
    void notify();

    NodeId id_;
    Simulator& sim_;
    Channel& channel_;
    MacConfig config_;
    RngStream rng_;
    MacHooks hooks_;

    DcfState dcf_;
    Phase phase_ = Phase::Contend;
    bool counting_ = false;
    bool eifs_pending_ = false;
    Time count_from_{0};
    EventId access_event_;
    EventId timeout_event_;
    EventId nav_event_;
    EventId watchdog_event_;
};

/**
 * Access point: answers RTS with CTS and DATA with ACK after SIFS, hands
 * delivered DATA to the sink, and broadcasts beacons at each target beacon
 * time, deferring (PIFS after the medium frees up) when it is busy.
 */
class ApMac final : public PhyListener {
public:
    using DataFn = std::function<void(const Frame&)>;

    ApMac(Simulator& sim, Channel& channel, const MacConfig& config, DataFn on_data,
          MacObserver* observer = nullptr);

    void start();

    std::uint64_t beacons_sent() const { return beacons_sent_; }

    void on_medium_busy() override {}
    void on_medium_idle() override;
    void on_rx_end(const Frame& frame, RxOutcome outcome) override;
    void on_tx_end(const Frame& frame) override;

private:
    bool ready() const;
    void on_tbtt();
    void arm_beacon_attempt();
    void try_deferred_beacon();
    void send_beacon();
    void respond(const Frame& frame);
    void transmit(const Frame& frame, bool response);

    Simulator& sim_;
    Channel& channel_;
    MacConfig config_;
    DataFn on_data_;
    MacObserver* observer_;

    bool beacon_pending_ = false;
    bool response_pending_ = false;
    Time idle_since_{0};
    Time reserved_until_{0};
    Time next_tbtt_{0};
    EventId attempt_event_;
    std::uint64_t beacons_sent_ = 0;
};

} // namespace uavsim
