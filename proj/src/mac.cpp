#include "uavsim/mac.hpp"

#include <algorithm>
#include <ostream>

namespace uavsim {

Time eifs_duration()
{
    return kSifs + frame_airtime(kAckBytes) + kDifs;
}

Time ack_timeout()
{
    return kSifs + kSlot + frame_airtime(kAckBytes);
}

Time cts_timeout()
{
    return kSifs + kSlot + frame_airtime(kCtsBytes);
}

AccessMechanism select_access_mechanism(std::uint32_t mpdu_bytes, std::uint32_t rts_threshold)
{
    return mpdu_bytes > rts_threshold ? AccessMechanism::RtsCts : AccessMechanism::Basic;
}

std::uint32_t draw_backoff(std::uint32_t cw, RngStream& rng)
{
    return rng.uniform_int(0, cw);
}

std::string_view to_string(DropReason reason)
{
    switch (reason) {
    case DropReason::QueueFull: return "queue-full";
    case DropReason::QueueExpired: return "queue-expired";
    case DropReason::RetryLimit: return "retry-limit";
    }
    return "?";
}

MacQueue::MacQueue(std::size_t capacity, Time max_delay) : capacity_(capacity), max_delay_(max_delay) {}

void MacQueue::purge_expired(Time now, const DropFn& drop)
{
    while (!frames_.empty() && now - frames_.front().enqueue_time > max_delay_) {
        const Frame expired = frames_.front();
        frames_.pop_front();
        if (drop)
            drop(expired, DropReason::QueueExpired);
    }
}

bool MacQueue::push(const Frame& frame, Time now, const DropFn& drop)
{
    purge_expired(now, drop);
    if (frames_.size() >= capacity_) {
        if (drop)
            drop(frame, DropReason::QueueFull);
        return false;
    }
    frames_.push_back(frame);
    return true;
}

std::optional<Frame> MacQueue::pop(Time now, const DropFn& drop)
{
    purge_expired(now, drop);
    if (frames_.empty())
        return std::nullopt;
    Frame head = frames_.front();
    frames_.pop_front();
    return head;
}

std::optional<Frame> on_tx_failure(DcfState& s, RngStream& rng, std::uint32_t retry_limit)
{
    std::optional<Frame> dropped;
    s.cw = std::min(2 * (s.cw + 1) - 1, kCwMax);
    ++s.retries;
    if (s.retries > retry_limit) {
        dropped = std::move(s.in_service);
        s.in_service.reset();
        s.cw = kCwMin;
        s.retries = 0;
    }
    s.backoff = draw_backoff(s.cw, rng);
    return dropped;
}

void on_tx_success(DcfState& s, RngStream& rng)
{
    s.cw = kCwMin;
    s.retries = 0;
    s.in_service.reset();
    s.backoff = draw_backoff(s.cw, rng);
}

bool update_nav(DcfState& s, const Frame& overheard, Time t)
{
    const Time until = t + overheard.duration;
    if (overheard.duration <= Time{0} || until <= s.nav_until)
        return false;
    s.nav_until = until;
    return true;
}

// ---------------------------------------------------------------------------

StationMac::StationMac(NodeId id, Simulator& sim, Channel& channel, const MacConfig& config,
                       RngStream backoff_rng, MacHooks hooks)
    : id_(id), sim_(sim), channel_(channel), config_(config), rng_(std::move(backoff_rng)),
      hooks_(std::move(hooks))
{
    dcf_.queue = MacQueue(config.queue_capacity, config.queue_max_delay);
}

void StationMac::enqueue(const Frame& data)
{
    const bool had_frame = has_frame();
    dcf_.queue.push(data, sim_.now(), hooks_.on_drop);
    if (had_frame || !has_frame())
        return;
    if (counting_) {
        schedule_access();
    } else if (dcf_.active && phase_ == Phase::Contend && dcf_.backoff == 0) {
        // Arrival while the medium is busy: defer by a fresh backoff.
        dcf_.backoff = draw_backoff(dcf_.cw, rng_);
        notify();
    }
}

bool StationMac::contention_allowed() const
{
    return dcf_.active && phase_ == Phase::Contend && !channel_.busy(id_) &&
           sim_.now() >= dcf_.nav_until;
}

void StationMac::update_contention()
{
    const bool allowed = contention_allowed();
    if (counting_ && !allowed)
        freeze();
    else if (!counting_ && allowed)
        resume();
}

void StationMac::freeze()
{
    const Time now = sim_.now();
    if (now > count_from_) {
        const auto slots = static_cast<std::uint64_t>((now - count_from_) / kSlot);
        dcf_.backoff -= static_cast<std::uint32_t>(std::min<std::uint64_t>(slots, dcf_.backoff));
    }
    counting_ = false;
    sim_.cancel(access_event_);
    access_event_ = {};
}

void StationMac::resume()
{
    counting_ = true;
    count_from_ = sim_.now() + (eifs_pending_ ? eifs_duration() : kDifs);
    schedule_access();
}

void StationMac::schedule_access()
{
    sim_.cancel(access_event_);
    access_event_ = {};
    if (!has_frame())
        return; // post-backoff keeps counting implicitly from count_from_
    const Time at = std::max(sim_.now(), count_from_ + dcf_.backoff * kSlot);
    access_event_ = sim_.schedule(at, EventKind::BackoffSlot, id_, [this] { on_access(); }, dcf_.backoff);
}

void StationMac::on_access()
{
    access_event_ = {};
    dcf_.backoff = 0;
    if (!dcf_.in_service)
        dcf_.in_service = dcf_.queue.pop(sim_.now(), hooks_.on_drop);
    if (!dcf_.in_service)
        return;
    start_exchange();
}

Frame StationMac::data_frame() const
{
    Frame f = *dcf_.in_service;
    f.src = id_;
    f.dst = kApId;
    f.duration = kSifs + frame_airtime(kAckBytes);
    return f;
}

void StationMac::start_exchange()
{
    const Frame data = data_frame();
    if (select_access_mechanism(data.mpdu_bytes, config_.rts_threshold) == AccessMechanism::RtsCts) {
        Frame rts;
        rts.kind = FrameKind::Rts;
        rts.src = id_;
        rts.dst = kApId;
        rts.mpdu_bytes = kRtsBytes;
        rts.seq = data.seq;
        rts.flow_id = data.flow_id;
        rts.duration = 3 * kSifs + frame_airtime(kCtsBytes) + frame_airtime(data.mpdu_bytes) +
                       frame_airtime(kAckBytes);
        phase_ = Phase::TxRts;
        transmit(rts, false);
    } else {
        phase_ = Phase::TxData;
        transmit(data, false);
    }
}

void StationMac::send_data()
{
    timeout_event_ = {};
    phase_ = Phase::TxData;
    transmit(data_frame(), true);
}

void StationMac::transmit(const Frame& frame, bool response)
{
    eifs_pending_ = false;
    if (hooks_.observer != nullptr) {
        hooks_.observer->on_mac_tx(id_, frame,
                                   TxCheck{sim_.now(), response, channel_.busy(id_), dcf_.nav_until, dcf_.active});
    }
    channel_.transmit(id_, frame);
    update_contention();
}

void StationMac::on_tx_end(const Frame&)
{
    if (phase_ == Phase::TxRts) {
        phase_ = Phase::WaitCts;
        timeout_event_ = sim_.schedule_in(cts_timeout(), EventKind::Timer, id_,
                                          [this] { on_response_timeout(); });
    } else if (phase_ == Phase::TxData) {
        phase_ = Phase::WaitAck;
        timeout_event_ = sim_.schedule_in(ack_timeout(), EventKind::Timer, id_,
                                          [this] { on_response_timeout(); });
    }
}

void StationMac::on_response_timeout()
{
    timeout_event_ = {};
    const FrameKind failed = phase_ == Phase::WaitCts ? FrameKind::Rts : FrameKind::Data;
    phase_ = Phase::Contend;
    const auto seq = dcf_.in_service ? dcf_.in_service->seq : 0;
    auto dropped = on_tx_failure(dcf_, rng_, config_.retry_limit);
    if (hooks_.trace != nullptr) {
        *hooks_.trace << sim_.now().count() << ' ' << id_ << ' ' << seq << ' ' << to_string(failed)
                      << ' ' << (dropped ? "drop" : "fail") << ' ' << dcf_.cw << ' ' << dcf_.backoff
                      << ' ' << dcf_.retries << '\n';
    }
    if (dropped && hooks_.on_drop)
        hooks_.on_drop(*dropped, DropReason::RetryLimit);
    notify();
    update_contention();
}

void StationMac::on_success()
{
    phase_ = Phase::Contend;
    const auto seq = dcf_.in_service ? dcf_.in_service->seq : 0;
    on_tx_success(dcf_, rng_);
    if (hooks_.trace != nullptr) {
        *hooks_.trace << sim_.now().count() << ' ' << id_ << ' ' << seq << " DATA success "
                      << dcf_.cw << ' ' << dcf_.backoff << ' ' << dcf_.retries << '\n';
    }
    notify();
    update_contention();
}

void StationMac::on_medium_busy()
{
    update_contention();
}

void StationMac::on_medium_idle()
{
    update_contention();
}

void StationMac::on_rx_end(const Frame& frame, RxOutcome outcome)
{
    if (outcome == RxOutcome::CollisionLoss) {
        if (config_.eifs)
            eifs_pending_ = true;
        return;
    }
    if (outcome != RxOutcome::Delivered)
        return;
    eifs_pending_ = false;

    if (frame.kind == FrameKind::Beacon) {
        on_beacon();
        return;
    }
    if (frame.dst == id_) {
        if (frame.kind == FrameKind::Cts && phase_ == Phase::WaitCts) {
            sim_.cancel(timeout_event_);
            phase_ = Phase::CtsSifs;
            timeout_event_ = sim_.schedule_in(kSifs, EventKind::Timer, id_, [this] { send_data(); });
        } else if (frame.kind == FrameKind::Ack && phase_ == Phase::WaitAck) {
            sim_.cancel(timeout_event_);
            timeout_event_ = {};
            on_success();
        }
        return;
    }
    if (update_nav(dcf_, frame, sim_.now())) {
        sim_.cancel(nav_event_);
        nav_event_ = sim_.schedule(dcf_.nav_until, EventKind::NavExpiry, id_, [this] { on_nav_expiry(); });
        update_contention();
    }
}

void StationMac::on_nav_expiry()
{
    nav_event_ = {};
    update_contention();
}

void StationMac::on_beacon()
{
    sim_.cancel(watchdog_event_);
    watchdog_event_ = sim_.schedule_in(kMissedBeaconLimit * config_.beacon_interval, EventKind::Timer,
                                       id_, [this] { on_beacon_watchdog(); });
    if (!dcf_.active) {
        dcf_.active = true;
        dcf_.backoff = draw_backoff(dcf_.cw, rng_);
        notify();
    }
    update_contention();
}

void StationMac::on_beacon_watchdog()
{
    watchdog_event_ = {};
    dcf_.active = false;
    update_contention();
    notify();
}

void StationMac::notify()
{
    if (hooks_.observer != nullptr)
        hooks_.observer->on_dcf_update(id_, dcf_);
}

// ---------------------------------------------------------------------------

ApMac::ApMac(Simulator& sim, Channel& channel, const MacConfig& config, DataFn on_data,
             MacObserver* observer)
    : sim_(sim), channel_(channel), config_(config), on_data_(std::move(on_data)), observer_(observer)
{
}

void ApMac::start()
{
    next_tbtt_ = sim_.now();
    sim_.schedule(next_tbtt_, EventKind::BeaconTick, kApId, [this] { on_tbtt(); });
}

bool ApMac::ready() const
{
    return !channel_.busy(kApId) && !response_pending_ && sim_.now() >= reserved_until_;
}

void ApMac::on_tbtt()
{
    next_tbtt_ += config_.beacon_interval;
    sim_.schedule(next_tbtt_, EventKind::BeaconTick, kApId, [this] { on_tbtt(); });
    beacon_pending_ = true;
    if (ready())
        send_beacon();
}

void ApMac::arm_beacon_attempt()
{
    if (!beacon_pending_)
        return;
    sim_.cancel(attempt_event_);
    const Time quiet = std::max(idle_since_, reserved_until_);
    const Time at = std::max(sim_.now(), quiet + kPifs);
    attempt_event_ = sim_.schedule(at, EventKind::Timer, kApId, [this] { try_deferred_beacon(); });
}

void ApMac::try_deferred_beacon()
{
    attempt_event_ = {};
    if (beacon_pending_ && ready() && std::max(idle_since_, reserved_until_) + kPifs <= sim_.now())
        send_beacon();
}

void ApMac::send_beacon()
{
    beacon_pending_ = false;
    sim_.cancel(attempt_event_);
    attempt_event_ = {};
    Frame beacon;
    beacon.kind = FrameKind::Beacon;
    beacon.src = kApId;
    beacon.dst = kBroadcast;
    beacon.mpdu_bytes = kBeaconBytes;
    ++beacons_sent_;
    transmit(beacon, false);
}

void ApMac::on_medium_idle()
{
    idle_since_ = sim_.now();
    arm_beacon_attempt();
}

void ApMac::on_rx_end(const Frame& frame, RxOutcome outcome)
{
    if (outcome != RxOutcome::Delivered || frame.dst != kApId)
        return;
    if (frame.kind == FrameKind::Rts) {
        Frame cts;
        cts.kind = FrameKind::Cts;
        cts.src = kApId;
        cts.dst = frame.src;
        cts.mpdu_bytes = kCtsBytes;
        cts.seq = frame.seq;
        cts.flow_id = frame.flow_id;
        cts.duration = std::max(Time{0}, frame.duration - kSifs - frame_airtime(kCtsBytes));
        respond(cts);
    } else if (frame.kind == FrameKind::Data) {
        if (on_data_)
            on_data_(frame);
        Frame ack;
        ack.kind = FrameKind::Ack;
        ack.src = kApId;
        ack.dst = frame.src;
        ack.mpdu_bytes = kAckBytes;
        ack.seq = frame.seq;
        ack.flow_id = frame.flow_id;
        respond(ack);
    }
}

void ApMac::respond(const Frame& frame)
{
    response_pending_ = true;
    sim_.cancel(attempt_event_);
    attempt_event_ = {};
    sim_.schedule_in(kSifs, EventKind::Timer, kApId, [this, frame] {
        response_pending_ = false;
        if (!channel_.transmitting(kApId))
            transmit(frame, true);
        else
            arm_beacon_attempt();
    });
}

void ApMac::transmit(const Frame& frame, bool response)
{
    if (observer_ != nullptr)
        observer_->on_mac_tx(kApId, frame, TxCheck{sim_.now(), response, channel_.busy(kApId), Time{0}, true});
    channel_.transmit(kApId, frame);
}

void ApMac::on_tx_end(const Frame& frame)
{
    if (frame.kind == FrameKind::Cts) {
        reserved_until_ = sim_.now() + frame.duration;
        if (beacon_pending_) {
            sim_.schedule(reserved_until_, EventKind::Timer, kApId, [this] { arm_beacon_attempt(); });
        }
    }
}

} // namespace uavsim
