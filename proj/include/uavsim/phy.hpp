#pragma once

#include "uavsim/engine.hpp"
#include "uavsim/time.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace uavsim {

enum class FrameKind : std::uint8_t { Beacon, Rts, Cts, Data, Ack };

std::string_view to_string(FrameKind kind);

// MPDU sizes in bytes, headers included.
inline constexpr std::uint32_t kAckBytes = 14;
inline constexpr std::uint32_t kRtsBytes = 20;
inline constexpr std::uint32_t kCtsBytes = 14;
inline constexpr std::uint32_t kBeaconBytes = 80;
// 24 MAC header + 4 FCS + 8 LLC/SNAP + 20 IPv4 + 8 UDP.
inline constexpr std::uint32_t kDataOverheadBytes = 64;

struct Frame {
    FrameKind kind = FrameKind::Data;
    NodeId src = 0;
    NodeId dst = 0;
    std::uint32_t mpdu_bytes = 0;
    Time duration{0}; // NAV reservation following this frame
    std::uint32_t flow_id = 0;
    std::uint64_t seq = 0;
    Time enqueue_time{0};
    std::uint32_t payload_bytes = 0;
};

/// 802.11a OFDM at 12 Mb/s: 20 us preamble + PLCP header, 4 us symbols of 48 data bits
/// carrying 16 service bits, the MPDU and 6 tail bits.
Time frame_airtime(std::uint32_t mpdu_bytes);

/// Closed range test: distance <= max_range.
bool in_range(const Vec3& a, const Vec3& b, double max_range);

/// distance / c, rounded to the nearest nanosecond.
Time propagation_delay(double meters);

enum class RxOutcome : std::uint8_t { Delivered, CollisionLoss, OutOfRange };

std::string_view to_string(RxOutcome outcome);

struct Transmission {
    std::uint64_t id = 0;
    Frame frame;
    Vec3 tx_pos;  // transmitter position at start
    Vec3 end_pos; // transmitter position at end
    Time start{0};
    Time end{0};
};

using PositionOracle = std::function<Vec3(NodeId, Time)>;

/**
 * Reference resolution of one frame at one receiver, evaluated over the full
 * transmission log. A signal occupies [start + d/c, end + d/c) at the
 * receiver, where d is measured at the transmission start; the receiver's own
 * transmissions occupy [start, end). Signals from transmitters beyond range
 * at their start do not interfere. There is no capture.
 */
RxOutcome resolve_reception(NodeId receiver, const Transmission& tx,
                            std::span<const Transmission> log, const PositionOracle& position,
                            double max_range);

/// MAC-side receiver of PHY notifications.
class PhyListener {
public:
    virtual ~PhyListener() = default;
    virtual void on_medium_busy() = 0;
    virtual void on_medium_idle() = 0;
    virtual void on_rx_end(const Frame& frame, RxOutcome outcome) = 0;
    virtual void on_tx_end(const Frame& frame) = 0;
};

class ChannelObserver {
public:
    virtual ~ChannelObserver() = default;
    virtual void on_tx_start(const Transmission&) {}
    virtual void on_tx_end(const Transmission&) {}
    /// Every reception attempt at a node that was in range at the transmission start,
    /// plus OutOfRange at the addressed receiver when it was not.
    virtual void on_reception(NodeId, const Transmission&, RxOutcome) {}
};

/**
 * Shared medium with a hard range cutoff. Tracks, per node, the signals
 * currently arriving and the node's own transmission, derives carrier sense
 * from them, and marks overlapping receptions as collided.
 */
class Channel {
public:
    using PositionFn = std::function<Vec3(Time)>;

    Channel(Simulator& sim, double max_range);

    /// Nodes must be added in id order starting at 0.
    NodeId add_node(PositionFn position, PhyListener* listener);

    /// Starts transmitting now; the PHY reports on_tx_end to the sender's listener.
    void transmit(NodeId src, const Frame& frame);

    /// Carrier sense: some in-range signal is arriving, or the node is transmitting.
    bool busy(NodeId listener) const;
    bool transmitting(NodeId node) const;
    /// Signals currently arriving at `node` (collided or not).
    std::size_t arriving(NodeId node) const;

    Vec3 position(NodeId node, Time t) const { return nodes_[node].position(t); }
    double max_range() const { return max_range_; }
    std::size_t node_count() const { return nodes_.size(); }

    void set_observer(ChannelObserver* observer) { observer_ = observer; }

private:
    struct Arrival {
        std::uint64_t tx_id;
        Time end;
        bool corrupted;
    };

    struct Node {
        PositionFn position;
        PhyListener* listener;
        Time tx_end{0};
        bool tx_active = false;
        std::vector<Arrival> arrivals;
    };

    struct Record {
        Transmission tx;
        std::uint32_t pending_rx = 0;
        bool ended = false;
    };

    bool sensing(const Node& n) const;
    void on_tx_end(NodeId src, std::uint64_t tx_id);
    void on_rx_start(NodeId node, std::uint64_t tx_id, Time end);
    void on_rx_end(NodeId node, std::uint64_t tx_id, bool reachable);
    void release(std::uint64_t tx_id);

    Simulator& sim_;
    double max_range_;
    std::vector<Node> nodes_;
    std::unordered_map<std::uint64_t, Record> records_;
    std::uint64_t next_tx_id_ = 1;
    ChannelObserver* observer_ = nullptr;
};

} // namespace uavsim
