#pragma once

#include "uavsim/mac.hpp"
#include "uavsim/metrics.hpp"
#include "uavsim/traffic.hpp"

#include <memory>
#include <sstream>
#include <string>
#include <vector>

// Hand-wired AP + stations for timing tests, bypassing the scenario layer.
struct Bench {
    Bench(double range, uavsim::Channel::PositionFn ap_position, const std::vector<uavsim::Vec3>& stations,
          uavsim::MacConfig config, std::uint64_t seed, uavsim::MacObserver* observer = nullptr)
        : ch(sim, range), cfg(config)
    {
        ap = std::make_unique<uavsim::ApMac>(
            sim, ch, cfg,
            [this](const uavsim::Frame& f) {
                if (auto r = sink.receive(f, sim.now())) {
                    monitor.on_rx(*r);
                    deliveries.push_back(*r);
                }
            },
            observer);
        ch.add_node(std::move(ap_position), ap.get());
        for (std::size_t i = 0; i < stations.size(); ++i) {
            const auto id = static_cast<uavsim::NodeId>(i + 1);
            sta.push_back(std::make_unique<uavsim::StationMac>(
                id, sim, ch, cfg, uavsim::RngStream(seed, "backoff/" + std::to_string(id)),
                uavsim::MacHooks{[this](const uavsim::Frame& f, uavsim::DropReason) { drops.push_back(f); },
                                 observer, &mac_trace}));
            const uavsim::Vec3 p = stations[i];
            ch.add_node([p](uavsim::Time) { return p; }, sta.back().get());
        }
    }

    /// A jammer with no MAC; transmit through `ch` directly.
    uavsim::NodeId add_jammer(uavsim::Vec3 p)
    {
        return ch.add_node([p](uavsim::Time) { return p; }, nullptr);
    }

    static uavsim::Frame data(uavsim::NodeId src, std::uint64_t seq, uavsim::Time t,
                              std::uint32_t payload = 512)
    {
        uavsim::Frame f;
        f.kind = uavsim::FrameKind::Data;
        f.src = src;
        f.dst = uavsim::kApId;
        f.flow_id = src;
        f.seq = seq;
        f.payload_bytes = payload;
        f.mpdu_bytes = payload + uavsim::kDataOverheadBytes;
        f.enqueue_time = t;
        return f;
    }

    uavsim::Simulator sim;
    uavsim::Channel ch;
    uavsim::MacConfig cfg;
    uavsim::PacketSink sink;
    uavsim::FlowMonitor monitor;
    std::unique_ptr<uavsim::ApMac> ap;
    std::vector<std::unique_ptr<uavsim::StationMac>> sta;
    std::vector<uavsim::DeliveryRecord> deliveries;
    std::vector<uavsim::Frame> drops;
    std::ostringstream mac_trace;
};
