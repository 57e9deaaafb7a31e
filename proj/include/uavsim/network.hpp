#pragma once

#include "uavsim/engine.hpp"
#include "uavsim/mac.hpp"
#include "uavsim/metrics.hpp"
#include "uavsim/mobility.hpp"
#include "uavsim/phy.hpp"
#include "uavsim/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace uavsim {

/// Optional taps into a run. Everything here is observation only.
struct RunHooks {
    std::ostream* event_trace = nullptr; // engine dispatch lines
    std::ostream* mac_trace = nullptr;   // per-exchange outcomes
    ChannelObserver* channel = nullptr;
    MacObserver* mac = nullptr;
    MobilityDriver::UpdateHook mobility;
    Simulator::DispatchHook dispatch;
};

struct RunResult {
    std::vector<FlowStats> flows; // one per station, ordered by node id
    std::uint64_t collision_events = 0; // addressed receptions lost to overlap
    std::uint64_t data_collisions = 0;  // DATA frames lost to overlap at the AP
    std::uint64_t duplicates = 0;
    std::uint64_t beacons = 0;
    std::uint64_t events = 0;
    Time end_time{0};
};

/// AP is node 0 (carried by the UAV); stations are nodes 1..n_sta.
RunResult run_scenario(const Scenario& scenario, const RunHooks& hooks = {});

/// basic | rtscts for the scenario's DATA frame size.
std::string access_label(const Scenario& scenario);

/// Deterministic identifier built from the swept quantities.
std::string scenario_id(const Scenario& scenario);

RunRow make_run_row(const Scenario& scenario, const RunResult& result);

} // namespace uavsim
