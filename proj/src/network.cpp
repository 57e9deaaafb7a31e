#include "uavsim/network.hpp"

#include "uavsim/traffic.hpp"

#include <fmt/format.h>

#include <cmath>
#include <memory>

namespace uavsim {

namespace {

class CollisionCounter final : public ChannelObserver {
public:
    explicit CollisionCounter(ChannelObserver* next) : next_(next) {}

    void on_tx_start(const Transmission& tx) override
    {
        if (next_ != nullptr)
            next_->on_tx_start(tx);
    }

    void on_tx_end(const Transmission& tx) override
    {
        if (next_ != nullptr)
            next_->on_tx_end(tx);
    }

    void on_reception(NodeId node, const Transmission& tx, RxOutcome outcome) override
    {
        if (outcome == RxOutcome::CollisionLoss && node == tx.frame.dst) {
            ++collisions;
            if (tx.frame.kind == FrameKind::Data)
                ++data_collisions;
        }
        if (next_ != nullptr)
            next_->on_reception(node, tx, outcome);
    }

    std::uint64_t collisions = 0;
    std::uint64_t data_collisions = 0;

private:
    ChannelObserver* next_;
};

MobilityState initial_uav_state(const Scenario& s, RngStream& rng)
{
    const Vec3 start = uav_start_position(s);
    switch (s.uav_mobility) {
    case MobilityModelKind::ConstantPosition:
        return make_constant_position(start);
    case MobilityModelKind::GaussMarkov: {
        const double heading = rng.uniform(0.0, 2.0 * M_PI);
        return make_gauss_markov(start, s.area, s.uav_mean_speed, heading, s.gm_mean_pitch, s.gm_alpha,
                                 NoiseStd{s.speed_noise_std(), s.gm_direction_std, s.gm_pitch_std},
                                 Time{0}, from_seconds(s.gm_timestep));
    }
    case MobilityModelKind::RandomDirection2D:
        return make_random_direction_2d(start, s.area, s.uav_mean_speed, s.rd_pause, Time{0});
    }
    return make_constant_position(start);
}

} // namespace

std::string access_label(const Scenario& s)
{
    return select_access_mechanism(s.payload_size + kDataOverheadBytes, s.rts_threshold) ==
                   AccessMechanism::RtsCts
               ? "rtscts"
               : "basic";
}

std::string scenario_id(const Scenario& s)
{
    return fmt::format("n{}-{}-{}-v{:g}-r{:.0f}", s.n_sta, access_label(s), short_name(s.uav_mobility),
                       s.uav_mean_speed, s.traffic_rate_per_sta);
}

RunResult run_scenario(const Scenario& s, const RunHooks& hooks)
{
    validate(s);

    Simulator sim;
    sim.set_trace(hooks.event_trace);
    if (hooks.dispatch)
        sim.set_dispatch_hook(hooks.dispatch);

    const Time stop = from_seconds(s.sim_time);
    Channel channel(sim, s.max_range);
    CollisionCounter counter(hooks.channel);
    channel.set_observer(&counter);

    FlowMonitor monitor;
    PacketSink sink;

    MacConfig mac_config;
    mac_config.rts_threshold = s.rts_threshold;
    mac_config.eifs = s.eifs;
    mac_config.beacon_interval = from_seconds(s.beacon_interval);
    mac_config.queue_capacity = s.queue_capacity;
    mac_config.queue_max_delay = from_seconds(s.queue_max_delay);

    RngStream uav_rng(s.seed, "mobility/uav");
    MobilityState uav_initial = initial_uav_state(s, uav_rng);
    MobilityDriver uav(sim, kApId, std::move(uav_initial), std::move(uav_rng),
                       from_seconds(s.gm_timestep));
    if (hooks.mobility)
        uav.set_update_hook(hooks.mobility);

    ApMac ap(
        sim, channel, mac_config,
        [&](const Frame& f) {
            if (auto record = sink.receive(f, sim.now()))
                monitor.on_rx(*record);
        },
        hooks.mac);
    channel.add_node([&uav](Time t) { return uav.position(t); }, &ap);

    const DropFn on_drop = [&](const Frame& f, DropReason) {
        if (!sink.delivered(f.flow_id, f.seq))
            monitor.on_drop(f);
    };

    const auto positions = sensor_positions(s);
    std::vector<std::unique_ptr<StationMac>> stations;
    std::vector<std::unique_ptr<OnOffSource>> sources;
    stations.reserve(positions.size());
    sources.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const auto id = static_cast<NodeId>(i + 1);
        const std::string label = std::to_string(id);
        stations.push_back(std::make_unique<StationMac>(id, sim, channel, mac_config,
                                                        RngStream(s.seed, "backoff/" + label),
                                                        MacHooks{on_drop, hooks.mac, hooks.mac_trace}));
        const Vec3 p = positions[i];
        channel.add_node([p](Time) { return p; }, stations.back().get());

        FlowSpec spec;
        spec.flow_id = id;
        spec.rate = s.traffic_rate_per_sta;
        spec.payload = s.payload_size;
        spec.on_duration = from_seconds(s.on_duration);
        spec.off_duration = from_seconds(s.off_duration);
        spec.start = from_seconds(s.app_start);
        spec.stop = stop;
        StationMac* mac = stations.back().get();
        sources.push_back(std::make_unique<OnOffSource>(sim, spec, RngStream(s.seed, "traffic/" + label),
                                                        [&monitor, &sim, mac](const Frame& f) {
                                                            monitor.on_tx(f, sim.now());
                                                            mac->enqueue(f);
                                                        }));
    }

    uav.start();
    ap.start();
    for (auto& src : sources)
        src->start();

    RunResult result;
    result.end_time = sim.run(stop);

    for (const auto& st : stations) {
        std::uint64_t residual = 0;
        const DcfState& d = st->state();
        if (d.in_service && !sink.delivered(d.in_service->flow_id, d.in_service->seq))
            ++residual;
        for (const auto& f : d.queue.frames())
            if (!sink.delivered(f.flow_id, f.seq))
                ++residual;
        monitor.set_residual(st->id(), residual);
    }

    result.flows = monitor.flows();
    result.collision_events = counter.collisions;
    result.data_collisions = counter.data_collisions;
    result.duplicates = sink.duplicates();
    result.beacons = ap.beacons_sent();
    result.events = sim.dispatched();
    return result;
}

RunRow make_run_row(const Scenario& s, const RunResult& r)
{
    RunRow row;
    row.scenario_id = scenario_id(s);
    row.seed = s.seed;
    row.n_sta = s.n_sta;
    row.access = access_label(s);
    row.mobility = std::string(short_name(s.uav_mobility));
    row.uav_speed_mps = s.uav_mean_speed;
    row.traffic_rate_bps = s.traffic_rate_per_sta;
    row.sim_time_s = s.sim_time;
    row.throughput_bps = throughput(r.flows, s.sim_time);
    row.avg_delay_pooled_s = average_delay(r.flows, DelayMode::PooledMean).seconds;
    row.avg_delay_eq2_s = average_delay(r.flows, DelayMode::SumOfFlowMeans).seconds;
    for (const auto& f : r.flows) {
        row.tx_packets += f.tx_packets;
        row.rx_packets += f.rx_packets;
        row.dropped_packets += f.packets_dropped;
    }
    row.collision_events = r.collision_events;
    return row;
}

} // namespace uavsim
