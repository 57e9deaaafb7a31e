#include "uavsim/phy.hpp"

#include <doctest.h>

#include <stdexcept>

#include <map>
#include <random>
#include <vector>

using namespace uavsim;
using namespace std::chrono_literals;

namespace {

struct NullListener final : PhyListener {
    void on_medium_busy() override { ++busy; }
    void on_medium_idle() override { ++idle; }
    void on_rx_end(const Frame& f, RxOutcome o) override { rx.emplace_back(f, o); }
    void on_tx_end(const Frame&) override { ++tx_end; }
    int busy = 0;
    int idle = 0;
    int tx_end = 0;
    std::vector<std::pair<Frame, RxOutcome>> rx;
};

Frame data_frame(NodeId src, NodeId dst, std::uint32_t bytes = 576)
{
    Frame f;
    f.kind = FrameKind::Data;
    f.src = src;
    f.dst = dst;
    f.mpdu_bytes = bytes;
    return f;
}

Transmission tx_at(std::uint64_t id, NodeId src, NodeId dst, Vec3 pos, Time start, std::uint32_t bytes = 576)
{
    return Transmission{id, data_frame(src, dst, bytes), pos, pos, start, start + frame_airtime(bytes)};
}

struct Recorder final : ChannelObserver {
    void on_tx_start(const Transmission& tx) override { log.push_back(tx); }
    void on_tx_end(const Transmission& tx) override
    {
        for (auto& t : log)
            if (t.id == tx.id)
                t.end_pos = tx.end_pos;
    }
    void on_reception(NodeId node, const Transmission& tx, RxOutcome outcome) override
    {
        outcomes.push_back({node, tx, outcome});
    }
    struct Entry {
        NodeId node;
        Transmission tx;
        RxOutcome outcome;
    };
    std::vector<Transmission> log;
    std::vector<Entry> outcomes;
};

} // namespace

TEST_CASE("airtime at 12 Mb/s")
{
    CHECK(frame_airtime(0) == Time{24us});
    CHECK(frame_airtime(kAckBytes) == Time{32us});
    CHECK(frame_airtime(kCtsBytes) == Time{32us});
    CHECK(frame_airtime(kRtsBytes) == Time{36us});
    CHECK(frame_airtime(576) == Time{408us});
    CHECK(frame_airtime(kBeaconBytes) == Time{76us});

    Time prev = frame_airtime(0);
    for (std::uint32_t b = 1; b < 3000; ++b) {
        const Time t = frame_airtime(b);
        REQUIRE(t >= prev);
        REQUIRE((t - 20us) % 4us == Time{0});
        prev = t;
    }
}

TEST_CASE("range test is closed and symmetric")
{
    const Vec3 a{0, 0, 0};
    CHECK(in_range(a, a, 100));
    CHECK(in_range(a, {100, 0, 0}, 100));
    CHECK_FALSE(in_range(a, {100 + 1e-6, 0, 0}, 100));
    CHECK(in_range({30, 40, 0}, {0, 0, 0}, 50));
    CHECK(in_range({0, 0, 0}, {30, 40, 0}, 50));
    CHECK(propagation_delay(299.792458) == Time{1us});
}

TEST_CASE("carrier sense follows range")
{
    Simulator sim;
    Channel ch(sim, 100);
    NullListener l0, l1, l2;
    ch.add_node([](Time) { return Vec3{0, 0, 0}; }, &l0);
    ch.add_node([](Time) { return Vec3{50, 0, 0}; }, &l1);
    ch.add_node([](Time) { return Vec3{150, 0, 0}; }, &l2);
    CHECK_FALSE(ch.busy(1));
    sim.schedule(1us, EventKind::Timer, 0, [&] { ch.transmit(0, data_frame(0, 1)); });
    sim.schedule(100us, EventKind::Timer, 0, [&] {
        CHECK(ch.busy(0));
        CHECK(ch.busy(1));
        CHECK_FALSE(ch.busy(2)); // hidden
        CHECK_THROWS_AS(ch.transmit(0, data_frame(0, 1)), std::logic_error);
    });
    sim.run(1s);
    CHECK_FALSE(ch.busy(1));
    CHECK(l1.busy == 1);
    CHECK(l1.idle == 1);
    CHECK(l2.busy == 0);
    REQUIRE(l1.rx.size() == 1);
    CHECK(l1.rx[0].second == RxOutcome::Delivered);
    CHECK(l0.tx_end == 1);
}

TEST_CASE("reference resolution examples")
{
    const std::map<NodeId, Vec3> where{{0, {0, 0, 0}}, {1, {-80, 0, 0}}, {2, {80, 0, 0}}, {3, {300, 0, 0}}};
    const PositionOracle pos = [&](NodeId n, Time) { return where.at(n); };

    SUBCASE("single frame is delivered")
    {
        const std::vector<Transmission> log{tx_at(1, 1, 0, where.at(1), 0us)};
        CHECK(resolve_reception(0, log[0], log, pos, 100) == RxOutcome::Delivered);
    }
    SUBCASE("hidden stations collide at the AP")
    {
        const std::vector<Transmission> log{tx_at(1, 1, 0, where.at(1), 0us), tx_at(2, 2, 0, where.at(2), 200us)};
        CHECK(resolve_reception(0, log[0], log, pos, 100) == RxOutcome::CollisionLoss);
        CHECK(resolve_reception(0, log[1], log, pos, 100) == RxOutcome::CollisionLoss);
    }
    SUBCASE("out-of-range interferer is harmless")
    {
        const std::vector<Transmission> log{tx_at(1, 1, 0, where.at(1), 0us), tx_at(2, 3, 2, where.at(3), 10us)};
        CHECK(resolve_reception(0, log[0], log, pos, 100) == RxOutcome::Delivered);
    }
    SUBCASE("back-to-back frames do not overlap")
    {
        const Transmission a = tx_at(1, 1, 0, where.at(1), 0us);
        // Arrives exactly when the first one finishes at the receiver.
        const Transmission b = tx_at(2, 2, 0, where.at(2), a.end);
        const std::vector<Transmission> log{a, b};
        CHECK(resolve_reception(0, a, log, pos, 100) == RxOutcome::Delivered);
        CHECK(resolve_reception(0, b, log, pos, 100) == RxOutcome::Delivered);
    }
    SUBCASE("receiver transmitting during the frame")
    {
        const std::vector<Transmission> log{tx_at(1, 1, 0, where.at(1), 0us), tx_at(2, 0, 2, where.at(0), 300us)};
        CHECK(resolve_reception(0, log[0], log, pos, 100) == RxOutcome::CollisionLoss);
    }
    SUBCASE("transmitter beyond range")
    {
        const std::vector<Transmission> log{tx_at(1, 3, 0, where.at(3), 0us)};
        CHECK(resolve_reception(0, log[0], log, pos, 100) == RxOutcome::OutOfRange);
    }
}

TEST_CASE("receiver leaving range mid-frame")
{
    // Receiver moves away at 1e5 m/s: 99 m at start, ~140 m when a 408 us frame ends.
    const PositionOracle pos = [](NodeId n, Time t) {
        return n == 0 ? Vec3{99.0 + 1e5 * to_seconds(t), 0, 0} : Vec3{0, 0, 0};
    };
    Transmission t = tx_at(1, 1, 0, {0, 0, 0}, 0us);
    const std::vector<Transmission> log{t};
    CHECK(resolve_reception(0, t, log, pos, 100) == RxOutcome::OutOfRange);

    Simulator sim;
    Channel ch(sim, 100);
    NullListener l0, l1;
    ch.add_node([&](Time tt) { return pos(0, tt); }, &l0);
    ch.add_node([&](Time tt) { return pos(1, tt); }, &l1);
    sim.schedule(Time{0}, EventKind::Timer, 1, [&] { ch.transmit(1, data_frame(1, 0)); });
    sim.run(1s);
    REQUIRE(l0.rx.size() == 1);
    CHECK(l0.rx[0].second == RxOutcome::OutOfRange);
}

TEST_CASE("incremental channel agrees with the reference resolution")
{
    std::mt19937_64 gen(2024);
    int checked = 0;
    int collided = 0;
    int out_of_range = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(gen() % 5);
        std::uniform_real_distribution<double> coord(0.0, 220.0);
        std::vector<Vec3> base(n);
        std::vector<Vec3> vel(n);
        for (int i = 0; i < n; ++i) {
            base[i] = Vec3{coord(gen), coord(gen), 0.0};
            vel[i] = (i == 0) ? Vec3{std::uniform_real_distribution<double>(-3e4, 3e4)(gen), 0, 0} : Vec3{};
        }
        const PositionOracle pos = [&](NodeId id, Time t) {
            const double s = to_seconds(t);
            return Vec3{base[id].x + vel[id].x * s, base[id].y + vel[id].y * s, 0.0};
        };

        Simulator sim;
        Channel ch(sim, 100.0);
        Recorder rec;
        ch.set_observer(&rec);
        std::vector<NullListener> listeners(n);
        for (int i = 0; i < n; ++i)
            ch.add_node([&pos, i](Time t) { return pos(static_cast<NodeId>(i), t); }, &listeners[i]);

        std::uniform_int_distribution<int> start_us(0, 20000);
        std::uniform_int_distribution<std::uint32_t> size(0, 700);
        for (int k = 0; k < 40; ++k) {
            const auto src = static_cast<NodeId>(gen() % n);
            const auto dst = static_cast<NodeId>((src + 1 + gen() % (n - 1)) % n);
            const std::uint32_t bytes = size(gen);
            sim.schedule(Time{std::chrono::microseconds{start_us(gen)}} + Time{gen() % 1000}, EventKind::Timer,
                         src, [&ch, src, dst, bytes] {
                             if (!ch.transmitting(src))
                                 ch.transmit(src, data_frame(src, dst, bytes));
                         });
        }
        sim.run(1s);

        for (const auto& e : rec.outcomes) {
            const RxOutcome ref = resolve_reception(e.node, e.tx, rec.log, pos, 100.0);
            REQUIRE(ref == e.outcome);
            ++checked;
            collided += e.outcome == RxOutcome::CollisionLoss ? 1 : 0;
            out_of_range += e.outcome == RxOutcome::OutOfRange ? 1 : 0;
        }
        // Every transmission is resolved exactly once at its addressed receiver.
        for (const auto& t : rec.log) {
            int at_dst = 0;
            for (const auto& e : rec.outcomes)
                at_dst += (e.tx.id == t.id && e.node == t.frame.dst) ? 1 : 0;
            REQUIRE(at_dst == 1);
        }
    }
    CHECK(checked > 1000);
    CHECK(collided > 50);
    CHECK(out_of_range > 10);
}
