#include "uavsim/traffic.hpp"

#include <doctest.h>

#include <cmath>

using namespace uavsim;
using namespace std::chrono_literals;

namespace {

FlowSpec spec(double rate, Time start = Time{0}, Time stop = 10s)
{
    FlowSpec f;
    f.flow_id = 1;
    f.rate = rate;
    f.start = start;
    f.stop = stop;
    return f;
}

std::vector<Frame> generate(const FlowSpec& f, std::uint64_t seed)
{
    Simulator sim;
    std::vector<Frame> out;
    OnOffSource src(sim, f, RngStream(seed, "traffic/1"), [&](const Frame& fr) { out.push_back(fr); });
    src.start();
    sim.run(f.stop + 1s);
    return out;
}

} // namespace

TEST_CASE("packet gaps")
{
    CHECK(packet_gap(spec(0.5e6)) == Time{8192us});
    const double gap_6 = 512.0 * 8.0 / 6e6;
    CHECK(std::abs(to_seconds(packet_gap(spec(6e6))) - gap_6) < 1e-9);
    CHECK(next_packet_time(spec(0.5e6), 1s) == 1s + Time{8192us});
}

TEST_CASE("generated packets are strictly periodic with no OFF time")
{
    const auto f = spec(0.5e6, 1s, 11s);
    const auto frames = generate(f, 3);
    REQUIRE(frames.size() > 2);
    const double expected = std::floor(to_seconds(f.stop - f.start) * f.rate / (8.0 * f.payload));
    CHECK(std::abs(static_cast<double>(frames.size()) - expected) <= 1.0);
    CHECK(frames.front().enqueue_time >= f.start);
    CHECK(frames.front().enqueue_time < f.start + packet_gap(f));
    for (std::size_t i = 0; i < frames.size(); ++i) {
        CHECK(frames[i].seq == i);
        CHECK(frames[i].kind == FrameKind::Data);
        CHECK(frames[i].dst == kApId);
        CHECK(frames[i].payload_bytes == 512);
        CHECK(frames[i].mpdu_bytes == 512 + kDataOverheadBytes);
        CHECK(frames[i].enqueue_time < f.stop);
        if (i > 0)
            CHECK(frames[i].enqueue_time - frames[i - 1].enqueue_time == packet_gap(f));
    }
}

TEST_CASE("packet count matches the offered load across rates and seeds")
{
    for (double rate : {0.5e6, 3e6, 6e6, 1.234e6}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto f = spec(rate, Time{250ms}, 2s);
            const double expected = std::floor(to_seconds(f.stop - f.start) * rate / (8.0 * f.payload));
            CHECK(std::abs(static_cast<double>(generate(f, seed).size()) - expected) <= 1.0);
        }
    }
}

TEST_CASE("no packets inside OFF windows")
{
    auto f = spec(3e6, Time{0}, 10s);
    f.on_duration = 300ms;
    f.off_duration = 700ms;
    CHECK(in_on_period(f, 100ms));
    CHECK_FALSE(in_on_period(f, 500ms));
    CHECK(in_on_period(f, 1100ms));
    CHECK(next_packet_time(f, Time{299900us}) == 1s);

    const auto frames = generate(f, 9);
    REQUIRE_FALSE(frames.empty());
    for (const auto& fr : frames)
        CHECK(in_on_period(f, fr.enqueue_time));
    // Ten ON windows of 300 ms each.
    const double expected = 10 * 0.3 * f.rate / (8.0 * f.payload);
    CHECK(std::abs(static_cast<double>(frames.size()) - expected) <= 10.0 + 1.0);
}

TEST_CASE("sink counts each sequence number once")
{
    PacketSink sink;
    Frame f;
    f.kind = FrameKind::Data;
    f.flow_id = 4;
    f.seq = 7;
    f.payload_bytes = 512;
    f.enqueue_time = 1s;
    const auto first = sink.receive(f, 1s + 300us);
    REQUIRE(first.has_value());
    CHECK(first->delay == Time{300us});
    CHECK(first->flow_id == 4);
    CHECK(first->payload_bytes == 512);
    CHECK(sink.delivered(4, 7));
    CHECK_FALSE(sink.delivered(4, 6));
    CHECK_FALSE(sink.receive(f, 1s + 900us).has_value());
    CHECK(sink.duplicates() == 1);
    f.seq = 8;
    CHECK(sink.receive(f, 2s).has_value());
}
