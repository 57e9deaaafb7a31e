#include "uavsim/mobility.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace uavsim;
using namespace std::chrono_literals;

namespace {

const Box kHuge{-1e12, 1e12, -1e12, 1e12, -1e12, 1e12};
const Box kArena{0, 400, 0, 400, 20, 50};

bool inside(const Box& b, const Vec3& p, double eps = 0.0)
{
    return p.x >= b.x_min - eps && p.x <= b.x_max + eps && p.y >= b.y_min - eps && p.y <= b.y_max + eps &&
           p.z >= b.z_min - eps && p.z <= b.z_max + eps;
}

} // namespace

TEST_CASE("alpha = 1 keeps speed and direction exactly")
{
    RngStream rng(3, "mobility/uav");
    auto s = make_gauss_markov({0, 0, 0}, kHuge, 20.0, 1.0, 0.05, 1.0, NoiseStd{5.0, 0.5, 0.1}, Time{0}, 1s);
    s.speed = 17.25;
    s.direction = 2.5;
    const double pitch = s.pitch;
    for (int i = 0; i < 1000; ++i) {
        s = gauss_markov_step(s, 1s, rng);
        REQUIRE(s.speed == 17.25);
        REQUIRE(s.direction == 2.5);
        REQUIRE(s.pitch == pitch);
    }
}

TEST_CASE("alpha = 0 without noise snaps to the means")
{
    RngStream rng(3, "mobility/uav");
    auto s = make_gauss_markov({0, 0, 0}, kHuge, 50.0, 0.7, 0.0, 0.0, NoiseStd{0, 0, 0}, Time{0}, 1s);
    s.speed = 3.0;
    s.direction = 5.9;
    s.pitch = 0.3;
    s = gauss_markov_step(s, 1s, rng);
    CHECK(s.speed == 50.0);
    CHECK(s.direction == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(s.pitch == 0.0);
}

TEST_CASE("Gauss-Markov speed is stationary around its mean")
{
    RngStream rng(11, "mobility/uav");
    const double alpha = 0.5;
    const double sigma = 5.0;
    auto s = make_gauss_markov({0, 0, 0}, kHuge, 50.0, 0.0, 0.0, alpha, NoiseStd{sigma, 0.2, 0.0}, Time{0}, 1s);
    constexpr int kSteps = 100000;
    double sum = 0.0;
    for (int i = 0; i < kSteps; ++i) {
        s = gauss_markov_step(s, 1s, rng);
        sum += s.speed;
    }
    const double mean = sum / kSteps;
    // Variance of the AR(1) sample mean is sigma^2 (1+alpha)/(1-alpha) / N.
    const double bound = 3.0 * sigma / std::sqrt(double(kSteps)) * std::sqrt((1 + alpha) / (1 - alpha));
    CHECK(std::abs(mean - 50.0) < bound);
}

TEST_CASE("position advances along the pre-step velocity")
{
    RngStream rng(5, "mobility/uav");
    auto s = make_gauss_markov({100, 100, 30}, kHuge, 10.0, 0.0, 0.0, 0.3, NoiseStd{2, 0.5, 0.05}, Time{0}, 1s);
    const Vec3 v = s.velocity;
    const auto n = gauss_markov_step(s, 1s, rng);
    CHECK(n.position.x == doctest::Approx(100 + v.x));
    CHECK(n.position.y == doctest::Approx(100 + v.y));
    CHECK(n.position.z == doctest::Approx(30 + v.z));
    CHECK(n.segment_start == Time{1s});
    CHECK(n.segment_end == Time{2s});
}

TEST_CASE("position_at examples")
{
    const auto c = make_constant_position({10, 20, 0});
    CHECK(position_at(c, Time{0}) == Vec3{10, 20, 0});
    CHECK(position_at(c, Time{123s}) == Vec3{10, 20, 0});

    auto s = make_gauss_markov({0, 0, 30}, kHuge, 50.0, 0.0, 0.0, 1.0, NoiseStd{}, Time{0}, 1s);
    const Vec3 p = position_at(s, 100ms);
    CHECK(p.x == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK(p.z == 30.0);
    CHECK_THROWS_AS(position_at(s, 2s), std::out_of_range);
}

TEST_CASE("position_at matches dense 1 ms stepping")
{
    RngStream rng(9, "mobility/uav");
    auto s = make_gauss_markov({200, 200, 35}, kArena, 50.0, 1.1, 0.0, 0.85, NoiseStd{5, 0.2, 0.02}, Time{0}, 1s);
    for (int seg = 0; seg < 30; ++seg) {
        Vec3 dense = s.position;
        double max_err = 0.0;
        for (int k = 1; k <= 1000; ++k) {
            dense = Vec3{dense.x + s.velocity.x * 1e-3, dense.y + s.velocity.y * 1e-3, dense.z + s.velocity.z * 1e-3};
            const Vec3 q = position_at(s, s.segment_start + k * 1ms);
            max_err = std::max(max_err, distance(q, dense));
        }
        CHECK(max_err < 1e-9);
        s = gauss_markov_step(s, 1s, rng);
    }
}

TEST_CASE("random direction leg to the boundary")
{
    auto s = make_random_direction_2d({0, 200, 35}, kArena, 50.0, 0.5, Time{0});
    const auto leg = random_direction_2d_move(s, 0.0);
    CHECK(leg.next_event_delay == Time{8s});
    CHECK(leg.state.target == Vec3{400, 200, 35});
    CHECK_FALSE(leg.state.paused);

    RngStream rng(1, "mobility/uav");
    const auto pause = random_direction_2d_step(leg.state, rng);
    CHECK(pause.state.paused);
    CHECK(pause.state.position == Vec3{400, 200, 35});
    CHECK(pause.next_event_delay == Time{500ms});
    CHECK(pause.state.pause_remaining == 0.5);
}

TEST_CASE("random direction headings are uniform")
{
    RngStream rng(21, "mobility/uav");
    auto s = make_random_direction_2d({200, 200, 35}, kArena, 50.0, 0.5, Time{0});
    std::array<int, 16> sectors{};
    constexpr int kDraws = 10000;
    for (int i = 0; i < kDraws; ++i) {
        const auto leg = random_direction_2d_step(s, rng);
        REQUIRE(leg.state.direction >= 0.0);
        REQUIRE(leg.state.direction < 2 * M_PI);
        ++sectors[static_cast<int>(leg.state.direction / (2 * M_PI / 16))];
    }
    const double expected = kDraws / 16.0;
    double chi2 = 0.0;
    for (int c : sectors)
        chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 30.578);
}

TEST_CASE("trajectories stay inside the arena on a 1 ms grid")
{
    for (auto model : {MobilityModelKind::GaussMarkov, MobilityModelKind::RandomDirection2D}) {
        for (double speed : {1.0, 50.0, 70.0, 300.0}) {
            Simulator sim;
            RngStream rng(static_cast<std::uint64_t>(speed), "mobility/uav");
            MobilityState init = model == MobilityModelKind::GaussMarkov
                                     ? make_gauss_markov({200, 200, 35}, kArena, speed, 0.3, 0.0, 0.85,
                                                         NoiseStd{0.1 * speed, 0.2, 0.02}, Time{0}, 1s)
                                     : make_random_direction_2d({200, 200, 35}, kArena, speed, 0.5, Time{0});
            MobilityDriver drv(sim, 0, init, rng, 1s);
            int outside = 0;
            int raw_outside = 0;
            drv.set_update_hook([&](NodeId, const MobilityState& st) {
                // The unclamped straight-line leg must itself stay inside.
                if (st.segment_end != kTimeMax) {
                    const double dt = to_seconds(st.segment_end - st.segment_start);
                    const Vec3 end{st.position.x + st.velocity.x * dt, st.position.y + st.velocity.y * dt,
                                   st.position.z + st.velocity.z * dt};
                    raw_outside += inside(kArena, end, 1e-6) ? 0 : 1;
                }
            });
            drv.start();
            std::function<void()> sample = [&] {
                outside += inside(kArena, drv.position(sim.now())) ? 0 : 1;
                sim.schedule_in(1ms, EventKind::Timer, 0, sample);
            };
            sim.schedule(Time{0}, EventKind::Timer, 0, sample);
            sim.run(30s);
            CHECK(outside == 0);
            CHECK(raw_outside == 0);
        }
    }
}

TEST_CASE("wrap_two_pi")
{
    CHECK(wrap_two_pi(0.0) == 0.0);
    CHECK(wrap_two_pi(-0.5) == doctest::Approx(2 * M_PI - 0.5));
    CHECK(wrap_two_pi(7.0) == doctest::Approx(7.0 - 2 * M_PI));
    CHECK(wrap_two_pi(2 * M_PI) < 2 * M_PI);
}
