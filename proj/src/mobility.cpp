#include "uavsim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace uavsim {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

/// Signed shortest angular difference target - from, in (-pi, pi].
double angle_diff(double target, double from)
{
    double d = std::fmod(target - from, kTwoPi);
    if (d > M_PI)
        d -= kTwoPi;
    else if (d <= -M_PI)
        d += kTwoPi;
    return d;
}

Vec3 velocity_from(double speed, double direction, double pitch)
{
    const double horizontal = speed * std::cos(pitch);
    return Vec3{horizontal * std::cos(direction), horizontal * std::sin(direction),
                speed * std::sin(pitch)};
}

Vec3 advance(const Vec3& p, const Vec3& v, double seconds)
{
    return Vec3{p.x + v.x * seconds, p.y + v.y * seconds, p.z + v.z * seconds};
}

/// Sets velocity for [segment_start, segment_start + dt], reflecting off the faces it would cross.
void orient_gauss_markov(MobilityState& s, Time dt)
{
    const double secs = to_seconds(dt);
    const Box& b = s.bounds;
    Vec3 v = velocity_from(s.speed, s.direction, s.pitch);
    Vec3 end = advance(s.position, v, secs);

    const bool out_x = end.x < b.x_min || end.x > b.x_max;
    const bool out_y = end.y < b.y_min || end.y > b.y_max;
    const bool out_z = end.z < b.z_min || end.z > b.z_max;
    if (out_x) {
        v.x = -v.x;
        s.mean_direction = wrap_two_pi(M_PI - s.mean_direction);
    }
    if (out_y) {
        v.y = -v.y;
        s.mean_direction = wrap_two_pi(-s.mean_direction);
    }
    if (out_z) {
        v.z = -v.z;
        s.mean_pitch = -s.mean_pitch;
        s.pitch = std::atan2(v.z, std::hypot(v.x, v.y));
    }
    if (out_x || out_y)
        s.direction = wrap_two_pi(std::atan2(v.y, v.x));

    if (out_x || out_y || out_z) {
        // A leg longer than the box is shortened so it ends on the face.
        end = advance(s.position, v, secs);
        const Vec3 inside = b.clamp(end);
        if (inside.x != end.x)
            v.x = (inside.x - s.position.x) / secs;
        if (inside.y != end.y)
            v.y = (inside.y - s.position.y) / secs;
        if (inside.z != end.z)
            v.z = (inside.z - s.position.z) / secs;
    }

    s.velocity = v;
    s.segment_end = s.segment_start + dt;
}

/// Time in seconds until a ray from `p` along horizontal velocity `v` leaves the 2-D box.
double time_to_boundary(const Vec3& p, const Vec3& v, const Box& b)
{
    double t = std::numeric_limits<double>::infinity();
    if (v.x > 0.0)
        t = std::min(t, (b.x_max - p.x) / v.x);
    else if (v.x < 0.0)
        t = std::min(t, (b.x_min - p.x) / v.x);
    if (v.y > 0.0)
        t = std::min(t, (b.y_max - p.y) / v.y);
    else if (v.y < 0.0)
        t = std::min(t, (b.y_min - p.y) / v.y);
    return std::max(t, 0.0);
}

} // namespace

double wrap_two_pi(double angle)
{
    if (angle >= 0.0 && angle < kTwoPi)
        return angle;
    double w = std::fmod(angle, kTwoPi);
    if (w < 0.0)
        w += kTwoPi;
    if (w >= kTwoPi)
        w = 0.0;
    return w;
}

MobilityState make_constant_position(const Vec3& position)
{
    MobilityState s;
    s.model = MobilityModelKind::ConstantPosition;
    s.position = position;
    s.bounds = Box{position.x, position.x, position.y, position.y, position.z, position.z};
    return s;
}

MobilityState make_gauss_markov(const Vec3& position, const Box& bounds, double mean_speed,
                                double mean_direction, double mean_pitch, double alpha,
                                const NoiseStd& noise, Time start, Time dt)
{
    MobilityState s;
    s.model = MobilityModelKind::GaussMarkov;
    s.position = position;
    s.bounds = bounds;
    s.mean_speed = mean_speed;
    s.mean_direction = wrap_two_pi(mean_direction);
    s.mean_pitch = mean_pitch;
    s.speed = mean_speed;
    s.direction = s.mean_direction;
    s.pitch = mean_pitch;
    s.alpha = alpha;
    s.noise_std = noise;
    s.segment_start = start;
    orient_gauss_markov(s, dt);
    return s;
}

MobilityState make_random_direction_2d(const Vec3& position, const Box& bounds, double speed,
                                       double pause_time, Time start)
{
    MobilityState s;
    s.model = MobilityModelKind::RandomDirection2D;
    s.position = position;
    s.target = position;
    s.bounds = bounds;
    s.speed = speed;
    s.mean_speed = speed;
    s.pause_time = pause_time;
    s.pause_remaining = 0.0;
    s.paused = true;
    s.segment_start = start;
    s.segment_end = start;
    return s;
}

MobilityState gauss_markov_step(const MobilityState& s, Time dt, RngStream& rng)
{
    MobilityState n = s;
    n.position = s.bounds.clamp(advance(s.position, s.velocity, to_seconds(dt)));
    n.segment_start = s.segment_start + dt;

    const double a = s.alpha;
    const double k = std::sqrt(1.0 - a * a);
    const double xi_speed = rng.normal(0.0, s.noise_std.speed);
    const double xi_direction = rng.normal(0.0, s.noise_std.direction);
    const double xi_pitch = rng.normal(0.0, s.noise_std.pitch);

    n.speed = std::max(0.0, a * s.speed + (1.0 - a) * s.mean_speed + k * xi_speed);
    // Circular form of the same recurrence so the heading never swings the long way round.
    n.direction = wrap_two_pi(s.direction + (1.0 - a) * angle_diff(s.mean_direction, s.direction) +
                              k * xi_direction);
    n.pitch = a * s.pitch + (1.0 - a) * s.mean_pitch + k * xi_pitch;

    orient_gauss_markov(n, dt);
    return n;
}

RandomDirectionStep random_direction_2d_move(const MobilityState& s, double direction)
{
    MobilityState n = s;
    n.position = s.paused ? s.position : s.target;
    n.segment_start = s.segment_end;
    n.paused = false;
    n.pause_remaining = 0.0;
    n.direction = wrap_two_pi(direction);
    n.pitch = 0.0;
    n.speed = s.mean_speed;

    if (n.speed <= 0.0) {
        n.velocity = Vec3{};
        n.target = n.position;
        n.segment_end = kTimeMax;
        return {n, kTimeMax};
    }

    n.velocity = Vec3{n.speed * std::cos(n.direction), n.speed * std::sin(n.direction), 0.0};
    const double t_hit = time_to_boundary(n.position, n.velocity, n.bounds);
    Vec3 hit = n.bounds.clamp(advance(n.position, n.velocity, t_hit));
    // Snap the face that stops the leg exactly onto the boundary.
    const double tx = n.velocity.x > 0.0   ? (n.bounds.x_max - n.position.x) / n.velocity.x
                      : n.velocity.x < 0.0 ? (n.bounds.x_min - n.position.x) / n.velocity.x
                                           : std::numeric_limits<double>::infinity();
    if (tx <= t_hit)
        hit.x = n.velocity.x > 0.0 ? n.bounds.x_max : n.bounds.x_min;
    else
        hit.y = n.velocity.y > 0.0 ? n.bounds.y_max : n.bounds.y_min;
    n.target = hit;

    // Truncate so every instant of the leg maps inside the box.
    const Time delay{static_cast<Time::rep>(std::floor(t_hit * 1e9))};
    n.segment_end = n.segment_start + delay;
    return {n, delay};
}

RandomDirectionStep random_direction_2d_step(const MobilityState& s, RngStream& rng)
{
    if (s.paused)
        return random_direction_2d_move(s, rng.uniform(0.0, kTwoPi));

    MobilityState n = s;
    n.position = s.target;
    n.velocity = Vec3{};
    n.segment_start = s.segment_end;
    n.paused = true;
    n.pause_remaining = s.pause_time;
    const Time pause = from_seconds(s.pause_time);
    n.segment_end = n.segment_start + pause;
    return {n, pause};
}

Vec3 position_at(const MobilityState& s, Time t)
{
    if (s.model == MobilityModelKind::ConstantPosition)
        return s.position;
    if (t < s.segment_start || t > s.segment_end) {
        throw std::out_of_range("position query at " + std::to_string(t.count()) +
                                " ns outside segment [" + std::to_string(s.segment_start.count()) +
                                ", " + std::to_string(s.segment_end.count()) + "] ns");
    }
    return s.bounds.clamp(advance(s.position, s.velocity, to_seconds(t - s.segment_start)));
}

MobilityDriver::MobilityDriver(Simulator& sim, NodeId node, MobilityState initial, RngStream rng,
                               Time gm_step)
    : sim_(sim), node_(node), state_(std::move(initial)), rng_(std::move(rng)), gm_step_(gm_step)
{
}

void MobilityDriver::start()
{
    if (hook_)
        hook_(node_, state_);
    switch (state_.model) {
    case MobilityModelKind::ConstantPosition:
        return;
    case MobilityModelKind::GaussMarkov:
    case MobilityModelKind::RandomDirection2D:
        if (state_.segment_end != kTimeMax)
            sim_.schedule(state_.segment_end, EventKind::MobilityTick, node_, [this] { on_tick(); });
        return;
    }
}

void MobilityDriver::on_tick()
{
    if (state_.model == MobilityModelKind::GaussMarkov) {
        state_ = gauss_markov_step(state_, gm_step_, rng_);
    } else {
        state_ = random_direction_2d_step(state_, rng_).state;
    }
    if (hook_)
        hook_(node_, state_);
    if (state_.segment_end != kTimeMax)
        sim_.schedule(state_.segment_end, EventKind::MobilityTick, node_, [this] { on_tick(); });
}

} // namespace uavsim
