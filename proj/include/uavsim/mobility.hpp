#pragma once

#include "uavsim/engine.hpp"
#include "uavsim/scenario.hpp"
#include "uavsim/time.hpp"

#include <functional>

namespace uavsim {

struct NoiseStd {
    double speed = 0.0;     // m/s
    double direction = 0.0; // rad
    double pitch = 0.0;     // rad
};

/**
 * Kinematic state of one node. Motion is piecewise linear: `velocity` holds
 * over [segment_start, segment_end] starting from `position`.
 */
struct MobilityState {
    MobilityModelKind model = MobilityModelKind::ConstantPosition;
    Vec3 position;
    Vec3 velocity;
    Time segment_start{0};
    Time segment_end = kTimeMax;

    double speed = 0.0;
    double direction = 0.0; // [0, 2*pi)
    double pitch = 0.0;
    double mean_speed = 0.0;
    double mean_direction = 0.0;
    double mean_pitch = 0.0;
    double alpha = 1.0;
    NoiseStd noise_std;
    Box bounds;

    // RandomDirection2D only.
    double pause_time = 0.5;
    double pause_remaining = 0.0;
    bool paused = false;
    Vec3 target; // boundary point reached at segment_end while moving
};

MobilityState make_constant_position(const Vec3& position);

/// Initial Gauss-Markov state moving at the mean speed/direction/pitch for one step of `dt`.
MobilityState make_gauss_markov(const Vec3& position, const Box& bounds, double mean_speed,
                                double mean_direction, double mean_pitch, double alpha,
                                const NoiseStd& noise, Time start, Time dt);

/// Initial RandomDirection2D state: paused with no pause left, so the first step draws a heading.
MobilityState make_random_direction_2d(const Vec3& position, const Box& bounds, double speed,
                                       double pause_time, Time start);

/**
 * Advances one Gauss-Markov step. The position moves `dt` along the current
 * velocity; speed, direction and pitch are then redrawn as first-order
 * autoregressive processes around their means with weight `alpha`, and the
 * next segment is reflected off any face it would cross.
 */
MobilityState gauss_markov_step(const MobilityState& s, Time dt, RngStream& rng);

struct RandomDirectionStep {
    MobilityState state;
    Time next_event_delay;
};

/// Pause -> draw heading and travel to the boundary; boundary arrival -> pause.
RandomDirectionStep random_direction_2d_step(const MobilityState& s, RngStream& rng);

/// Starts a constant-speed leg along `direction` from the current position (segment_end).
RandomDirectionStep random_direction_2d_move(const MobilityState& s, double direction);

/// Throws std::out_of_range when `t` lies outside the current segment.
Vec3 position_at(const MobilityState& s, Time t);

/// Wraps an angle into [0, 2*pi).
double wrap_two_pi(double angle);

/**
 * Drives a node's MobilityState from engine events and answers position
 * queries for the channel.
 */
class MobilityDriver {
public:
    using UpdateHook = std::function<void(NodeId, const MobilityState&)>;

    MobilityDriver(Simulator& sim, NodeId node, MobilityState initial, RngStream rng, Time gm_step);

    /// Schedules the first update; call once before the simulation runs.
    void start();

    Vec3 position(Time t) const { return position_at(state_, t); }
    const MobilityState& state() const { return state_; }

    void set_update_hook(UpdateHook hook) { hook_ = std::move(hook); }

private:
    void on_tick();

    Simulator& sim_;
    NodeId node_;
    MobilityState state_;
    RngStream rng_;
    Time gm_step_;
    UpdateHook hook_;
};

} // namespace uavsim
