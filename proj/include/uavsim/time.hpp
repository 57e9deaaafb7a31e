#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>

namespace uavsim {

// Virtual time is an integer count of nanoseconds; seconds only at the API surface.
using Time = std::chrono::nanoseconds;

inline constexpr Time kTimeMax = Time::max();

inline Time from_seconds(double seconds)
{
    return Time{std::llround(seconds * 1e9)};
}

constexpr double to_seconds(Time t)
{
    return static_cast<double>(t.count()) * 1e-9;
}

using NodeId = std::uint32_t;

inline constexpr NodeId kApId = 0;
inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max();

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance(const Vec3& a, const Vec3& b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Axis-aligned box; the UAV arena.
struct Box {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;

    bool contains(const Vec3& p) const
    {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max && p.z >= z_min &&
               p.z <= z_max;
    }

    Vec3 clamp(const Vec3& p) const
    {
        auto c = [](double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); };
        return {c(p.x, x_min, x_max), c(p.y, y_min, y_max), c(p.z, z_min, z_max)};
    }

    friend bool operator==(const Box&, const Box&) = default;
};

} // namespace uavsim
