#pragma once

#include <cmath>
#include <compare>
#include <stdexcept>

namespace dpqa {

/// Interaction-site coordinates on the integer grid. The physical position
/// of a site is (x, y) scaled by the site pitch in micrometers.
struct Site {
    int x = 0;
    int y = 0;

    friend bool operator==(const Site&, const Site&) = default;
    friend auto operator<=>(const Site&, const Site&) = default;
};

/// A physical position or displacement in micrometers.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline Vec2 site_position_um(Site s, double pitch_um) {
    return {static_cast<double>(s.x) * pitch_um, static_cast<double>(s.y) * pitch_um};
}

inline double distance_um(Vec2 a, Vec2 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Euclidean distance between two sites in micrometers.
inline double site_distance_um(Site a, Site b, double pitch_um) {
    const double dx = static_cast<double>(a.x - b.x);
    const double dy = static_cast<double>(a.y - b.y);
    return pitch_um * std::sqrt(dx * dx + dy * dy);
}

/// Trap-movement duration for a given travel distance. Distance and time
/// follow d / t^2 = a with a in m/s^2; the result is in microseconds.
inline double movement_time_us(double distance_um, double accel_m_per_s2) {
    if (distance_um < 0.0) {
        throw std::invalid_argument("movement_time_us: negative distance");
    }
    if (accel_m_per_s2 <= 0.0) {
        throw std::invalid_argument("movement_time_us: acceleration must be positive");
    }
    return 1000.0 * std::sqrt(distance_um / accel_m_per_s2);
}

}  // namespace dpqa
