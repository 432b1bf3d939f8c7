#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace skypuck::geom {

/// Fastest UAV considered for layer sizing (racing drones), m/s.
inline constexpr double kMaxUavSpeed = 74.0;
/// Default climb/descend rate cap used by resolution maneuvers, m/s.
inline constexpr double kDefaultClimbRate = 5.0;

/// Layer boundaries for time-based classification, seconds.
inline constexpr double kCollisionAvoidanceTtc = 30.0;
inline constexpr double kWellClearTtc = 120.0;
inline constexpr double kStrategicTtc = 86400.0;

/// Local East-North-Up position, meters. The origin is fixed per scenario;
/// flat-earth geometry (scenario extents are far below curvature scales).
struct EnuPosition {
    double east = 0.0;
    double north = 0.0;
    double up = 0.0;

    friend bool operator==(const EnuPosition&, const EnuPosition&) = default;
};

struct VelocityVector {
    double v_east = 0.0;
    double v_north = 0.0;
    double v_up = 0.0;

    double magnitude() const;

    friend bool operator==(const VelocityVector&, const VelocityVector&) = default;
};

struct Waypoint {
    EnuPosition position;
    double time = 0.0;  // seconds from simulation epoch
};

struct FlightPlan {
    uint32_t drone_id = 0;
    std::vector<Waypoint> waypoints;
    double departure_time = 0.0;

    double start_time() const { return departure_time; }
    double end_time() const { return waypoints.empty() ? departure_time : waypoints.back().time; }

    /// Structural problems with the plan, empty when valid.
    std::vector<std::string> validate(double max_speed = kMaxUavSpeed) const;
};

/// Cylindrical ("hockey puck") separation volume. d_h and d_v are the
/// horizontal and vertical miss-distance thresholds; a pair violates the
/// volume only when strictly inside in both dimensions.
struct SeparationVolume {
    double d_h = 0.0;
    double d_v = 0.0;

    friend bool operator==(const SeparationVolume&, const SeparationVolume&) = default;
};

struct EnvironmentPreset {
    std::string name;
    SeparationVolume well_clear;
    SeparationVolume collision;

    static EnvironmentPreset suburban();
    static EnvironmentPreset urban();

    friend bool operator==(const EnvironmentPreset&, const EnvironmentPreset&) = default;
};

enum class CmLayer {
    strategic_deconfliction,
    well_clear,
    collision_avoidance,
    no_conflict,
};

const char* to_string(CmLayer layer);

double horizontal_separation(const EnuPosition& a, const EnuPosition& b);
double vertical_separation(const EnuPosition& a, const EnuPosition& b);
double range_3d(const EnuPosition& a, const EnuPosition& b);

bool puck_violation(const EnuPosition& a, const EnuPosition& b, const SeparationVolume& vol);

/// Range rate under constant velocities, positive when the range is
/// decreasing. Throws std::invalid_argument for coincident positions.
double closing_speed(const EnuPosition& pa, const VelocityVector& va,
                     const EnuPosition& pb, const VelocityVector& vb);

/// range / closing_speed when closing, +infinity otherwise.
double time_to_collision(const EnuPosition& pa, const VelocityVector& va,
                         const EnuPosition& pb, const VelocityVector& vb);

/// Time-based layer classification. Boundaries are closed on the more
/// urgent side: [0, 30] s is collision avoidance, (30, 120] well-clear,
/// (120, 86400] strategic. Throws std::invalid_argument for negative ttc.
CmLayer classify_layer_time(double ttc_s);

/// Distance-based classification against the preset's nested pucks.
/// Never returns strategic_deconfliction.
CmLayer classify_layer_distance(const EnuPosition& a, const EnuPosition& b,
                                const EnvironmentPreset& preset);

/// Position and segment velocity at time t by linear interpolation.
/// Throws std::out_of_range when t is outside [departure, last waypoint].
std::pair<EnuPosition, VelocityVector> sample_plan(const FlightPlan& plan, double t);

}  // namespace skypuck::geom
