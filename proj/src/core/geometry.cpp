#include "geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace skypuck::geom {

double VelocityVector::magnitude() const {
    return std::sqrt(v_east * v_east + v_north * v_north + v_up * v_up);
}

EnvironmentPreset EnvironmentPreset::suburban() {
    // Lower bound of the published 600-1500 m / 75-90 m well-clear band.
    return {"Suburban", {600.0, 75.0}, {150.0, 30.0}};
}

EnvironmentPreset EnvironmentPreset::urban() {
    return {"Urban", {6.0, 7.3}, {3.0, 3.7}};
}

const char* to_string(CmLayer layer) {
    switch (layer) {
        case CmLayer::strategic_deconfliction: return "strategic_deconfliction";
        case CmLayer::well_clear: return "well_clear";
        case CmLayer::collision_avoidance: return "collision_avoidance";
        case CmLayer::no_conflict: return "no_conflict";
    }
    return "unknown";
}

double horizontal_separation(const EnuPosition& a, const EnuPosition& b) {
    return std::hypot(a.east - b.east, a.north - b.north);
}

double vertical_separation(const EnuPosition& a, const EnuPosition& b) {
    return std::abs(a.up - b.up);
}

double range_3d(const EnuPosition& a, const EnuPosition& b) {
    return std::hypot(a.east - b.east, a.north - b.north, a.up - b.up);
}

bool puck_violation(const EnuPosition& a, const EnuPosition& b, const SeparationVolume& vol) {
    return horizontal_separation(a, b) < vol.d_h && vertical_separation(a, b) < vol.d_v;
}

double closing_speed(const EnuPosition& pa, const VelocityVector& va,
                     const EnuPosition& pb, const VelocityVector& vb) {
    const double rx = pb.east - pa.east;
    const double ry = pb.north - pa.north;
    const double rz = pb.up - pa.up;
    const double range = std::hypot(rx, ry, rz);
    if (range == 0.0) {
        throw std::invalid_argument("closing_speed: coincident positions");
    }
    const double vx = vb.v_east - va.v_east;
    const double vy = vb.v_north - va.v_north;
    const double vz = vb.v_up - va.v_up;
    // -d|r|/dt = -(r . v_rel) / |r|
    return -(rx * vx + ry * vy + rz * vz) / range;
}

double time_to_collision(const EnuPosition& pa, const VelocityVector& va,
                         const EnuPosition& pb, const VelocityVector& vb) {
    const double closing = closing_speed(pa, va, pb, vb);
    if (closing <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return range_3d(pa, pb) / closing;
}

CmLayer classify_layer_time(double ttc_s) {
    if (std::isnan(ttc_s) || ttc_s < 0.0) {
        throw std::invalid_argument("classify_layer_time: ttc must be non-negative");
    }
    if (ttc_s <= kCollisionAvoidanceTtc) return CmLayer::collision_avoidance;
    if (ttc_s <= kWellClearTtc) return CmLayer::well_clear;
    if (ttc_s <= kStrategicTtc) return CmLayer::strategic_deconfliction;
    return CmLayer::no_conflict;
}

CmLayer classify_layer_distance(const EnuPosition& a, const EnuPosition& b,
                                const EnvironmentPreset& preset) {
    if (puck_violation(a, b, preset.collision)) return CmLayer::collision_avoidance;
    if (puck_violation(a, b, preset.well_clear)) return CmLayer::well_clear;
    return CmLayer::no_conflict;
}

std::vector<std::string> FlightPlan::validate(double max_speed) const {
    std::vector<std::string> problems;
    if (waypoints.size() < 2) {
        problems.push_back("plan needs at least 2 waypoints");
        return problems;
    }
    if (waypoints.front().time != departure_time) {
        problems.push_back("first waypoint time must equal departure time");
    }
    for (size_t i = 0; i < waypoints.size(); ++i) {
        const auto& wp = waypoints[i];
        if (!std::isfinite(wp.time) || wp.time < 0.0) {
            problems.push_back("waypoint time must be finite and non-negative");
        }
        if (wp.position.up < 0.0) {
            problems.push_back("waypoint altitude below ground (up < 0)");
        }
        if (i == 0) continue;
        const auto& prev = waypoints[i - 1];
        const double dt = wp.time - prev.time;
        if (dt <= 0.0) {
            problems.push_back("waypoint times must be strictly increasing");
            continue;
        }
        const double dist = range_3d(prev.position, wp.position);
        if (dist / dt > max_speed * (1.0 + 1e-9)) {
            problems.push_back("segment speed exceeds max speed");
        }
    }
    return problems;
}

std::pair<EnuPosition, VelocityVector> sample_plan(const FlightPlan& plan, double t) {
    if (plan.waypoints.size() < 2) {
        throw std::out_of_range("sample_plan: plan has fewer than 2 waypoints");
    }
    if (t < plan.start_time() || t > plan.end_time()) {
        throw std::out_of_range("sample_plan: t outside plan span");
    }
    // Active segment: the one whose [t0, t1) contains t; the final waypoint
    // belongs to the last segment.
    size_t seg = 0;
    while (seg + 2 < plan.waypoints.size() && t >= plan.waypoints[seg + 1].time) {
        ++seg;
    }
    const auto& a = plan.waypoints[seg];
    const auto& b = plan.waypoints[seg + 1];
    const double dt = b.time - a.time;
    const double f = (t - a.time) / dt;
    EnuPosition pos{
        a.position.east + f * (b.position.east - a.position.east),
        a.position.north + f * (b.position.north - a.position.north),
        a.position.up + f * (b.position.up - a.position.up),
    };
    VelocityVector vel{
        (b.position.east - a.position.east) / dt,
        (b.position.north - a.position.north) / dt,
        (b.position.up - a.position.up) / dt,
    };
    return {pos, vel};
}

}  // namespace skypuck::geom
