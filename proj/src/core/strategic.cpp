#include "strategic.hpp"

#include <algorithm>
#include <cmath>

namespace skypuck::cm {

namespace {

geom::FlightPlan amended(const geom::FlightPlan& plan, double delay_s, double offset_m) {
    geom::FlightPlan out = plan;
    out.departure_time += delay_s;
    for (auto& wp : out.waypoints) {
        wp.time += delay_s;
        wp.position.up += offset_m;
    }
    return out;
}

}  // namespace

bool plans_clear(const geom::FlightPlan& a, const geom::FlightPlan& b,
                 const geom::EnvironmentPreset& preset, double sample_dt_s) {
    const double lo = std::max(a.start_time(), b.start_time());
    const double hi = std::min(a.end_time(), b.end_time());
    if (lo > hi) return true;
    for (double t = lo; t < hi; t += sample_dt_s) {
        if (geom::puck_violation(geom::sample_plan(a, t).first, geom::sample_plan(b, t).first,
                                 preset.well_clear)) {
            return false;
        }
    }
    return !geom::puck_violation(geom::sample_plan(a, hi).first, geom::sample_plan(b, hi).first,
                                 preset.well_clear);
}

std::vector<geom::FlightPlan> strategic_deconflict(std::vector<geom::FlightPlan> plans,
                                                   const geom::EnvironmentPreset& preset,
                                                   const StrategicParams& params) {
    std::vector<size_t> order(plans.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
        if (plans[i].departure_time != plans[j].departure_time) {
            return plans[i].departure_time < plans[j].departure_time;
        }
        return plans[i].drone_id < plans[j].drone_id;
    });

    const double offset_step = preset.well_clear.d_v;
    std::vector<size_t> accepted;
    for (size_t idx : order) {
        const geom::FlightPlan& plan = plans[idx];
        bool placed = false;
        uint32_t blocking_id = plan.drone_id;
        for (double delay = 0.0; delay <= params.max_delay_s + 1e-9 && !placed;
             delay += params.delay_step_s) {
            for (double offset = 0.0; offset <= params.max_offset_m + 1e-9 && !placed;
                 offset += offset_step) {
                const geom::FlightPlan candidate = amended(plan, delay, offset);
                bool clear = true;
                for (size_t acc : accepted) {
                    if (!plans_clear(candidate, plans[acc], preset, params.sample_dt_s)) {
                        clear = false;
                        blocking_id = plans[acc].drone_id;
                        break;
                    }
                }
                if (clear) {
                    plans[idx] = candidate;
                    placed = true;
                }
            }
        }
        if (!placed) {
            throw UnresolvableConflict(std::min(plan.drone_id, blocking_id),
                                       std::max(plan.drone_id, blocking_id));
        }
        accepted.push_back(idx);
    }
    return plans;
}

}  // namespace skypuck::cm
