#pragma once

#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace skypuck::cm {

struct UnresolvableConflict : std::runtime_error {
    uint32_t drone_a, drone_b;
    UnresolvableConflict(uint32_t a, uint32_t b)
        : std::runtime_error("strategic deconfliction: no amendment clears plans " +
                             std::to_string(a) + " and " + std::to_string(b)),
          drone_a(a),
          drone_b(b) {}
};

struct StrategicParams {
    double sample_dt_s = 1.0;
    double max_delay_s = 3600.0;
    double max_offset_m = 120.0;
    double delay_step_s = 30.0;
};

/// True when sampling both plans over their overlapping span at `dt` never
/// violates the preset's well-clear puck.
bool plans_clear(const geom::FlightPlan& a, const geom::FlightPlan& b,
                 const geom::EnvironmentPreset& preset, double sample_dt_s);

/// Pre-departure deconfliction. Plans are processed in departure order
/// (earlier departure wins priority, ties by drone id); each later plan is
/// amended with the first departure delay / altitude offset combination that
/// clears all already-accepted plans. Throws UnresolvableConflict when the
/// amendment bounds are exhausted.
std::vector<geom::FlightPlan> strategic_deconflict(std::vector<geom::FlightPlan> plans,
                                                   const geom::EnvironmentPreset& preset,
                                                   const StrategicParams& params = {});

}  // namespace skypuck::cm
