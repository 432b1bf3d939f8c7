#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"

namespace skypuck::proto {

enum class LinkMode { broadcast, ground_infrastructure };

const char* to_string(LinkMode mode);

/// One row of the wireless-technology survey: advertised range and the
/// minimum / field-measured update intervals.
struct TechnologyProfile {
    std::string name;
    LinkMode mode = LinkMode::broadcast;
    double range_m = 0.0;
    std::optional<double> min_update_s;
    std::optional<std::pair<double, double>> measured_update_s;
};

/// The built-in survey catalog.
const std::vector<TechnologyProfile>& builtin_catalog();

/// Load a catalog from CSV with columns
/// name,mode,range_m,min_update_s,measured_lo_s,measured_hi_s
/// (empty cells for values the survey does not report).
std::vector<TechnologyProfile> load_catalog_csv(const std::string& path);

/// Technologies usable at a conflict-management layer in an environment.
/// Strategic deconfliction needs ground infrastructure; the tactical layers
/// need broadcasting with range >= the well-clear horizontal threshold and a
/// worst-case update interval no longer than the time a worst-case head-on
/// pair (2 x 74 m/s) needs to cross that threshold.
/// Throws std::invalid_argument for layer == no_conflict.
std::vector<TechnologyProfile> suitable_technologies(geom::CmLayer layer,
                                                     const geom::EnvironmentPreset& preset,
                                                     const std::vector<TechnologyProfile>& catalog);

}  // namespace skypuck::proto
