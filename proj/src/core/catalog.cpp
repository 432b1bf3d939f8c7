#include "catalog.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace skypuck::proto {

const char* to_string(LinkMode mode) {
    return mode == LinkMode::broadcast ? "broadcast" : "ground_infrastructure";
}

const std::vector<TechnologyProfile>& builtin_catalog() {
    static const std::vector<TechnologyProfile> catalog = {
        {"Bluetooth", LinkMode::broadcast, 100.0, 0.025, std::nullopt},
        {"Bluetooth Low Energy", LinkMode::broadcast, 50.0, 0.025, std::nullopt},
        {"ZigBee", LinkMode::broadcast, 100.0, 0.025, std::nullopt},
        {"ANT", LinkMode::broadcast, 30.0, 0.025, std::nullopt},
        {"APRS", LinkMode::broadcast, 20000.0, 5.0, std::pair{11.0, 33.0}},
        {"ADS-B", LinkMode::broadcast, 370000.0, 0.5, std::nullopt},
        {"RP ADS-B", LinkMode::broadcast, 1200.0, 0.5, std::pair{2.0, 3.0}},
        {"Wi-Fi SSID", LinkMode::broadcast, 800.0, 0.060, std::pair{0.1, 0.8}},
        {"LoRa", LinkMode::broadcast, 15000.0, 5.16, std::pair{5.16, 30.0}},
        {"Wi-Fi", LinkMode::ground_infrastructure, 500.0, std::nullopt, std::nullopt},
        {"LTE", LinkMode::ground_infrastructure, 1000.0, std::nullopt, std::nullopt},
        {"ADS-B", LinkMode::ground_infrastructure, 370000.0, std::nullopt, std::nullopt},
        {"LoRa", LinkMode::ground_infrastructure, 15000.0, std::nullopt, std::nullopt},
    };
    return catalog;
}

std::vector<TechnologyProfile> load_catalog_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_catalog_csv: cannot open " + path);
    }
    std::vector<TechnologyProfile> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (header) {  // first non-comment line is the column header
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string name, mode, range, min_up, lo, hi;
        std::getline(ss, name, ',');
        std::getline(ss, mode, ',');
        std::getline(ss, range, ',');
        std::getline(ss, min_up, ',');
        std::getline(ss, lo, ',');
        std::getline(ss, hi, ',');
        TechnologyProfile p;
        p.name = name;
        if (mode == "broadcast") {
            p.mode = LinkMode::broadcast;
        } else if (mode == "ground_infrastructure") {
            p.mode = LinkMode::ground_infrastructure;
        } else {
            throw std::runtime_error("load_catalog_csv: unknown mode '" + mode + "'");
        }
        p.range_m = std::stod(range);
        if (!min_up.empty()) p.min_update_s = std::stod(min_up);
        if (!lo.empty() && !hi.empty()) p.measured_update_s = std::pair{std::stod(lo), std::stod(hi)};
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<TechnologyProfile> suitable_technologies(
    geom::CmLayer layer, const geom::EnvironmentPreset& preset,
    const std::vector<TechnologyProfile>& catalog) {
    if (layer == geom::CmLayer::no_conflict) {
        throw std::invalid_argument("suitable_technologies: no_conflict has no needs");
    }
    std::vector<TechnologyProfile> out;
    if (layer == geom::CmLayer::strategic_deconfliction) {
        for (const auto& p : catalog) {
            if (p.mode == LinkMode::ground_infrastructure) out.push_back(p);
        }
        return out;
    }
    // Worst-case crossing time of the well-clear cylinder for a head-on pair
    // at the fastest surveyed UAV speed.
    const double update_bound_s = preset.well_clear.d_h / (2.0 * geom::kMaxUavSpeed);
    for (const auto& p : catalog) {
        if (p.mode != LinkMode::broadcast) continue;
        if (p.range_m < preset.well_clear.d_h) continue;
        double worst_update = p.min_update_s.value_or(0.0);
        if (p.measured_update_s) worst_update = p.measured_update_s->second;
        if (worst_update <= update_bound_s) out.push_back(p);
    }
    return out;
}

}  // namespace skypuck::proto
