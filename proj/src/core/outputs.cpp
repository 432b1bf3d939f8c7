#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "simulation.hpp"

namespace skypuck::sim {

namespace {

// Shortest round-trip formatting: locale-free and stable across runs.
std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

}  // namespace

std::string rssi_csv(const std::vector<RssiRecord>& trace) {
    std::ostringstream os;
    os << "time_s,tx_id,rx_id,distance_m,rssi_dbm,received\n";
    for (const auto& r : trace) {
        os << fmt(r.time_s) << ',' << r.tx_id << ',' << r.rx_id << ',' << fmt(r.distance_m) << ','
           << fmt(r.rssi_dbm) << ',' << (r.received ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string delays_csv(const DelayMetrics& delays) {
    std::ostringstream os;
    os << "pair,bin_low_m,bin_high_m,n,mean_delay_s,p95_delay_s\n";
    for (const auto& [tx, rx] : delays.pairs()) {
        for (const auto& b : delays.stats(tx, rx)) {
            os << tx << "->" << rx << ',' << fmt(b.lo_m) << ',' << fmt(b.hi_m) << ',' << b.n << ','
               << (b.mean_s ? fmt(*b.mean_s) : "nan") << ',' << (b.p95_s ? fmt(*b.p95_s) : "nan")
               << '\n';
        }
    }
    return os.str();
}

std::string events_csv(const std::vector<cm::LoopEvent>& events) {
    std::ostringstream os;
    os << "time_s,event_type,drone_a,drone_b,layer,detail\n";
    for (const auto& e : events) {
        os << fmt(e.time_s) << ',' << e.type << ',' << e.drone_a << ',' << e.drone_b << ','
           << geom::to_string(e.layer) << ',' << e.detail << '\n';
    }
    return os.str();
}

std::string summary_json(const RunResult& result, const Scenario& scenario) {
    nlohmann::json j;
    j["scenario_digest"] = result.scenario_digest;
    j["seed"] = result.seed;
    j["duration_s"] = result.duration_s;
    j["preset"] = scenario.preset.name;
    j["drones"] = scenario.drones.size();
    j["transmissions"] = result.transmissions;
    j["receptions"] = result.receptions;
    j["stale_track_exclusions"] = result.stale_exclusions;
    j["monitor_retriggers"] = result.retriggers;

    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : result.delays.pooled_stats()) {
        nlohmann::json bj;
        bj["bin_low_m"] = b.lo_m;
        bj["bin_high_m"] = b.hi_m;
        bj["n"] = b.n;
        if (b.mean_s) bj["mean_delay_s"] = *b.mean_s;
        if (b.p95_s) bj["p95_delay_s"] = *b.p95_s;
        bins.push_back(bj);
    }
    j["delay_bins"] = bins;

    j["safety"]["well_clear_violations"] = result.safety.well_clear_violations();
    j["safety"]["collision_violations"] = result.safety.collision_violations();
    j["safety"]["zero_separation_events"] = result.safety.zero_separation_events();
    nlohmann::json eps = nlohmann::json::array();
    for (const auto& e : result.safety.episodes) {
        eps.push_back({{"drone_a", e.drone_a},
                       {"drone_b", e.drone_b},
                       {"start_s", e.start_s},
                       {"end_s", e.end_s},
                       {"max_level", e.max_level}});
    }
    j["safety"]["episodes"] = eps;

    if (result.fitted) {
        j["fit"]["pl0_db"] = result.fitted->pl0_db;
        j["fit"]["exponent"] = result.fitted->exponent;
        j["fit"]["sigma_db"] = result.fitted->shadowing_sigma_db;
    } else {
        j["fit"] = nullptr;
    }
    j["events"] = result.events.size();
    return j.dump(2) + "\n";
}

std::string write_outputs(const RunResult& result, const Scenario& scenario,
                          const std::string& dir, const OutputPaths& paths) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string summary = summary_json(result, scenario);
    write_file(fs::path(dir) / paths.rssi_csv, rssi_csv(result.rssi_trace));
    write_file(fs::path(dir) / paths.delays_csv, delays_csv(result.delays));
    write_file(fs::path(dir) / paths.events_csv, events_csv(result.events));
    write_file(fs::path(dir) / paths.summary_json, summary);
    return summary;
}

}  // namespace skypuck::sim
