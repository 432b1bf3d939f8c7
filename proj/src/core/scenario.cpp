#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace skypuck::sim {

using nlohmann::json;

const char* to_string(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::none: return "none";
        case ProtocolKind::wifi_ssid: return "wifi_ssid";
        case ProtocolKind::lora: return "lora";
        case ProtocolKind::adsb: return "adsb";
        case ProtocolKind::rp_adsb: return "rp_adsb";
    }
    return "unknown";
}

std::optional<ProtocolKind> protocol_from_string(const std::string& name) {
    if (name == "none") return ProtocolKind::none;
    if (name == "wifi_ssid") return ProtocolKind::wifi_ssid;
    if (name == "lora") return ProtocolKind::lora;
    if (name == "adsb") return ProtocolKind::adsb;
    if (name == "rp_adsb") return ProtocolKind::rp_adsb;
    return std::nullopt;
}

double Scenario::staleness_for(ProtocolKind kind) const {
    if (staleness_override_s) return *staleness_override_s;
    switch (kind) {
        case ProtocolKind::wifi_ssid: return 3.0 * 0.8;
        case ProtocolKind::lora: return 3.0 * 30.0;
        case ProtocolKind::adsb:
        case ProtocolKind::rp_adsb: return 3.0 * 3.0;
        default: return 3.0 * 0.8;
    }
}

uint64_t fnv1a64(const std::string& text) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string digest_hex(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

namespace {

void merge_pathloss(radio::PathLossModel& m, const json& j) {
    if (j.contains("pl0_db")) m.pl0_db = j.at("pl0_db").get<double>();
    if (j.contains("d0_m")) m.d0_m = j.at("d0_m").get<double>();
    if (j.contains("exponent")) m.exponent = j.at("exponent").get<double>();
    if (j.contains("shadowing_sigma_db")) {
        m.shadowing_sigma_db = j.at("shadowing_sigma_db").get<double>();
    }
}

void merge_budget(radio::LinkBudget& b, const json& j) {
    if (j.contains("tx_power_dbm")) b.tx_power_dbm = j.at("tx_power_dbm").get<double>();
    if (j.contains("rx_sensitivity_dbm")) {
        b.rx_sensitivity_dbm = j.at("rx_sensitivity_dbm").get<double>();
    }
    if (j.contains("antenna_gain_db")) b.antenna_gain_db = j.at("antenna_gain_db").get<double>();
}

void merge_radio(RadioProfile& r, const json& j) {
    if (j.contains("path_loss")) merge_pathloss(r.pathloss, j.at("path_loss"));
    if (j.contains("budget")) merge_budget(r.budget, j.at("budget"));
}

void merge_wifi(proto::WifiConfig& c, const json& j) {
    if (j.contains("scan_channel")) c.scan_channel = j.at("scan_channel").get<int>();
    if (j.contains("channels")) c.channels = j.at("channels").get<std::vector<int>>();
    if (j.contains("state_min_s")) c.state_min_s = j.at("state_min_s").get<double>();
    if (j.contains("state_max_s")) c.state_max_s = j.at("state_max_s").get<double>();
    if (j.contains("dwell_s")) c.dwell_s = j.at("dwell_s").get<double>();
    if (j.contains("airtime_s")) c.airtime_s = j.at("airtime_s").get<double>();
}

void merge_lora(proto::LoRaConfig& c, const json& j) {
    if (j.contains("spreading_factor")) c.spreading_factor = j.at("spreading_factor").get<int>();
    if (j.contains("min_interval_s")) c.min_interval_s = j.at("min_interval_s").get<double>();
    if (j.contains("airtime_s")) c.airtime_s = j.at("airtime_s").get<double>();
}

void merge_adsb(proto::AdsBConfig& c, const json& j) {
    if (j.contains("period_s")) c.period_s = j.at("period_s").get<double>();
    if (j.contains("power_offset_db")) c.power_offset_db = j.at("power_offset_db").get<double>();
}

geom::EnvironmentPreset parse_preset(const json& j) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "suburban" || name == "Suburban") return geom::EnvironmentPreset::suburban();
        if (name == "urban" || name == "Urban") return geom::EnvironmentPreset::urban();
        throw ScenarioError("unknown preset '" + name + "'");
    }
    geom::EnvironmentPreset p;
    p.name = j.at("name").get<std::string>();
    p.well_clear = {j.at("well_clear").at("d_h").get<double>(),
                    j.at("well_clear").at("d_v").get<double>()};
    p.collision = {j.at("collision").at("d_h").get<double>(),
                   j.at("collision").at("d_v").get<double>()};
    return p;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario parse failed: ") + e.what());
    }
    Scenario sc;
    sc.digest = digest_hex(text);
    try {
        if (j.contains("preset")) sc.preset = parse_preset(j.at("preset"));
        if (j.contains("sim")) {
            const auto& s = j.at("sim");
            if (s.contains("timestep_s")) sc.timestep_s = s.at("timestep_s").get<double>();
            if (s.contains("duration_s")) sc.duration_s = s.at("duration_s").get<double>();
            if (s.contains("control_tick_s")) {
                sc.control_tick_s = s.at("control_tick_s").get<double>();
            }
            if (s.contains("seed")) sc.seed = s.at("seed").get<uint64_t>();
            if (s.contains("conflict_management")) {
                sc.cm_enabled = s.at("conflict_management").get<bool>();
            }
            if (s.contains("horizon_s")) sc.horizon_override_s = s.at("horizon_s").get<double>();
            if (s.contains("staleness_limit_s")) {
                sc.staleness_override_s = s.at("staleness_limit_s").get<double>();
            }
            if (s.contains("max_speed_mps")) sc.max_speed_mps = s.at("max_speed_mps").get<double>();
        }
        if (j.contains("metrics") && j.at("metrics").contains("bin_edges_m")) {
            sc.bin_edges_m = j.at("metrics").at("bin_edges_m").get<std::vector<double>>();
        }
        if (j.contains("radio")) {
            const auto& r = j.at("radio");
            if (r.contains("wifi_ssid")) merge_radio(sc.wifi_radio, r.at("wifi_ssid"));
            if (r.contains("lora")) merge_radio(sc.lora_radio, r.at("lora"));
            if (r.contains("adsb")) merge_radio(sc.adsb_radio, r.at("adsb"));
        }
        proto::WifiConfig wifi_defaults;
        proto::LoRaConfig lora_defaults;
        proto::AdsBConfig adsb_defaults;
        if (j.contains("protocols")) {
            const auto& p = j.at("protocols");
            if (p.contains("wifi_ssid")) merge_wifi(wifi_defaults, p.at("wifi_ssid"));
            if (p.contains("lora")) merge_lora(lora_defaults, p.at("lora"));
            if (p.contains("adsb")) merge_adsb(adsb_defaults, p.at("adsb"));
        }
        for (const auto& dj : j.value("drones", json::array())) {
            DroneSpec d;
            d.id = dj.at("id").get<uint32_t>();
            const std::string proto_name = dj.value("protocol", "wifi_ssid");
            const auto kind = protocol_from_string(proto_name);
            if (!kind) throw ScenarioError("unknown protocol '" + proto_name + "'");
            d.protocol = *kind;
            d.managed = dj.value("managed", true);
            d.wifi = wifi_defaults;
            d.lora = lora_defaults;
            d.adsb = adsb_defaults;
            if (d.protocol == ProtocolKind::rp_adsb) d.adsb.power_offset_db = -20.0;
            if (dj.contains("protocol_config")) {
                const auto& pc = dj.at("protocol_config");
                merge_wifi(d.wifi, pc);
                merge_lora(d.lora, pc);
                merge_adsb(d.adsb, pc);
                if (pc.contains("tx_offset_s")) d.tx_offset_s = pc.at("tx_offset_s").get<double>();
            }
            const auto& pj = dj.at("plan");
            d.plan.drone_id = d.id;
            d.plan.departure_time = pj.value("departure_s", 0.0);
            for (const auto& wj : pj.at("waypoints")) {
                geom::Waypoint wp;
                wp.time = wj.at("t").get<double>();
                wp.position = {wj.at("east").get<double>(), wj.at("north").get<double>(),
                               wj.at("up").get<double>()};
                d.plan.waypoints.push_back(wp);
            }
            sc.drones.push_back(std::move(d));
        }
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario field error: ") + e.what());
    }
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::vector<Violation> validate(const Scenario& sc) {
    std::vector<Violation> out;
    auto add = [&](std::string code, std::string msg) {
        out.push_back({std::move(code), std::move(msg)});
    };

    if (!(sc.duration_s > 0.0)) add("E_DURATION", "duration must be positive");
    if (!(sc.timestep_s > 0.0)) add("E_TIMESTEP", "timestep must be positive");
    if (!(sc.control_tick_s > 0.0)) add("E_CONTROL_TICK", "control tick must be positive");

    if (sc.bin_edges_m.size() < 2) {
        add("E_BINS", "need at least two bin edges");
    } else {
        for (size_t i = 1; i < sc.bin_edges_m.size(); ++i) {
            if (sc.bin_edges_m[i] <= sc.bin_edges_m[i - 1]) {
                add("E_BINS", "bin edges must be strictly increasing");
                break;
            }
        }
        if (sc.bin_edges_m.front() < 0.0) add("E_BINS", "bin edges must be non-negative");
    }

    if (!(sc.preset.well_clear.d_h > 0.0) || !(sc.preset.well_clear.d_v > 0.0) ||
        !(sc.preset.collision.d_h > 0.0) || !(sc.preset.collision.d_v > 0.0)) {
        add("E_VOLUME", "separation thresholds must be positive");
    } else if (sc.preset.well_clear.d_h < sc.preset.collision.d_h ||
               sc.preset.well_clear.d_v < sc.preset.collision.d_v) {
        add("E_VOLUME", "well-clear volume must contain the collision volume");
    }

    for (const RadioProfile* r : {&sc.wifi_radio, &sc.lora_radio, &sc.adsb_radio}) {
        if (!(r->pathloss.d0_m > 0.0) || !(r->pathloss.exponent > 0.0) ||
            r->pathloss.shadowing_sigma_db < 0.0) {
            add("E_RADIO", "path-loss model requires d0 > 0, exponent > 0, sigma >= 0");
            break;
        }
    }

    std::set<uint32_t> ids;
    for (const auto& d : sc.drones) {
        const std::string tag = "drone " + std::to_string(d.id);
        if (!ids.insert(d.id).second) add("E_DUP_ID", tag + ": duplicate drone id");
        for (const auto& problem : d.plan.validate(sc.max_speed_mps)) {
            const bool speed = problem.find("speed") != std::string::npos;
            const bool ground = problem.find("ground") != std::string::npos;
            add(speed ? "E_PLAN_SPEED" : ground ? "E_NEG_UP" : "E_PLAN", tag + ": " + problem);
        }
        // airtime intervals must be resolvable on the tick grid
        if (d.protocol == ProtocolKind::wifi_ssid && sc.timestep_s > d.wifi.airtime_s) {
            add("E_TIMESTEP", tag + ": timestep exceeds Wi-Fi beacon airtime");
        }
        if (d.protocol == ProtocolKind::lora && sc.timestep_s > d.lora.airtime_s) {
            add("E_TIMESTEP", tag + ": timestep exceeds LoRa airtime");
        }
        if (d.protocol == ProtocolKind::lora && d.lora.min_interval_s < 5.0) {
            add("E_DUTY_CYCLE", tag + ": LoRa spacing below the 5 s duty-cycle floor");
        }
        if (d.protocol == ProtocolKind::wifi_ssid) {
            bool listed = false;
            for (int ch : d.wifi.channels) listed |= ch == d.wifi.scan_channel;
            if (d.wifi.channels.empty() || !listed) {
                add("E_WIFI_CHANNELS", tag + ": scan channel must be in the channel list");
            }
            if (d.wifi.airtime_s > d.wifi.dwell_s) {
                add("E_WIFI_AIRTIME", tag + ": beacon airtime exceeds the dwell slot");
            }
        }
    }
    return out;
}

}  // namespace skypuck::sim
