#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "geometry.hpp"
#include "pathloss.hpp"
#include "protocols.hpp"

namespace skypuck::sim {

enum class ProtocolKind { none, wifi_ssid, lora, adsb, rp_adsb };

const char* to_string(ProtocolKind kind);
std::optional<ProtocolKind> protocol_from_string(const std::string& name);

struct RadioProfile {
    radio::PathLossModel pathloss;
    radio::LinkBudget budget;
};

struct DroneSpec {
    uint32_t id = 0;
    ProtocolKind protocol = ProtocolKind::wifi_ssid;
    bool managed = true;  // false models a beaconing but non-cooperative drone
    geom::FlightPlan plan;
    proto::WifiConfig wifi;
    proto::LoRaConfig lora;
    proto::AdsBConfig adsb;
    std::optional<double> tx_offset_s;  // explicit duty-cycle phase (LoRa)
};

struct Scenario {
    geom::EnvironmentPreset preset = geom::EnvironmentPreset::suburban();
    std::vector<DroneSpec> drones;

    RadioProfile wifi_radio{{40.05, 1.0, 2.4, 8.0}, {20.0, -88.0, 0.0}};
    RadioProfile lora_radio{{31.23, 1.0, 3.26, 2.2}, {14.0, -123.0, 0.0}};
    RadioProfile adsb_radio{{33.2, 1.0, 2.4, 0.0}, {46.0, -81.0, 0.0}};

    double timestep_s = 0.001;
    double duration_s = 60.0;
    double control_tick_s = 0.1;
    uint64_t seed = 1;
    bool cm_enabled = true;
    double max_speed_mps = geom::kMaxUavSpeed;
    std::vector<double> bin_edges_m{0.0, 150.0, 300.0, 450.0, 600.0, 800.0};
    std::optional<double> horizon_override_s;
    std::optional<double> staleness_override_s;

    std::string digest;  // content hash of the source text

    /// Conflict-probe horizon: the published 8 s urban sensing horizon, or
    /// the 120 s outer bound of the well-clear layer elsewhere.
    double horizon_s() const {
        if (horizon_override_s) return *horizon_override_s;
        return preset.name == "Urban" ? 8.0 : 120.0;
    }

    const RadioProfile& radio_for(ProtocolKind kind) const {
        switch (kind) {
            case ProtocolKind::lora: return lora_radio;
            case ProtocolKind::adsb:
            case ProtocolKind::rp_adsb: return adsb_radio;
            default: return wifi_radio;
        }
    }

    /// Default staleness bound: three nominal update intervals of the
    /// protocol (the surveyed worst-case measured interval where known).
    double staleness_for(ProtocolKind kind) const;
};

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Violation {
    std::string code;
    std::string message;
};

/// Parse a scenario document (JSON, // and /* */ comments allowed).
/// Throws ScenarioError on malformed input.
Scenario parse_scenario(const std::string& text);

/// Load from disk; the digest is the content hash of the file bytes.
Scenario load_scenario_file(const std::string& path);

/// All invariant breaches, machine-readable codes first. Empty iff runnable.
std::vector<Violation> validate(const Scenario& scenario);

uint64_t fnv1a64(const std::string& text);
std::string digest_hex(const std::string& text);

}  // namespace skypuck::sim
