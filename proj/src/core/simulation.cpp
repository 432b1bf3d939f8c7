#include "simulation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "rng.hpp"

namespace skypuck::sim {

namespace {

constexpr double kZeroSeparationM = 1.0;  // collision proxy threshold

struct PathSegment {
    geom::EnuPosition from;
    geom::EnuPosition to;
    double length_m = 0.0;
    double duration_s = 0.0;
    double speed_mps = 0.0;
};

// Flight controller. Drones follow their 4D plan exactly (sampled by time)
// until the first maneuver directive arrives; from then on they fly the
// remaining path by integration so the conflict manager can bend speed and
// altitude without teleporting the drone back onto its old schedule.
struct SimDrone {
    const DroneSpec* spec = nullptr;
    geom::EnuPosition pos;
    geom::VelocityVector vel;

    bool path_mode = false;
    std::vector<PathSegment> segments;
    size_t seg_idx = 0;
    double seg_s = 0.0;       // meters into the segment
    double seg_t = 0.0;       // seconds into a hover segment
    double vert_offset = 0.0;
    cm::OwnshipDirectives directives;

    std::optional<proto::WifiSsidNode> wifi;
    std::optional<proto::LoRaNode> lora;
    std::optional<proto::AdsBNode> adsb;
    RngStream node_rng;

    std::optional<cm::ConflictManager> manager;

    void build_segments() {
        const auto& wps = spec->plan.waypoints;
        for (size_t i = 0; i + 1 < wps.size(); ++i) {
            PathSegment s;
            s.from = wps[i].position;
            s.to = wps[i + 1].position;
            s.length_m = geom::range_3d(s.from, s.to);
            s.duration_s = wps[i + 1].time - wps[i].time;
            s.speed_mps = s.length_m / s.duration_s;
            segments.push_back(s);
        }
    }

    void enter_path_mode(double now) {
        if (path_mode) return;
        path_mode = true;
        // Locate the along-path state matching the current schedule position.
        const auto& wps = spec->plan.waypoints;
        seg_idx = 0;
        seg_s = 0.0;
        seg_t = 0.0;
        if (now <= spec->plan.start_time()) return;
        if (now >= spec->plan.end_time()) {
            seg_idx = segments.size();
            return;
        }
        double t = spec->plan.start_time();
        for (size_t i = 0; i < segments.size(); ++i) {
            if (now < wps[i + 1].time) {
                seg_idx = i;
                const double f = (now - wps[i].time) / segments[i].duration_s;
                seg_s = f * segments[i].length_m;
                seg_t = now - wps[i].time;
                return;
            }
            t = wps[i + 1].time;
        }
        (void)t;
        seg_idx = segments.size();
    }

    geom::EnuPosition path_nominal() const {
        if (seg_idx >= segments.size()) {
            return spec->plan.waypoints.back().position;
        }
        const auto& s = segments[seg_idx];
        if (s.length_m == 0.0) return s.from;
        const double f = seg_s / s.length_m;
        return {s.from.east + f * (s.to.east - s.from.east),
                s.from.north + f * (s.to.north - s.from.north),
                s.from.up + f * (s.to.up - s.from.up)};
    }

    void advance(double now, double dt, double climb_rate) {
        const geom::EnuPosition prev = pos;
        if (!path_mode) {
            if (now <= spec->plan.start_time()) {
                pos = spec->plan.waypoints.front().position;
            } else if (now >= spec->plan.end_time()) {
                pos = spec->plan.waypoints.back().position;
            } else {
                pos = geom::sample_plan(spec->plan, now).first;
            }
        } else {
            if (seg_idx < segments.size()) {
                auto& s = segments[seg_idx];
                if (s.length_m == 0.0) {
                    seg_t += dt;
                    if (seg_t >= s.duration_s) {
                        ++seg_idx;
                        seg_s = 0.0;
                        seg_t = 0.0;
                    }
                } else {
                    seg_s += s.speed_mps * directives.speed_factor * dt;
                    if (seg_s >= s.length_m) {
                        ++seg_idx;
                        seg_s = 0.0;
                        seg_t = 0.0;
                    }
                }
            }
            // vertical command: evade overrides the offset ramp
            if (directives.evade_direction != 0) {
                vert_offset += directives.evade_direction * directives.evade_rate_mps * dt;
            } else {
                const double want = directives.altitude_offset_m - vert_offset;
                const double step = std::clamp(want, -climb_rate * dt, climb_rate * dt);
                vert_offset += step;
            }
            pos = path_nominal();
            pos.up = std::max(0.0, pos.up + vert_offset);
        }
        vel = {(pos.east - prev.east) / dt, (pos.north - prev.north) / dt,
               (pos.up - prev.up) / dt};
    }
};

struct PendingTx {
    uint64_t serial = 0;
    size_t tx_index = 0;
    ProtocolKind protocol = ProtocolKind::none;
    proto::Transmission tx;
    wire::PositionBeacon beacon;
    wire::SsidFrame frame{};  // wifi only
    std::vector<double> distance_to;  // by drone index, at transmission time
};

int protocol_family(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::wifi_ssid: return 1;
        case ProtocolKind::lora: return 2;
        case ProtocolKind::adsb:
        case ProtocolKind::rp_adsb: return 3;
        default: return 0;
    }
}

}  // namespace

RunResult run(const Scenario& scenario) {
    auto violations = validate(scenario);
    if (!violations.empty()) {
        throw ScenarioInvalid(std::move(violations));
    }

    RunResult result;
    result.scenario_digest = scenario.digest;
    result.seed = scenario.seed;
    result.duration_s = scenario.duration_s;
    result.delays = DelayMetrics(scenario.bin_edges_m);

    std::vector<SimDrone> drones(scenario.drones.size());
    for (size_t i = 0; i < drones.size(); ++i) {
        auto& d = drones[i];
        d.spec = &scenario.drones[i];
        d.build_segments();
        d.pos = d.spec->plan.waypoints.front().position;
        d.node_rng = RngStream(derive_seed(scenario.seed, "node", d.spec->id));
        switch (d.spec->protocol) {
            case ProtocolKind::wifi_ssid:
                d.wifi.emplace(d.spec->wifi);
                break;
            case ProtocolKind::lora: {
                d.lora.emplace(d.spec->lora);
                // Stagger free-running duty cycles so two nodes stepped from
                // t = 0 do not transmit in permanent lockstep (half-duplex
                // peers would then never hear each other).
                const double offset = d.spec->tx_offset_s
                                          ? *d.spec->tx_offset_s
                                          : d.node_rng.uniform(0.0, d.spec->lora.min_interval_s);
                d.lora->set_start_offset(offset);
                break;
            }
            case ProtocolKind::adsb:
            case ProtocolKind::rp_adsb:
                d.adsb.emplace(d.spec->adsb);
                break;
            case ProtocolKind::none:
                break;
        }
        if (scenario.cm_enabled && d.spec->managed) {
            cm::ConflictManager::Config cfg;
            cfg.ownship_id = d.spec->id;
            cfg.preset = scenario.preset;
            cfg.horizon_s = scenario.horizon_s();
            cfg.detect_step_s = 0.1;
            cfg.climb_rate_mps = geom::kDefaultClimbRate;
            cfg.staleness_limit_s = scenario.staleness_for(d.spec->protocol);
            d.manager.emplace(cfg);
        }
    }

    std::map<std::pair<uint32_t, uint32_t>, RngStream> link_rng;
    auto link_stream = [&](uint32_t tx, uint32_t rx) -> RngStream& {
        auto it = link_rng.find({tx, rx});
        if (it == link_rng.end()) {
            it = link_rng.emplace(std::pair{tx, rx},
                                  RngStream(derive_seed(scenario.seed, "link", tx, rx)))
                     .first;
        }
        return it->second;
    };

    std::map<std::pair<uint32_t, uint32_t>, double> last_rx_time;

    struct EpisodeState {
        bool open = false;
        double start = 0.0;
        int max_level = 0;
    };
    std::map<std::pair<uint32_t, uint32_t>, EpisodeState> episodes;

    std::deque<PendingTx> pending;
    uint64_t next_serial = 1;

    const double dt = scenario.timestep_s;
    const auto total_ticks = static_cast<int64_t>(std::llround(scenario.duration_s / dt));
    const auto control_every =
        std::max<int64_t>(1, static_cast<int64_t>(std::llround(scenario.control_tick_s / dt)));

    auto make_beacon = [&](const SimDrone& d, const proto::Transmission& tx) {
        wire::PositionBeacon b;
        b.drone_id = d.spec->id;
        b.position = d.pos;
        b.sequence = tx.sequence;
        b.timestamp = tx.start_s;
        return b;
    };

    for (int64_t k = 0; k <= total_ticks; ++k) {
        const double t = static_cast<double>(k) * dt;

        // 1. kinematics
        for (auto& d : drones) {
            d.advance(t, dt, geom::kDefaultClimbRate);
        }

        // 2. protocol stepping and emissions
        for (size_t i = 0; i < drones.size(); ++i) {
            auto& d = drones[i];
            std::vector<proto::Transmission> txs;
            if (d.wifi) {
                txs = d.wifi->step(t, d.node_rng);
            } else if (d.lora) {
                if (auto tx = d.lora->step(t)) txs.push_back(*tx);
            } else if (d.adsb) {
                if (auto tx = d.adsb->step(t)) txs.push_back(*tx);
            }
            for (auto& tx : txs) {
                tx.tx_id = d.spec->id;
                PendingTx p;
                p.serial = next_serial++;
                p.tx_index = i;
                p.protocol = d.spec->protocol;
                p.tx = tx;
                p.beacon = make_beacon(d, tx);
                if (d.spec->protocol == ProtocolKind::wifi_ssid) {
                    p.frame = wire::encode_ssid(p.beacon);
                } else {
                    // other carriers deliver the same quantized payload
                    p.beacon.position = wire::quantize_position(p.beacon.position);
                }
                p.distance_to.resize(drones.size(), 0.0);
                for (size_t jx = 0; jx < drones.size(); ++jx) {
                    if (jx == i) continue;
                    p.distance_to[jx] = geom::range_3d(d.pos, drones[jx].pos);
                }
                pending.push_back(std::move(p));
                ++result.transmissions;
            }
        }

        // 3. deliveries at end of airtime
        for (auto it = pending.begin(); it != pending.end();) {
            if (it->tx.end_s() > t) {
                ++it;
                continue;
            }
            const auto& p = *it;
            const auto& profile = scenario.radio_for(p.protocol);
            for (size_t jx = 0; jx < drones.size(); ++jx) {
                if (jx == p.tx_index) continue;
                auto& rx = drones[jx];
                if (protocol_family(rx.spec->protocol) != protocol_family(p.protocol)) continue;

                bool eligible = false;
                if (rx.wifi) {
                    eligible = rx.wifi->can_receive(p.tx.channel, p.tx.start_s, p.tx.end_s());
                } else if (rx.lora) {
                    eligible = !rx.lora->busy(p.tx.start_s, p.tx.end_s());
                } else if (rx.adsb) {
                    eligible = true;
                }
                if (!eligible) continue;

                const double distance = p.distance_to[jx];
                if (distance <= 0.0) continue;
                auto& stream = link_stream(p.tx.tx_id, rx.spec->id);
                double rssi_dbm = profile.budget.tx_power_dbm + p.tx.power_offset_db +
                                  profile.budget.antenna_gain_db -
                                  radio::path_loss_db(profile.pathloss, distance);
                if (profile.pathloss.shadowing_sigma_db > 0.0) {
                    rssi_dbm -= stream.normal(0.0, profile.pathloss.shadowing_sigma_db);
                }
                const bool received = radio::reception_success(rssi_dbm, profile.budget);
                result.rssi_trace.push_back(
                    {p.tx.start_s, p.tx.tx_id, rx.spec->id, distance, rssi_dbm, received});
                if (!received) continue;

                ++result.receptions;
                wire::PositionBeacon beacon = p.beacon;
                if (p.protocol == ProtocolKind::wifi_ssid) {
                    if (wire::decode_ssid(p.frame, beacon) != wire::SsidError::ok) continue;
                }
                const auto key = std::pair{p.tx.tx_id, rx.spec->id};
                if (auto last = last_rx_time.find(key); last != last_rx_time.end()) {
                    result.delays.record(p.tx.tx_id, rx.spec->id, distance, t - last->second);
                }
                last_rx_time[key] = t;
                if (rx.manager) {
                    rx.manager->ingest_beacon(beacon, t);
                }
            }
            it = pending.erase(it);
        }

        // 4. separation loop on the control tick
        if (scenario.cm_enabled && k % control_every == 0) {
            for (auto& d : drones) {
                if (!d.manager) continue;
                const auto directives = d.manager->step(t, d.pos, d.vel);
                const bool active = directives.altitude_offset_m != 0.0 ||
                                    directives.speed_factor != 1.0 ||
                                    directives.evade_direction != 0;
                if (active) d.enter_path_mode(t);
                if (d.path_mode) d.directives = directives;
            }
        }

        // 5. ground-truth safety sampling
        for (size_t i = 0; i < drones.size(); ++i) {
            for (size_t jx = i + 1; jx < drones.size(); ++jx) {
                const auto& a = drones[i];
                const auto& b = drones[jx];
                int level = 0;
                if (geom::puck_violation(a.pos, b.pos, scenario.preset.well_clear)) {
                    level = 1;
                    if (geom::puck_violation(a.pos, b.pos, scenario.preset.collision)) {
                        level = 2;
                        if (geom::puck_violation(a.pos, b.pos,
                                                 {kZeroSeparationM, kZeroSeparationM})) {
                            level = 3;
                        }
                    }
                }
                const auto key = std::pair{std::min(a.spec->id, b.spec->id),
                                           std::max(a.spec->id, b.spec->id)};
                auto& ep = episodes[key];
                if (level > 0) {
                    if (!ep.open) {
                        ep.open = true;
                        ep.start = t;
                        ep.max_level = level;
                    } else {
                        ep.max_level = std::max(ep.max_level, level);
                    }
                } else if (ep.open) {
                    result.safety.episodes.push_back(
                        {key.first, key.second, ep.start, t, ep.max_level});
                    ep = EpisodeState{};
                }
            }
        }
    }

    for (auto& [key, ep] : episodes) {
        if (ep.open) {
            result.safety.episodes.push_back(
                {key.first, key.second, ep.start, scenario.duration_s, ep.max_level});
        }
    }

    for (auto& d : drones) {
        if (!d.manager) continue;
        result.stale_exclusions += d.manager->stale_exclusions();
        result.retriggers += d.manager->retrigger_count();
        const auto& evs = d.manager->events();
        result.events.insert(result.events.end(), evs.begin(), evs.end());
    }
    std::stable_sort(result.events.begin(), result.events.end(),
                     [](const cm::LoopEvent& a, const cm::LoopEvent& b) {
                         return a.time_s < b.time_s;
                     });

    // Path-loss regression over the received trace when the run is a
    // single-protocol measurement (two distinct distances required).
    ProtocolKind fit_kind = ProtocolKind::none;
    bool uniform_protocol = true;
    for (const auto& d : scenario.drones) {
        if (d.protocol == ProtocolKind::none) continue;
        if (fit_kind == ProtocolKind::none) {
            fit_kind = d.protocol;
        } else if (protocol_family(d.protocol) != protocol_family(fit_kind)) {
            uniform_protocol = false;
        }
    }
    if (uniform_protocol && fit_kind != ProtocolKind::none) {
        std::vector<radio::RssiSample> samples;
        for (const auto& r : result.rssi_trace) {
            if (r.received) samples.push_back({r.distance_m, r.rssi_dbm});
        }
        if (samples.size() >= 2) {
            try {
                result.fitted = radio::fit_path_loss(samples, scenario.radio_for(fit_kind).budget,
                                                     scenario.radio_for(fit_kind).pathloss.d0_m);
            } catch (const radio::SingularFitError&) {
                // static geometry: nothing to regress against
            }
        }
    }
    return result;
}

std::pair<RunResult, radio::PathLossModel> measure_flight(const Scenario& scenario) {
    int with_radio = 0;
    for (const auto& d : scenario.drones) {
        if (d.protocol != ProtocolKind::none) ++with_radio;
    }
    if (with_radio != 2) {
        throw std::invalid_argument("measure_flight: scenario must carry exactly two nodes");
    }
    RunResult result = run(scenario);
    std::vector<radio::RssiSample> samples;
    for (const auto& r : result.rssi_trace) {
        if (r.received) samples.push_back({r.distance_m, r.rssi_dbm});
    }
    ProtocolKind kind = scenario.drones.front().protocol != ProtocolKind::none
                            ? scenario.drones.front().protocol
                            : scenario.drones.back().protocol;
    const auto model = radio::fit_path_loss(samples, scenario.radio_for(kind).budget,
                                            scenario.radio_for(kind).pathloss.d0_m);
    result.fitted = model;
    return {std::move(result), model};
}

}  // namespace skypuck::sim
