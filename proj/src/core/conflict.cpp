#include "conflict.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace skypuck::cm {

namespace {

// Minimum sender-time spacing between the two beacons used to
// finite-difference a velocity; closer pairs would amplify the 0.1 m wire
// quantization into m/s-scale noise.
constexpr double kVelocityBaselineS = 0.2;
constexpr double kGroundProximityM = 10.0;
constexpr double kComplianceGraceS = 2.0;

geom::EnuPosition track_pos_at(const TrackEstimate& t, double at) { return t.at(at); }

bool opening(const geom::EnuPosition& pa, const geom::VelocityVector& va,
             const geom::EnuPosition& pb, const geom::VelocityVector& vb) {
    if (geom::range_3d(pa, pb) == 0.0) return false;
    return geom::closing_speed(pa, va, pb, vb) <= 0.0;
}

}  // namespace

std::string ResolutionManeuver::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::altitude_offset: os << "altitude_offset +" << value << " m"; break;
        case Kind::departure_delay: os << "departure_delay +" << value << " s"; break;
        case Kind::speed_scale: os << "speed_scale x" << value; break;
        case Kind::vertical_evade:
            os << "vertical_evade " << (evade_up ? "up" : "down") << " " << value << " m/s";
            if (halt_horizontal) os << " halt";
            break;
        case Kind::hold: os << "hold"; break;
    }
    return os.str();
}

std::vector<ConflictEvent> detect_conflicts(std::span<const TrackEstimate> tracks, double now_s,
                                            const DetectParams& params,
                                            const geom::EnvironmentPreset& preset,
                                            int* stale_excluded) {
    std::vector<const TrackEstimate*> live;
    int excluded = 0;
    for (const auto& t : tracks) {
        if (t.stale(now_s)) {
            ++excluded;
        } else {
            live.push_back(&t);
        }
    }
    if (stale_excluded) *stale_excluded = excluded;

    std::vector<ConflictEvent> events;
    const int steps = static_cast<int>(std::floor(params.horizon_s / params.step_s));
    for (size_t i = 0; i < live.size(); ++i) {
        for (size_t j = i + 1; j < live.size(); ++j) {
            const auto& a = *live[i];
            const auto& b = *live[j];
            for (int k = 0; k <= steps; ++k) {
                const double t = now_s + k * params.step_s;
                if (geom::puck_violation(track_pos_at(a, t), track_pos_at(b, t),
                                         preset.well_clear)) {
                    ConflictEvent ev;
                    ev.drone_a = std::min(a.drone_id, b.drone_id);
                    ev.drone_b = std::max(a.drone_id, b.drone_id);
                    ev.detected_at_s = now_s;
                    ev.predicted_violation_time_s = t;
                    ev.layer = geom::puck_violation(track_pos_at(a, now_s), track_pos_at(b, now_s),
                                                    preset.collision)
                                   ? geom::CmLayer::collision_avoidance
                                   : geom::CmLayer::well_clear;
                    events.push_back(ev);
                    break;
                }
            }
        }
    }
    return events;
}

namespace {

geom::EnuPosition maneuvered_position(const TrackEstimate& own, const ResolutionManeuver& m,
                                      double tau, double climb_rate) {
    geom::EnuPosition p = own.last_position;
    const auto& v = own.last_velocity;
    switch (m.kind) {
        case ResolutionManeuver::Kind::altitude_offset: {
            p.east += v.v_east * tau;
            p.north += v.v_north * tau;
            const double ramp = std::min(std::abs(m.value), climb_rate * tau);
            p.up += v.v_up * tau + (m.value >= 0.0 ? ramp : -ramp);
            break;
        }
        case ResolutionManeuver::Kind::speed_scale:
            p.east += v.v_east * m.value * tau;
            p.north += v.v_north * m.value * tau;
            p.up += v.v_up * m.value * tau;
            break;
        case ResolutionManeuver::Kind::hold:
            break;
        case ResolutionManeuver::Kind::vertical_evade: {
            if (!m.halt_horizontal) {
                p.east += v.v_east * tau;
                p.north += v.v_north * tau;
            }
            p.up += (m.evade_up ? m.value : -m.value) * tau;
            break;
        }
        case ResolutionManeuver::Kind::departure_delay:
            // strategic-only amendment; kinematically a no-op here
            p.east += v.v_east * tau;
            p.north += v.v_north * tau;
            p.up += v.v_up * tau;
            break;
    }
    if (p.up < 0.0) p.up = 0.0;
    return p;
}

}  // namespace

bool maneuver_conflict_free(const TrackEstimate& ownship, const ResolutionManeuver& m,
                            std::span<const TrackEstimate> others,
                            const geom::EnvironmentPreset& preset, const ManeuverParams& params,
                            double now_s) {
    const int steps = static_cast<int>(std::floor(params.horizon_s / params.step_s));
    for (const auto& other : others) {
        if (other.drone_id == ownship.drone_id) continue;
        double min_hsep = std::numeric_limits<double>::infinity();
        geom::EnuPosition own_at_cpa, other_at_cpa;
        geom::EnuPosition own_end, other_end;
        for (int k = 0; k <= steps; ++k) {
            const double tau = k * params.step_s;
            const geom::EnuPosition p_own =
                maneuvered_position(ownship, m, tau, params.climb_rate_mps);
            const geom::EnuPosition p_other = other.at(now_s + tau);
            if (geom::puck_violation(p_own, p_other, preset.collision)) {
                return false;  // hard floor: never dip into the CA puck
            }
            const double hsep = geom::horizontal_separation(p_own, p_other);
            if (hsep < min_hsep) {
                min_hsep = hsep;
                own_at_cpa = p_own;
                other_at_cpa = p_other;
            }
            own_end = p_own;
            other_end = p_other;
        }
        // The escape must have restored separation by the closest horizontal
        // approach and hold it at the horizon.
        if (geom::puck_violation(own_at_cpa, other_at_cpa, preset.well_clear)) return false;
        if (geom::puck_violation(own_end, other_end, preset.well_clear)) return false;
    }
    return true;
}

ResolutionManeuver formulate_solution(const ConflictEvent& event,
                                      std::span<const TrackEstimate> tracks,
                                      const geom::EnvironmentPreset& preset,
                                      const ManeuverParams& params) {
    const uint32_t assignee = event.drone_b;  // higher id = lower priority
    const TrackEstimate* own = nullptr;
    for (const auto& t : tracks) {
        if (t.drone_id == assignee) own = &t;
    }
    if (!own) {
        throw std::invalid_argument("formulate_solution: assignee track missing");
    }
    const ResolutionManeuver menu[] = {
        ResolutionManeuver::altitude_offset(preset.well_clear.d_v),
        ResolutionManeuver::speed_scale(0.5),
        ResolutionManeuver::hold(),
    };
    for (const auto& m : menu) {
        if (maneuver_conflict_free(*own, m, tracks, preset, params, event.detected_at_s)) {
            return m;
        }
    }
    throw EscalationRequired(event.drone_a, event.drone_b);
}

std::pair<ResolutionManeuver, ResolutionManeuver> collision_avoid(
    const ConflictEvent& event, std::span<const TrackEstimate> tracks) {
    const TrackEstimate* high = nullptr;
    for (const auto& t : tracks) {
        if (t.drone_id == event.drone_b) high = &t;
    }
    const double rate = geom::kDefaultClimbRate;
    const bool near_ground = high && high->last_position.up < kGroundProximityM;
    if (near_ground) {
        // No room below: both climb, the lower id also stops.
        return {ResolutionManeuver::vertical_evade(true, rate, true),
                ResolutionManeuver::vertical_evade(true, rate, false)};
    }
    return {ResolutionManeuver::vertical_evade(true, rate, false),
            ResolutionManeuver::vertical_evade(false, rate, false)};
}

void ConflictManager::log(double t, std::string type, uint32_t a, uint32_t b, geom::CmLayer layer,
                          std::string detail) {
    events_.push_back({t, std::move(type), a, b, layer, std::move(detail)});
}

void ConflictManager::ingest_beacon(const wire::PositionBeacon& beacon, double rx_time_s) {
    (void)rx_time_s;  // sender and simulation clocks share one time base
    if (beacon.drone_id == cfg_.ownship_id) return;
    auto& peer = peers_[beacon.drone_id];
    peer.track.drone_id = beacon.drone_id;
    peer.track.staleness_limit_s = cfg_.staleness_limit_s;
    if (!peer.has_prev) {
        peer.has_prev = true;
        peer.prev_pos = beacon.position;
        peer.prev_ts = beacon.timestamp;
    } else {
        const double dt = beacon.timestamp - peer.prev_ts;
        if (dt >= kVelocityBaselineS) {
            peer.track.last_velocity = {(beacon.position.east - peer.prev_pos.east) / dt,
                                        (beacon.position.north - peer.prev_pos.north) / dt,
                                        (beacon.position.up - peer.prev_pos.up) / dt};
            peer.track_ready = true;
            peer.prev_pos = beacon.position;
            peer.prev_ts = beacon.timestamp;
        }
    }
    peer.track.last_position = beacon.position;
    peer.track.last_update_s = beacon.timestamp;
}

std::vector<TrackEstimate> ConflictManager::live_tracks(double now_s,
                                                        const geom::EnuPosition& own_pos,
                                                        const geom::VelocityVector& own_vel) {
    std::vector<TrackEstimate> tracks;
    TrackEstimate own;
    own.drone_id = cfg_.ownship_id;
    own.last_position = own_pos;
    own.last_velocity = own_vel;
    own.last_update_s = now_s;
    own.staleness_limit_s = std::numeric_limits<double>::infinity();
    tracks.push_back(own);
    for (auto& [id, peer] : peers_) {
        if (!peer.track_ready) continue;
        if (peer.track.stale(now_s)) {
            if (!peer.counted_stale) {
                ++stale_exclusions_;
                peer.counted_stale = true;
            }
            continue;
        }
        peer.counted_stale = false;
        tracks.push_back(peer.track);
    }
    return tracks;
}

OwnshipDirectives ConflictManager::step(double now_s, const geom::EnuPosition& own_pos,
                                        const geom::VelocityVector& own_vel) {
    const auto tracks = live_tracks(now_s, own_pos, own_vel);
    const DetectParams detect{cfg_.horizon_s, cfg_.detect_step_s};
    const ManeuverParams mparams{cfg_.horizon_s, cfg_.detect_step_s, cfg_.climb_rate_mps};
    const auto events = detect_conflicts(tracks, now_s, detect, cfg_.preset);

    for (const auto& ev : events) {
        if (ev.drone_a != cfg_.ownship_id && ev.drone_b != cfg_.ownship_id) continue;
        const uint32_t peer_id = ev.drone_a == cfg_.ownship_id ? ev.drone_b : ev.drone_a;
        auto& ps = pairs_[peer_id];

        if (ev.layer == geom::CmLayer::collision_avoidance) {
            if (ps.phase != Phase::ca_active) {
                const auto [low_m, high_m] = collision_avoid(ev, tracks);
                const bool own_is_low = cfg_.ownship_id == ev.drone_a;
                ps.phase = Phase::ca_active;
                ps.own_maneuver = own_is_low ? low_m : high_m;
                ps.own_is_assignee = true;
                log(now_s, "collision_avoidance", ev.drone_a, ev.drone_b, ev.layer,
                    ps.own_maneuver->describe());
            }
            continue;
        }

        if (ps.phase == Phase::idle) {
            log(now_s, "conflict_detected", ev.drone_a, ev.drone_b, ev.layer, "");
            try {
                const auto m = formulate_solution(ev, tracks, cfg_.preset, mparams);
                ps.phase = Phase::wc_active;
                ps.own_is_assignee = cfg_.ownship_id == ev.drone_b;
                ps.maneuver = m;
                ps.own_maneuver = ps.own_is_assignee ? std::optional(m) : std::nullopt;
                ps.formulated_at_s = now_s;
                ps.escalation_logged = false;
                for (const auto& t : tracks) {
                    if (t.drone_id == peer_id) ps.peer_snapshot = t;
                }
                if (ps.own_is_assignee) {
                    log(now_s, "maneuver_applied", ev.drone_a, ev.drone_b, ev.layer, m.describe());
                }
            } catch (const EscalationRequired&) {
                ps.phase = Phase::wc_active;  // handled: hold for the CA layer
                ps.own_is_assignee = false;
                ps.maneuver.reset();
                ps.own_maneuver.reset();
                ps.formulated_at_s = now_s;
                for (const auto& t : tracks) {
                    if (t.drone_id == peer_id) ps.peer_snapshot = t;
                }
                if (!ps.escalation_logged) {
                    ps.escalation_logged = true;
                    log(now_s, "escalated", ev.drone_a, ev.drone_b, ev.layer,
                        "no conflict-free maneuver");
                }
            }
        }
    }

    // Monitoring: release resolved pairs, re-enter formulation when the
    // intruder deviates from the trajectory the solution assumed or ignores
    // the maneuver assigned to it.
    for (auto& [peer_id, ps] : pairs_) {
        if (ps.phase == Phase::idle) continue;
        auto peer_it = peers_.find(peer_id);
        if (peer_it == peers_.end() || !peer_it->second.track_ready ||
            peer_it->second.track.stale(now_s)) {
            ps.phase = Phase::idle;
            ps.own_maneuver.reset();
            log(now_s, "track_lost", std::min(cfg_.ownship_id, peer_id),
                std::max(cfg_.ownship_id, peer_id), geom::CmLayer::no_conflict, "");
            continue;
        }
        const auto& peer = peer_it->second.track;
        const geom::EnuPosition peer_now = peer.at(now_s);
        const bool wc_now = geom::puck_violation(own_pos, peer_now, cfg_.preset.well_clear);
        const bool ca_now = geom::puck_violation(own_pos, peer_now, cfg_.preset.collision);
        const bool range_opening = opening(own_pos, own_vel, peer_now, peer.last_velocity);
        const uint32_t lo = std::min(cfg_.ownship_id, peer_id);
        const uint32_t hi = std::max(cfg_.ownship_id, peer_id);

        if (ps.phase == Phase::ca_active) {
            if (!ca_now && range_opening) {
                ps.phase = Phase::idle;
                ps.own_maneuver.reset();
                log(now_s, "ca_cleared", lo, hi, geom::CmLayer::collision_avoidance, "");
            }
            continue;
        }

        // wc_active
        const double pred_err =
            geom::range_3d(ps.peer_snapshot.at(now_s), peer_now);
        const bool cooldown_ok = now_s - ps.last_retrigger_s >= cfg_.retrigger_cooldown_s;
        if (pred_err > cfg_.preset.well_clear.d_h / 2.0 && cooldown_ok) {
            ps.phase = Phase::idle;
            ps.own_maneuver.reset();
            ps.last_retrigger_s = now_s;
            ++retrigger_count_;
            log(now_s, "monitor_retrigger", lo, hi, geom::CmLayer::well_clear,
                "prediction error");
            continue;
        }
        if (!ps.own_is_assignee && ps.maneuver && wc_now && cooldown_ok &&
            now_s - ps.formulated_at_s >= kComplianceGraceS) {
            // The peer owns the maneuver; check it is visibly executing it.
            bool complying = true;
            const double peer_speed = peer.last_velocity.magnitude();
            const double expected_speed = ps.peer_snapshot.last_velocity.magnitude();
            switch (ps.maneuver->kind) {
                case ResolutionManeuver::Kind::altitude_offset:
                    complying = peer.last_velocity.v_up >= 0.5 * cfg_.climb_rate_mps;
                    break;
                case ResolutionManeuver::Kind::speed_scale:
                    complying = peer_speed <= 0.75 * expected_speed;
                    break;
                case ResolutionManeuver::Kind::hold:
                    complying = peer_speed <= 0.25 * expected_speed;
                    break;
                default:
                    break;
            }
            if (!complying) {
                ps.phase = Phase::idle;
                ps.own_maneuver.reset();
                ps.last_retrigger_s = now_s;
                ++retrigger_count_;
                log(now_s, "monitor_retrigger", lo, hi, geom::CmLayer::well_clear,
                    "intruder not maneuvering");
                continue;
            }
        }
        if (!wc_now && range_opening &&
            geom::horizontal_separation(own_pos, peer_now) >= cfg_.preset.well_clear.d_h) {
            ps.phase = Phase::idle;
            ps.own_maneuver.reset();
            log(now_s, "resolved", lo, hi, geom::CmLayer::well_clear, "");
        }
    }

    // Aggregate the active own-ship maneuvers into controller directives.
    OwnshipDirectives directives;
    for (const auto& [peer_id, ps] : pairs_) {
        if (!ps.own_maneuver) continue;
        const auto& m = *ps.own_maneuver;
        switch (m.kind) {
            case ResolutionManeuver::Kind::altitude_offset:
                directives.altitude_offset_m = std::max(directives.altitude_offset_m, m.value);
                break;
            case ResolutionManeuver::Kind::speed_scale:
                directives.speed_factor = std::min(directives.speed_factor, m.value);
                break;
            case ResolutionManeuver::Kind::hold:
                directives.speed_factor = 0.0;
                break;
            case ResolutionManeuver::Kind::vertical_evade:
                if (directives.evade_direction == 0) {
                    directives.evade_direction = m.evade_up ? 1 : -1;
                    directives.evade_rate_mps = m.value;
                }
                if (m.halt_horizontal) directives.speed_factor = 0.0;
                break;
            default:
                break;
        }
    }
    return directives;
}

}  // namespace skypuck::cm
