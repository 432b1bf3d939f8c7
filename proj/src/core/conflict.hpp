#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "beacon.hpp"
#include "geometry.hpp"

namespace skypuck::cm {

/// A neighbor as known from its beacons: last position plus the velocity
/// finite-differenced from the last two receptions. Extrapolation is only
/// trusted while the track is fresher than its staleness limit.
struct TrackEstimate {
    uint32_t drone_id = 0;
    geom::EnuPosition last_position;
    geom::VelocityVector last_velocity;
    double last_update_s = 0.0;
    double staleness_limit_s = 0.0;

    bool stale(double now_s) const { return now_s - last_update_s > staleness_limit_s; }

    geom::EnuPosition at(double t_s) const {
        const double dt = t_s - last_update_s;
        return {last_position.east + last_velocity.v_east * dt,
                last_position.north + last_velocity.v_north * dt,
                last_position.up + last_velocity.v_up * dt};
    }
};

struct ConflictEvent {
    uint32_t drone_a = 0;  // lower id
    uint32_t drone_b = 0;
    double detected_at_s = 0.0;
    double predicted_violation_time_s = 0.0;
    geom::CmLayer layer = geom::CmLayer::well_clear;
};

struct ResolutionManeuver {
    enum class Kind {
        altitude_offset,
        departure_delay,
        speed_scale,
        vertical_evade,
        hold,
    };

    Kind kind = Kind::hold;
    double value = 0.0;           // offset m | delay s | factor | evade rate m/s
    bool evade_up = true;         // vertical_evade direction
    bool halt_horizontal = false; // ground-proximity evade also stops

    static ResolutionManeuver altitude_offset(double delta_up_m) {
        return {Kind::altitude_offset, delta_up_m, true, false};
    }
    static ResolutionManeuver departure_delay(double delay_s) {
        return {Kind::departure_delay, delay_s, true, false};
    }
    static ResolutionManeuver speed_scale(double factor) {
        return {Kind::speed_scale, factor, true, false};
    }
    static ResolutionManeuver vertical_evade(bool up, double rate_mps, bool halt = false) {
        return {Kind::vertical_evade, rate_mps, up, halt};
    }
    static ResolutionManeuver hold() { return {Kind::hold, 0.0, true, false}; }

    std::string describe() const;
};

struct DetectParams {
    double horizon_s = 120.0;
    double step_s = 0.1;
};

/// Pairwise constant-velocity conflict probe. Stale tracks are skipped
/// (their count is reported through `stale_excluded`). Emits one event per
/// pair at the earliest predicted well-clear violation inside the horizon;
/// the layer escalates to collision avoidance when the collision puck is
/// already violated at `now`.
std::vector<ConflictEvent> detect_conflicts(std::span<const TrackEstimate> tracks, double now_s,
                                            const DetectParams& params,
                                            const geom::EnvironmentPreset& preset,
                                            int* stale_excluded = nullptr);

struct EscalationRequired : std::runtime_error {
    uint32_t drone_a, drone_b;
    EscalationRequired(uint32_t a, uint32_t b)
        : std::runtime_error("no conflict-free maneuver; escalating"), drone_a(a), drone_b(b) {}
};

struct ManeuverParams {
    double horizon_s = 120.0;
    double step_s = 0.1;
    double climb_rate_mps = geom::kDefaultClimbRate;
};

/// Re-simulated trajectory check used to accept a candidate maneuver:
/// no collision-puck violation at any step, no well-clear violation at any
/// track's closest horizontal approach, and none left at the horizon end.
bool maneuver_conflict_free(const TrackEstimate& ownship, const ResolutionManeuver& m,
                            std::span<const TrackEstimate> others,
                            const geom::EnvironmentPreset& preset, const ManeuverParams& params,
                            double now_s);

/// Well-clear resolution: first entry of the ordered menu
/// [altitude_offset(+d_V), speed_scale(0.5), hold] whose re-simulated
/// trajectory is conflict-free against all current tracks. The maneuver is
/// assigned to the lower-priority (higher-id) drone of the pair.
/// Throws EscalationRequired when the menu is exhausted.
ResolutionManeuver formulate_solution(const ConflictEvent& event,
                                      std::span<const TrackEstimate> tracks,
                                      const geom::EnvironmentPreset& preset,
                                      const ManeuverParams& params);

/// Last-resort paired maneuver, applied immediately with no re-check:
/// lower id climbs, higher id descends, unless the descending drone is
/// within 10 m of ground, in which case both climb and the lower id also
/// stops. Returned as (lower-id maneuver, higher-id maneuver).
std::pair<ResolutionManeuver, ResolutionManeuver> collision_avoid(
    const ConflictEvent& event, std::span<const TrackEstimate> tracks);

/// Directives the separation loop hands to the ownship flight controller.
struct OwnshipDirectives {
    double altitude_offset_m = 0.0;  // target offset from the planned path
    double speed_factor = 1.0;
    int evade_direction = 0;  // -1 down, 0 none, +1 up
    double evade_rate_mps = 0.0;
};

struct LoopEvent {
    double time_s = 0.0;
    std::string type;
    uint32_t drone_a = 0;
    uint32_t drone_b = 0;
    geom::CmLayer layer = geom::CmLayer::no_conflict;
    std::string detail;
};

/// Per-drone separation-provision loop: detect -> formulate -> implement ->
/// monitor, with collision-avoidance events bypassing formulation. One
/// instance per drone; instances share nothing and learn about each other
/// only through received beacons.
class ConflictManager {
public:
    struct Config {
        uint32_t ownship_id = 0;
        geom::EnvironmentPreset preset;
        double horizon_s = 120.0;
        double detect_step_s = 0.1;
        double climb_rate_mps = geom::kDefaultClimbRate;
        double staleness_limit_s = 2.4;
        /// Hold-off between monitoring re-triggers for the same pair.
        double retrigger_cooldown_s = 1.0;
    };

    explicit ConflictManager(Config cfg) : cfg_(std::move(cfg)) {}

    /// Feed one decoded beacon (called by the radio layer on reception).
    void ingest_beacon(const wire::PositionBeacon& beacon, double rx_time_s);

    /// One control tick. Returns the directives for the ownship controller.
    OwnshipDirectives step(double now_s, const geom::EnuPosition& own_pos,
                           const geom::VelocityVector& own_vel);

    const std::vector<LoopEvent>& events() const { return events_; }
    int stale_exclusions() const { return stale_exclusions_; }
    int retrigger_count() const { return retrigger_count_; }
    const Config& config() const { return cfg_; }

private:
    enum class Phase { idle, wc_active, ca_active };

    struct PairState {
        Phase phase = Phase::idle;
        bool own_is_assignee = false;
        std::optional<ResolutionManeuver> maneuver;      // the formulated solution
        std::optional<ResolutionManeuver> own_maneuver;  // set when ownship executes it
        TrackEstimate peer_snapshot;  // peer track at formulation time
        double formulated_at_s = 0.0;
        double last_retrigger_s = -1e18;
        bool escalation_logged = false;
    };

    struct PeerHistory {
        bool has_prev = false;
        geom::EnuPosition prev_pos;
        double prev_ts = 0.0;
        TrackEstimate track;
        bool track_ready = false;  // needs two beacons for a velocity
        bool counted_stale = false;
    };

    void log(double t, std::string type, uint32_t a, uint32_t b, geom::CmLayer layer,
             std::string detail);
    std::vector<TrackEstimate> live_tracks(double now_s, const geom::EnuPosition& own_pos,
                                           const geom::VelocityVector& own_vel);

    Config cfg_;
    std::map<uint32_t, PeerHistory> peers_;
    std::map<uint32_t, PairState> pairs_;
    std::vector<LoopEvent> events_;
    int stale_exclusions_ = 0;
    int retrigger_count_ = 0;
};

}  // namespace skypuck::cm
