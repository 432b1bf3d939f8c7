#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conflict.hpp"
#include "metrics.hpp"
#include "scenario.hpp"

namespace skypuck::sim {

struct ScenarioInvalid : std::runtime_error {
    std::vector<Violation> violations;
    explicit ScenarioInvalid(std::vector<Violation> v)
        : std::runtime_error("scenario validation failed"), violations(std::move(v)) {}
};

struct RunResult {
    DelayMetrics delays;
    SafetyMetrics safety;
    std::vector<RssiRecord> rssi_trace;
    std::vector<cm::LoopEvent> events;

    uint64_t transmissions = 0;
    uint64_t receptions = 0;
    int stale_exclusions = 0;
    int retriggers = 0;

    /// Regression over the received part of the trace; present when the run
    /// observed at least two distinct link distances.
    std::optional<radio::PathLossModel> fitted;

    std::string scenario_digest;
    uint64_t seed = 0;
    double duration_s = 0.0;
};

/// Deterministic fixed-timestep run. Validates first and throws
/// ScenarioInvalid listing every breach before any stepping.
RunResult run(const Scenario& scenario);

/// Measurement-campaign wrapper: exactly two nodes, at least one mobile.
/// Returns the run plus the path-loss fit over its received RSSI trace.
/// Throws radio::SingularFitError when fewer than two distinct distances
/// were observed.
std::pair<RunResult, radio::PathLossModel> measure_flight(const Scenario& scenario);

/// Output files written by `write_outputs` (paths relative to the directory).
struct OutputPaths {
    std::string rssi_csv = "rssi.csv";
    std::string delays_csv = "delays.csv";
    std::string events_csv = "events.csv";
    std::string summary_json = "summary.json";
};

/// Write the run artifacts into `dir` (created if missing). Returns the
/// summary document also stored in summary.json.
std::string write_outputs(const RunResult& result, const Scenario& scenario,
                          const std::string& dir, const OutputPaths& paths = {});

/// The summary document alone (deterministic: no wall-clock content).
std::string summary_json(const RunResult& result, const Scenario& scenario);

std::string rssi_csv(const std::vector<RssiRecord>& trace);
std::string delays_csv(const DelayMetrics& delays);
std::string events_csv(const std::vector<cm::LoopEvent>& events);

}  // namespace skypuck::sim
