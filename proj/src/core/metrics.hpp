#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace skypuck::sim {

/// Inter-update delay samples for one ordered (tx -> rx) pair, grouped into
/// distance clusters. A delay sample is the gap between two consecutive
/// received updates, attributed to the bin of the sender's distance at
/// transmission time of the later update.
class DelayMetrics {
public:
    DelayMetrics() = default;
    explicit DelayMetrics(std::vector<double> bin_edges) : edges_(std::move(bin_edges)) {}

    void record(uint32_t tx, uint32_t rx, double distance_m, double delay_s);

    size_t bin_count() const { return edges_.size() < 2 ? 0 : edges_.size() - 1; }
    const std::vector<double>& edges() const { return edges_; }

    struct BinStats {
        double lo_m = 0.0;
        double hi_m = 0.0;
        size_t n = 0;
        /// Empty bins carry no averages; they are reported, never zero-filled.
        std::optional<double> mean_s;
        std::optional<double> p95_s;
    };

    std::vector<BinStats> stats(uint32_t tx, uint32_t rx) const;
    std::vector<std::pair<uint32_t, uint32_t>> pairs() const;

    /// Samples pooled over all ordered pairs (used for single-link runs and
    /// seed-aggregated statistics).
    std::vector<BinStats> pooled_stats() const;

    const std::vector<double>* samples(uint32_t tx, uint32_t rx, size_t bin) const;

private:
    std::optional<size_t> bin_of(double distance_m) const;

    std::vector<double> edges_;
    std::map<std::pair<uint32_t, uint32_t>, std::vector<std::vector<double>>> samples_;
};

/// Ground-truth separation bookkeeping. An episode opens when a pair enters
/// the well-clear puck and records the deepest level reached before the pair
/// separates again, so the counts nest by construction:
/// zero-separation <= collision <= well-clear.
struct SafetyEpisode {
    uint32_t drone_a = 0;
    uint32_t drone_b = 0;
    double start_s = 0.0;
    double end_s = 0.0;
    int max_level = 1;  // 1 = well-clear, 2 = collision, 3 = zero separation
};

struct SafetyMetrics {
    std::vector<SafetyEpisode> episodes;

    size_t well_clear_violations() const { return episodes.size(); }
    size_t collision_violations() const {
        size_t n = 0;
        for (const auto& e : episodes) n += e.max_level >= 2;
        return n;
    }
    size_t zero_separation_events() const {
        size_t n = 0;
        for (const auto& e : episodes) n += e.max_level >= 3;
        return n;
    }
};

struct RssiRecord {
    double time_s = 0.0;  // transmission start
    uint32_t tx_id = 0;
    uint32_t rx_id = 0;
    double distance_m = 0.0;
    double rssi_dbm = 0.0;
    bool received = false;
};

}  // namespace skypuck::sim
