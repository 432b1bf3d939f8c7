#include "metrics.hpp"

#include <algorithm>
#include <cmath>

namespace skypuck::sim {

std::optional<size_t> DelayMetrics::bin_of(double distance_m) const {
    if (edges_.size() < 2) return std::nullopt;
    if (distance_m < edges_.front() || distance_m >= edges_.back()) return std::nullopt;
    for (size_t i = 1; i < edges_.size(); ++i) {
        if (distance_m < edges_[i]) return i - 1;
    }
    return std::nullopt;
}

void DelayMetrics::record(uint32_t tx, uint32_t rx, double distance_m, double delay_s) {
    const auto bin = bin_of(distance_m);
    if (!bin) return;  // outside the configured clusters
    auto& per_pair = samples_[{tx, rx}];
    if (per_pair.empty()) per_pair.resize(bin_count());
    per_pair[*bin].push_back(delay_s);
}

namespace {

skypuck::sim::DelayMetrics::BinStats summarize(double lo, double hi,
                                               const std::vector<double>& xs) {
    skypuck::sim::DelayMetrics::BinStats s;
    s.lo_m = lo;
    s.hi_m = hi;
    s.n = xs.size();
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean_s = sum / static_cast<double>(xs.size());
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    const size_t idx = static_cast<size_t>(std::ceil(0.95 * static_cast<double>(sorted.size())));
    s.p95_s = sorted[std::min(idx == 0 ? 0 : idx - 1, sorted.size() - 1)];
    return s;
}

}  // namespace

std::vector<DelayMetrics::BinStats> DelayMetrics::stats(uint32_t tx, uint32_t rx) const {
    std::vector<BinStats> out;
    const auto it = samples_.find({tx, rx});
    for (size_t b = 0; b < bin_count(); ++b) {
        const std::vector<double> empty;
        const auto& xs = (it != samples_.end() && b < it->second.size()) ? it->second[b] : empty;
        out.push_back(summarize(edges_[b], edges_[b + 1], xs));
    }
    return out;
}

std::vector<std::pair<uint32_t, uint32_t>> DelayMetrics::pairs() const {
    std::vector<std::pair<uint32_t, uint32_t>> out;
    for (const auto& [key, _] : samples_) out.push_back(key);
    return out;
}

std::vector<DelayMetrics::BinStats> DelayMetrics::pooled_stats() const {
    std::vector<BinStats> out;
    for (size_t b = 0; b < bin_count(); ++b) {
        std::vector<double> pooled;
        for (const auto& [_, per_pair] : samples_) {
            if (b < per_pair.size()) {
                pooled.insert(pooled.end(), per_pair[b].begin(), per_pair[b].end());
            }
        }
        out.push_back(summarize(edges_[b], edges_[b + 1], pooled));
    }
    return out;
}

const std::vector<double>* DelayMetrics::samples(uint32_t tx, uint32_t rx, size_t bin) const {
    const auto it = samples_.find({tx, rx});
    if (it == samples_.end() || bin >= it->second.size()) return nullptr;
    return &it->second[bin];
}

}  // namespace skypuck::sim
