#include "protocols.hpp"

#include <stdexcept>

namespace skypuck::proto {

WifiSsidNode::WifiSsidNode(WifiConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.channels.empty()) {
        throw std::invalid_argument("WifiSsidNode: channel list empty");
    }
    bool scan_listed = false;
    for (int ch : cfg_.channels) scan_listed |= (ch == cfg_.scan_channel);
    if (!scan_listed) {
        throw std::invalid_argument("WifiSsidNode: scan channel not in channel list");
    }
    if (!(cfg_.state_min_s > 0.0) || cfg_.state_max_s < cfg_.state_min_s) {
        throw std::invalid_argument("WifiSsidNode: bad state duration range");
    }
    if (!(cfg_.dwell_s > 0.0) || cfg_.airtime_s > cfg_.dwell_s) {
        throw std::invalid_argument("WifiSsidNode: airtime must fit in the dwell slot");
    }
}

void WifiSsidNode::enter(State s, double now, RngStream& rng) {
    state_ = s;
    state_since_ = now;
    state_until_ = now + rng.uniform(cfg_.state_min_s, cfg_.state_max_s);
    if (s == State::broadcast) {
        sweep_pos_ = 0;
        next_slot_ = now;
    }
}

std::vector<Transmission> WifiSsidNode::step(double now, RngStream& rng) {
    std::vector<Transmission> out;
    if (!started_) {
        started_ = true;
        epoch_ = now;
        last_now_ = now;
        enter(rng.uniform() < 0.5 ? State::scan : State::broadcast, now, rng);
        return out;
    }

    // Walk state flips and dwell slots chronologically up to `now`. Each slot
    // is visited exactly once; a beacon is started only when its airtime fits
    // before the state flips.
    double cursor = last_now_;
    while (cursor < now) {
        if (state_ == State::broadcast) {
            while (next_slot_ <= now && next_slot_ < state_until_) {
                if (next_slot_ + cfg_.airtime_s <= state_until_) {
                    Transmission tx;
                    tx.channel = cfg_.channels[sweep_pos_ % cfg_.channels.size()];
                    tx.start_s = next_slot_;
                    tx.airtime_s = cfg_.airtime_s;
                    tx.sequence = sequence_++;
                    out.push_back(tx);
                }
                ++sweep_pos_;
                next_slot_ += cfg_.dwell_s;
            }
        }
        if (state_until_ <= now) {
            if (state_ == State::scan) scan_accum_s_ += state_until_ - state_since_;
            const double flip_at = state_until_;
            cursor = flip_at;
            enter(state_ == State::scan ? State::broadcast : State::scan, flip_at, rng);
        } else {
            cursor = now;
        }
    }
    last_now_ = now;
    return out;
}

bool WifiSsidNode::can_receive(int channel, double tx_start_s, double tx_end_s) const {
    if (state_ != State::scan || channel != cfg_.scan_channel) return false;
    return state_since_ <= tx_start_s && tx_end_s <= state_until_;
}

LoRaNode::LoRaNode(LoRaConfig cfg) : cfg_(cfg) {
    if (cfg_.min_interval_s < 5.0) {
        throw std::invalid_argument("LoRaNode: duty cycle requires >= 5 s spacing");
    }
    if (!(cfg_.airtime_s > 0.0)) {
        throw std::invalid_argument("LoRaNode: airtime must be positive");
    }
}

std::optional<Transmission> LoRaNode::step(double now) {
    if (now - last_tx_start_s_ < cfg_.min_interval_s) return std::nullopt;
    last_tx_start_s_ = now;
    Transmission tx;
    tx.start_s = now;
    tx.airtime_s = cfg_.airtime_s;
    tx.sequence = sequence_++;
    return tx;
}

bool LoRaNode::busy(double from_s, double to_s) const {
    const double tx_end = last_tx_start_s_ + cfg_.airtime_s;
    return last_tx_start_s_ < to_s && from_s < tx_end;
}

void LoRaNode::set_start_offset(double offset_s) {
    last_tx_start_s_ = offset_s - cfg_.min_interval_s;
}

AdsBNode::AdsBNode(AdsBConfig cfg) : cfg_(cfg) {
    if (!(cfg_.period_s > 0.0)) {
        throw std::invalid_argument("AdsBNode: period must be positive");
    }
}

std::optional<Transmission> AdsBNode::step(double now) {
    const double next = static_cast<double>(emissions_) * cfg_.period_s;
    if (now < next) return std::nullopt;
    ++emissions_;
    Transmission tx;
    tx.start_s = next;  // exact grid multiple, independent of tick jitter
    tx.airtime_s = 0.0;
    tx.power_offset_db = cfg_.power_offset_db;
    tx.sequence = sequence_++;
    return tx;
}

}  // namespace skypuck::proto
