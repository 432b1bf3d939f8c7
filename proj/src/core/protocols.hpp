#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "beacon.hpp"
#include "rng.hpp"

namespace skypuck::proto {

/// One on-air beacon emission. `channel` is meaningful for Wi-Fi only.
struct Transmission {
    uint32_t tx_id = 0;
    int channel = -1;
    double start_s = 0.0;
    double airtime_s = 0.0;
    double power_offset_db = 0.0;  // relative to the protocol link budget
    uint16_t sequence = 0;

    double end_s() const { return start_s + airtime_s; }
};

// ---------------------------------------------------------------------------
// Wi-Fi SSID scan/broadcast scheme.
//
// A single-RF-chain module cannot scan and broadcast at once, so the node
// alternates between the two states with durations drawn uniformly from one
// shared range; the time share converges to 50% per state with no
// synchronization between nodes. Scanning listens on one fixed channel;
// broadcasting sweeps the channel list cyclically, one beacon per dwell slot.
// ---------------------------------------------------------------------------

struct WifiConfig {
    int scan_channel = 6;
    std::vector<int> channels{1, 6, 11};
    double state_min_s = 0.100;
    double state_max_s = 0.200;
    double dwell_s = 0.010;    // per-channel broadcast slot
    double airtime_s = 0.003;  // beacon frame airtime
};

class WifiSsidNode {
public:
    enum class State { scan, broadcast };

    explicit WifiSsidNode(WifiConfig cfg = {});

    /// Advance to `now`; returns beacons whose slots began in (prev, now].
    /// Beacons are only started when the full airtime fits in the state.
    std::vector<Transmission> step(double now, RngStream& rng);

    /// True iff this node listens on `channel` for the whole transmission.
    bool can_receive(int channel, double tx_start_s, double tx_end_s) const;

    State state() const { return state_; }
    double scan_time_s() const {
        double total = scan_accum_s_;
        if (started_ && state_ == State::scan && last_now_ > state_since_) {
            total += last_now_ - state_since_;
        }
        return total;
    }
    double elapsed_s() const { return started_ ? last_now_ - epoch_ : 0.0; }
    const WifiConfig& config() const { return cfg_; }

private:
    void enter(State s, double now, RngStream& rng);

    WifiConfig cfg_;
    State state_ = State::scan;
    double state_since_ = 0.0;
    double state_until_ = 0.0;
    size_t sweep_pos_ = 0;
    double next_slot_ = 0.0;
    uint16_t sequence_ = 0;
    bool started_ = false;
    double epoch_ = 0.0;
    double last_now_ = 0.0;
    double scan_accum_s_ = 0.0;
};

// ---------------------------------------------------------------------------
// Duty-cycled LoRa beaconing (SF7, peer-to-peer).
// ---------------------------------------------------------------------------

struct LoRaConfig {
    int spreading_factor = 7;
    double min_interval_s = 5.0;  // duty-cycle gate between transmission starts
    double airtime_s = 0.160;
};

class LoRaNode {
public:
    explicit LoRaNode(LoRaConfig cfg = {});

    /// Emits when the duty-cycle gate is open; the first call always emits.
    std::optional<Transmission> step(double now);

    /// Half-duplex: the node cannot receive while its own frame is on air.
    bool busy(double from_s, double to_s) const;

    /// Delay the first emission to `offset` without weakening the gate.
    void set_start_offset(double offset_s);

    const LoRaConfig& config() const { return cfg_; }
    double last_tx_start_s() const { return last_tx_start_s_; }

private:
    LoRaConfig cfg_;
    double last_tx_start_s_ = -std::numeric_limits<double>::infinity();
    uint16_t sequence_ = 0;
};

// ---------------------------------------------------------------------------
// (RP-)ADS-B: strictly periodic broadcast every 500 ms. Frame airtime is
// microseconds at 1090 MHz rates, far under a simulation tick, so
// transmissions are modeled as instantaneous.
// ---------------------------------------------------------------------------

struct AdsBConfig {
    double period_s = 0.5;
    double power_offset_db = 0.0;  // -20 dB for the reduced-power variant
};

class AdsBNode {
public:
    explicit AdsBNode(AdsBConfig cfg = {});

    /// Emits on each period grid tick; timestamps are exact multiples of the
    /// period.
    std::optional<Transmission> step(double now);

    const AdsBConfig& config() const { return cfg_; }

private:
    AdsBConfig cfg_;
    uint64_t emissions_ = 0;
    uint16_t sequence_ = 0;
};

}  // namespace skypuck::proto
