#pragma once

#include <span>
#include <vector>

#include "rng.hpp"

namespace skypuck::radio {

/// Log-distance path loss with optional lognormal shadowing.
/// PL(d) = pl0_db + 10 * exponent * log10(d / d0_m) [+ N(0, sigma)].
struct PathLossModel {
    double pl0_db = 40.05;  // free-space loss at 1 m, 2.4 GHz
    double d0_m = 1.0;
    double exponent = 2.4;
    double shadowing_sigma_db = 0.0;
};

struct LinkBudget {
    double tx_power_dbm = 0.0;
    double rx_sensitivity_dbm = -90.0;
    double antenna_gain_db = 0.0;  // sum of both ends
};

struct RssiSample {
    double distance_m = 0.0;
    double rssi_dbm = 0.0;
};

/// Deterministic loss (no shadowing). Throws std::invalid_argument for d <= 0.
double path_loss_db(const PathLossModel& model, double distance_m);

/// One received-power draw: tx + gain - PL(d) - N(0, sigma).
double rssi(const PathLossModel& model, const LinkBudget& budget, double distance_m,
            RngStream& rng);

inline bool reception_success(double rssi_dbm, const LinkBudget& budget) {
    return rssi_dbm >= budget.rx_sensitivity_dbm;
}

/// Distance at which the deterministic (sigma = 0) RSSI meets sensitivity.
double deterministic_range(const PathLossModel& model, const LinkBudget& budget);

struct SingularFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Least-squares fit of tx + gain - rssi against 10*log10(d/d0).
/// Recovers (pl0_db, exponent); shadowing_sigma_db is the residual standard
/// deviation. Throws SingularFitError when all samples share one distance.
PathLossModel fit_path_loss(std::span<const RssiSample> samples, const LinkBudget& budget,
                            double d0_m = 1.0);

}  // namespace skypuck::radio
