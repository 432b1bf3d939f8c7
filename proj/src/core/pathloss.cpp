#include "pathloss.hpp"

#include <cmath>
#include <stdexcept>

namespace skypuck::radio {

double path_loss_db(const PathLossModel& model, double distance_m) {
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("path_loss_db: distance must be positive");
    }
    return model.pl0_db + 10.0 * model.exponent * std::log10(distance_m / model.d0_m);
}

double rssi(const PathLossModel& model, const LinkBudget& budget, double distance_m,
            RngStream& rng) {
    double value = budget.tx_power_dbm + budget.antenna_gain_db - path_loss_db(model, distance_m);
    if (model.shadowing_sigma_db > 0.0) {
        value -= rng.normal(0.0, model.shadowing_sigma_db);
    }
    return value;
}

double deterministic_range(const PathLossModel& model, const LinkBudget& budget) {
    const double margin_db =
        budget.tx_power_dbm + budget.antenna_gain_db - budget.rx_sensitivity_dbm - model.pl0_db;
    return model.d0_m * std::pow(10.0, margin_db / (10.0 * model.exponent));
}

PathLossModel fit_path_loss(std::span<const RssiSample> samples, const LinkBudget& budget,
                            double d0_m) {
    if (samples.size() < 2) {
        throw std::invalid_argument("fit_path_loss: need at least 2 samples");
    }
    if (!(d0_m > 0.0)) {
        throw std::invalid_argument("fit_path_loss: d0 must be positive");
    }
    // x = 10*log10(d/d0), y = observed path loss; slope is the exponent.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(samples.size());
    for (const auto& s : samples) {
        if (!(s.distance_m > 0.0)) {
            throw std::invalid_argument("fit_path_loss: sample distance must be positive");
        }
        const double x = 10.0 * std::log10(s.distance_m / d0_m);
        const double y = budget.tx_power_dbm + budget.antenna_gain_db - s.rssi_dbm;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double var = sxx - sx * sx / n;
    if (var <= 1e-12) {
        throw SingularFitError("fit_path_loss: all samples at a single distance");
    }
    const double slope = (sxy - sx * sy / n) / var;
    const double intercept = (sy - slope * sx) / n;

    double ssr = 0.0;
    for (const auto& s : samples) {
        const double x = 10.0 * std::log10(s.distance_m / d0_m);
        const double y = budget.tx_power_dbm + budget.antenna_gain_db - s.rssi_dbm;
        const double r = y - (intercept + slope * x);
        ssr += r * r;
    }
    const double dof = n > 2.0 ? n - 2.0 : 1.0;

    PathLossModel fitted;
    fitted.pl0_db = intercept;
    fitted.d0_m = d0_m;
    fitted.exponent = slope;
    fitted.shadowing_sigma_db = std::sqrt(ssr / dof);
    return fitted;
}

}  // namespace skypuck::radio
