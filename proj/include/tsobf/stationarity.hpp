#pragma once

#include <span>
#include <utility>
#include <vector>

namespace tsobf {

struct AdfResult {
    double statistic = 0.0;
    double critical_value_5pct = 0.0;
    bool stationary = false; // statistic < critical_value_5pct
    int lag_order = 0;
};

/// Augmented Dickey-Fuller unit-root test, constant term, no trend. Lag order
/// follows the Schwert rule floor(12 * (n/100)^(1/4)), capped so the
/// regression keeps positive degrees of freedom; the 5% critical value is the
/// MacKinnon (2010) response surface in the effective sample size.
/// Requires length >= 12 and a non-constant series.
AdfResult adf_test(std::span<const double> x);

struct BoxCoxParam {
    double lambda = 1.0;
    double shift = 0.0; // added to the series before transforming
    bool applied = false;
};

/// One-parameter Box-Cox: (y^l - 1) / l, or log y when |l| < 1e-12.
/// All inputs must be strictly positive.
std::vector<double> box_cox(std::span<const double> y, double lambda);

/// Inverse transform: (l z + 1)^(1/l), or exp z when |l| < 1e-12.
/// For l != 0 every l*z + 1 must be positive.
std::vector<double> inverse_box_cox(std::span<const double> z, double lambda);

/// Grid search over lambda in {-5.0, -4.9, ..., 5.0} maximizing the Box-Cox
/// profile log-likelihood; ties resolve toward the lambda nearest 1.
double select_lambda(std::span<const double> y);

/// ADF gate + Box-Cox: stationary series pass through unchanged; otherwise
/// the series is shifted positive if needed, transformed with the selected
/// lambda, and the parameters recorded for exact inversion.
std::pair<std::vector<double>, BoxCoxParam> stabilize(std::span<const double> x);

std::vector<double> destabilize(std::span<const double> z, const BoxCoxParam& param);

} // namespace tsobf
