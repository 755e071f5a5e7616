#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tsobf {

/// Normalized biased sample autocorrelation R[0..max_lag], R[0] == 1.
/// Throws on zero-variance input.
std::vector<double> autocorr(std::span<const double> x, int max_lag);

/// Linear-prediction synthesis filter derived from an autocorrelation
/// sequence via the Yule-Walker equations.
struct LpFilter {
    int order = 0;
    std::vector<double> coefficients;   // a_1 .. a_order
    std::vector<double> source_autocorr; // R[0..order]
};

/// Levinson-Durbin solve of the order-sized symmetric Toeplitz system.
/// Throws SingularityError when a reflection coefficient reaches unit
/// magnitude (numerically indefinite system).
LpFilter lp_coefficients(std::span<const double> R, int order);

/// All-pole recursion z'[t] = sum_j a[j] * z'[t-j] + z[t], zero initial state.
std::vector<double> ar_filter(std::span<const double> coeffs, std::span<const double> z);

/// ar_filter followed by rescaling back to the input's sample std, so the
/// filter colors the spectrum without changing the delivered magnitude.
std::vector<double> shape_noise(const LpFilter& filter, std::span<const double> z);

enum class NoiseScaleRule { Sqrt2Std, SqrtStd, TwoStd, StdSquared, Std, None };

const char* to_string(NoiseScaleRule r);
NoiseScaleRule noise_scale_from_string(std::string_view s);

/// White-noise sigma for a rule given the forecast series' std.
double noise_sigma(NoiseScaleRule rule, double forecast_std);

struct NoiseConfig {
    NoiseScaleRule scale_rule = NoiseScaleRule::TwoStd;
    double tau = 0.5;    // correlation threshold
    int max_order = 8;   // N: LP orders 1..N are tried
    int max_retries = 50; // white-noise draws per order
    std::uint64_t seed = 0;

    /// CLI-facing range guard (tau in [0.05, 0.95], positive order/retries).
    void validate() const;
};

struct CorrelatedNoise {
    std::vector<double> values;
    double achieved_correlation = 0.0;
    int order_used = 0;
    bool accepted = false; // achieved_correlation >= tau
    int attempts = 0;      // total white-noise draws consumed
};

/// Draws white Gaussian noise, shapes it with the LP filter of ascending
/// order until Pearson(Z', forecast) >= tau; falls back to the best
/// candidate (accepted = false) when every order exhausts its retries.
/// Delivered noise always has sample std equal to the configured sigma.
CorrelatedNoise generate_correlated_noise(std::span<const double> forecast,
                                          const NoiseConfig& cfg);

/// Elementwise x + z; lengths must match.
std::vector<double> add_noise(std::span<const double> x, std::span<const double> z);

} // namespace tsobf
