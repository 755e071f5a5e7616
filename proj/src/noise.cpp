#include "tsobf/noise.hpp"

#include "tsobf/errors.hpp"
#include "tsobf/rng.hpp"
#include "tsobf/util.hpp"

#include <algorithm>
#include <cmath>

namespace tsobf {

std::vector<double> autocorr(std::span<const double> x, int max_lag) {
    const std::size_t n = x.size();
    if (n < 2) throw DataError("autocorr: need at least 2 samples");
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n)
        throw DataError("autocorr: max_lag must satisfy 0 <= max_lag < length");

    const double m = mean(x);
    std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (int k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(k) < n; ++i)
            s += (x[i] - m) * (x[i + static_cast<std::size_t>(k)] - m);
        r[static_cast<std::size_t>(k)] = s / static_cast<double>(n);
    }
    if (r[0] <= 0.0) throw DataError("autocorr: zero-variance series");
    const double r0 = r[0];
    for (double& v : r) v /= r0;
    return r;
}

LpFilter lp_coefficients(std::span<const double> R, int order) {
    if (order < 1) throw DataError("lp_coefficients: order must be >= 1");
    if (R.size() < static_cast<std::size_t>(order) + 1)
        throw DataError("lp_coefficients: need order+1 autocorrelation values");

    constexpr double kUnitMargin = 1e-10;
    std::vector<double> a(static_cast<std::size_t>(order), 0.0);
    double err = R[0];
    for (int m = 0; m < order; ++m) {
        double acc = R[static_cast<std::size_t>(m) + 1];
        for (int j = 0; j < m; ++j)
            acc -= a[static_cast<std::size_t>(j)] * R[static_cast<std::size_t>(m - j)];
        if (!(std::abs(err) > 0.0) || !std::isfinite(err))
            throw SingularityError("lp_coefficients: zero prediction error at order " +
                                   std::to_string(m));
        const double k = acc / err;
        if (std::abs(k) >= 1.0 - kUnitMargin)
            throw SingularityError("lp_coefficients: reflection coefficient " +
                                   format_double(k) + " at order " + std::to_string(m + 1));
        // In-place symmetric update of a_1..a_m.
        for (int j = 0; j < m / 2; ++j) {
            const double tmp = a[static_cast<std::size_t>(j)];
            a[static_cast<std::size_t>(j)] = tmp - k * a[static_cast<std::size_t>(m - 1 - j)];
            a[static_cast<std::size_t>(m - 1 - j)] -= k * tmp;
        }
        if (m % 2 == 1)
            a[static_cast<std::size_t>(m / 2)] -= k * a[static_cast<std::size_t>(m / 2)];
        a[static_cast<std::size_t>(m)] = k;
        err *= 1.0 - k * k;
    }

    LpFilter f;
    f.order = order;
    f.coefficients = std::move(a);
    f.source_autocorr.assign(R.begin(), R.begin() + order + 1);
    return f;
}

std::vector<double> ar_filter(std::span<const double> coeffs, std::span<const double> z) {
    std::vector<double> out(z.size(), 0.0);
    const std::size_t p = coeffs.size();
    for (std::size_t t = 0; t < z.size(); ++t) {
        double acc = z[t];
        const std::size_t depth = std::min(p, t);
        for (std::size_t j = 1; j <= depth; ++j) acc += coeffs[j - 1] * out[t - j];
        out[t] = acc;
    }
    return out;
}

namespace {

double sample_std(std::span<const double> x) { return std::sqrt(variance(x)); }

std::vector<double> rescale_to_std(std::vector<double> x, double target) {
    const double s = sample_std(x);
    if (!(s > 0.0)) throw DataError("rescale: zero-variance signal");
    const double factor = target / s;
    for (double& v : x) v *= factor;
    return x;
}

} // namespace

std::vector<double> shape_noise(const LpFilter& filter, std::span<const double> z) {
    if (!all_finite(z)) throw DataError("shape_noise: non-finite input");
    auto out = ar_filter(filter.coefficients, z);
    if (!all_finite(out))
        throw DataError("shape_noise: unstable filter produced non-finite output");
    const double in_std = sample_std(z);
    if (!(in_std > 0.0)) return out; // all-zero input stays all-zero
    return rescale_to_std(std::move(out), in_std);
}

const char* to_string(NoiseScaleRule r) {
    switch (r) {
    case NoiseScaleRule::Sqrt2Std: return "sqrt2std";
    case NoiseScaleRule::SqrtStd: return "sqrtstd";
    case NoiseScaleRule::TwoStd: return "2std";
    case NoiseScaleRule::StdSquared: return "std2";
    case NoiseScaleRule::Std: return "std";
    case NoiseScaleRule::None: return "none";
    }
    return "std";
}

NoiseScaleRule noise_scale_from_string(std::string_view s) {
    if (s == "sqrt2std") return NoiseScaleRule::Sqrt2Std;
    if (s == "sqrtstd") return NoiseScaleRule::SqrtStd;
    if (s == "2std") return NoiseScaleRule::TwoStd;
    if (s == "std2") return NoiseScaleRule::StdSquared;
    if (s == "std") return NoiseScaleRule::Std;
    if (s == "none") return NoiseScaleRule::None;
    throw DataError("unknown noise scale rule '" + std::string(s) +
                    "' (expected sqrt2std|sqrtstd|2std|std2|std|none)");
}

double noise_sigma(NoiseScaleRule rule, double forecast_std) {
    switch (rule) {
    case NoiseScaleRule::Sqrt2Std: return std::sqrt(2.0 * forecast_std);
    case NoiseScaleRule::SqrtStd: return std::sqrt(forecast_std);
    case NoiseScaleRule::TwoStd: return 2.0 * forecast_std;
    case NoiseScaleRule::StdSquared: return forecast_std * forecast_std;
    case NoiseScaleRule::Std: return forecast_std;
    case NoiseScaleRule::None: return 0.0;
    }
    return forecast_std;
}

void NoiseConfig::validate() const {
    if (!(tau >= 0.05 && tau <= 0.95))
        throw DataError("correlation threshold must lie in [0.05, 0.95], got " +
                        format_double(tau));
    if (max_order < 1) throw DataError("max LP order must be >= 1");
    if (max_retries < 1) throw DataError("max retries must be >= 1");
}

CorrelatedNoise generate_correlated_noise(std::span<const double> forecast,
                                          const NoiseConfig& cfg) {
    const std::size_t n = forecast.size();
    if (n < static_cast<std::size_t>(cfg.max_order) + 2)
        throw DataError("generate_correlated_noise: forecast shorter than max_order + 2");
    const double fstd = sample_std(forecast);
    const double sigma = noise_sigma(cfg.scale_rule, fstd);

    CorrelatedNoise result;
    if (cfg.scale_rule == NoiseScaleRule::None || sigma == 0.0) {
        result.values.assign(n, 0.0);
        result.accepted = true;
        return result;
    }
    if (!(fstd > 0.0))
        throw DataError("generate_correlated_noise: constant forecast series");

    const auto R = autocorr(forecast, cfg.max_order);
    Rng rng(cfg.seed);
    double best_corr = -2.0;
    std::vector<double> best_values;
    int best_order = 0;
    int attempts = 0;
    bool any_filter = false;

    for (int order = 1; order <= cfg.max_order; ++order) {
        LpFilter filter;
        try {
            filter = lp_coefficients(R, order);
        } catch (const SingularityError&) {
            continue; // try the next order
        }
        any_filter = true;
        for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
            ++attempts;
            const auto white = rng.normal_vector(n, 0.0, sigma);
            auto shaped = ar_filter(filter.coefficients, white);
            if (!all_finite(shaped)) continue; // unstable draw: retry
            const double shaped_std = sample_std(shaped);
            if (!(shaped_std > 0.0)) continue;
            for (double& v : shaped) v *= sigma / shaped_std;
            const double corr = pearson(shaped, forecast);
            if (corr > best_corr) {
                best_corr = corr;
                best_values = shaped;
                best_order = order;
            }
            if (corr >= cfg.tau) {
                result.values = std::move(shaped);
                result.achieved_correlation = corr;
                result.order_used = order;
                result.accepted = true;
                result.attempts = attempts;
                return result;
            }
        }
    }

    if (!any_filter)
        throw SingularityError("generate_correlated_noise: every LP order was singular");
    if (best_values.empty())
        throw DataError("generate_correlated_noise: no usable noise draw");

    result.values = std::move(best_values);
    result.achieved_correlation = best_corr;
    result.order_used = best_order;
    result.accepted = false;
    result.attempts = attempts;
    return result;
}

std::vector<double> add_noise(std::span<const double> x, std::span<const double> z) {
    if (x.size() != z.size())
        throw DataError("add_noise: length mismatch (" + std::to_string(x.size()) + " vs " +
                        std::to_string(z.size()) + ")");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + z[i];
    return out;
}

} // namespace tsobf
