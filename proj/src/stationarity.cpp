#include "tsobf/stationarity.hpp"

#include "tsobf/errors.hpp"
#include "tsobf/util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsobf {

namespace {

constexpr double kLambdaZeroEps = 1e-12;

// MacKinnon (2010) response surface, constant-only regression, 5% level.
constexpr double kMacKinnon5[4] = {-2.86154, -2.8903, -4.234, -40.040};

double mackinnon_crit_5pct(int nobs) {
    const double t = static_cast<double>(nobs);
    return kMacKinnon5[0] + kMacKinnon5[1] / t + kMacKinnon5[2] / (t * t) +
           kMacKinnon5[3] / (t * t * t);
}

} // namespace

AdfResult adf_test(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 12) throw DataError("adf_test: need at least 12 observations, got " + std::to_string(n));
    if (variance(x) <= 0.0) throw DataError("adf_test: constant series");

    int p = static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    p = std::min(p, static_cast<int>((n - 4) / 2)); // keep dof positive

    // Regression: dy_t = beta * y_{t-1} + sum_j gamma_j dy_{t-j} + alpha.
    std::vector<double> dy(n - 1);
    for (std::size_t t = 1; t < n; ++t) dy[t - 1] = x[t] - x[t - 1];

    const int rows = static_cast<int>(dy.size()) - p;
    const int cols = p + 2;
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd z(rows);
    for (int r = 0; r < rows; ++r) {
        const int t = p + r; // index into dy
        z(r) = dy[t];
        X(r, 0) = x[t]; // y_{t-1} in original indexing
        for (int j = 1; j <= p; ++j) X(r, j) = dy[t - j];
        X(r, cols - 1) = 1.0;
    }

    const Eigen::MatrixXd xtx = X.transpose() * X;
    const Eigen::VectorXd xtz = X.transpose() * z;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    if (ldlt.info() != Eigen::Success)
        throw DataError("adf_test: singular regression (degenerate series)");
    const Eigen::VectorXd beta = ldlt.solve(xtz);
    const Eigen::VectorXd resid = z - X * beta;

    const int dof = rows - cols;
    if (dof <= 0) throw DataError("adf_test: series too short for the lag order");
    const double sigma2 = resid.squaredNorm() / dof;
    const Eigen::MatrixXd xtx_inv =
        ldlt.solve(Eigen::MatrixXd::Identity(cols, cols));
    const double se0 = std::sqrt(sigma2 * xtx_inv(0, 0));
    if (!(se0 > 0.0) || !std::isfinite(se0))
        throw DataError("adf_test: degenerate regression (zero standard error)");

    AdfResult res;
    res.statistic = beta(0) / se0;
    res.critical_value_5pct = mackinnon_crit_5pct(rows);
    res.stationary = res.statistic < res.critical_value_5pct;
    res.lag_order = p;
    return res;
}

std::vector<double> box_cox(std::span<const double> y, double lambda) {
    std::vector<double> out(y.size());
    const bool is_log = std::abs(lambda) < kLambdaZeroEps;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0))
            throw DataError("box_cox: non-positive value " + format_double(y[i]) + " at index " +
                            std::to_string(i));
        out[i] = is_log ? std::log(y[i]) : (std::pow(y[i], lambda) - 1.0) / lambda;
    }
    return out;
}

std::vector<double> inverse_box_cox(std::span<const double> z, double lambda) {
    std::vector<double> out(z.size());
    const bool is_log = std::abs(lambda) < kLambdaZeroEps;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (is_log) {
            out[i] = std::exp(z[i]);
        } else {
            const double base = lambda * z[i] + 1.0;
            if (!(base > 0.0))
                throw DataError("inverse_box_cox: lambda*z + 1 <= 0 at index " +
                                std::to_string(i));
            out[i] = std::pow(base, 1.0 / lambda);
        }
    }
    return out;
}

double select_lambda(std::span<const double> y) {
    const std::size_t n = y.size();
    if (n < 8) throw DataError("select_lambda: need at least 8 observations");
    double log_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(y[i] > 0.0)) throw DataError("select_lambda: non-positive value at index " +
                                           std::to_string(i));
        log_sum += std::log(y[i]);
    }

    // Profile log-likelihood: -(n/2) ln sigma2_mle(z) + (lambda-1) sum ln y.
    double best_lambda = 1.0;
    double best_llf = -std::numeric_limits<double>::infinity();
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100; ++i) {
        const double lam = (i - 50) / 10.0;
        const auto z = box_cox(y, lam);
        const double s2 = variance(z);
        double llf;
        if (s2 <= 0.0)
            llf = std::numeric_limits<double>::infinity(); // exact fit: all lambdas tie
        else
            llf = -0.5 * static_cast<double>(n) * std::log(s2) + (lam - 1.0) * log_sum;
        const double dist = std::abs(lam - 1.0);
        if (llf > best_llf || (llf == best_llf && dist < best_dist)) {
            best_llf = llf;
            best_lambda = lam;
            best_dist = dist;
        }
    }
    return best_lambda;
}

std::pair<std::vector<double>, BoxCoxParam> stabilize(std::span<const double> x) {
    if (x.empty()) throw DataError("stabilize: empty series");
    const AdfResult adf = adf_test(x);
    if (adf.stationary) return {{x.begin(), x.end()}, BoxCoxParam{}};

    BoxCoxParam param;
    param.applied = true;
    const double lo = *std::min_element(x.begin(), x.end());
    param.shift = lo <= 0.0 ? 1.0 - lo : 0.0;
    std::vector<double> shifted(x.begin(), x.end());
    for (double& v : shifted) v += param.shift;
    param.lambda = select_lambda(shifted);
    return {box_cox(shifted, param.lambda), param};
}

std::vector<double> destabilize(std::span<const double> z, const BoxCoxParam& param) {
    if (!param.applied) return {z.begin(), z.end()};
    auto out = inverse_box_cox(z, param.lambda);
    for (double& v : out) v -= param.shift;
    return out;
}

} // namespace tsobf
