#pragma once

#include "tsobf/data.hpp"
#include "tsobf/stationarity.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tsobf {

enum class ModelKind { Ses, HoltDamped, SeasonalAdditive };

const char* to_string(ModelKind k);
ModelKind model_kind_from_string(std::string_view s);

/// Per-cluster forecaster: an exponential-smoothing model chosen by AIC from
/// {SES, damped Holt, additive seasonal}, plus the Box-Cox parameters the
/// training series was stabilized with.
struct ForecastModel {
    int cluster_label = -1;
    std::string feature_name;
    ModelKind kind = ModelKind::Ses;

    double alpha = 0.0;
    double beta = 0.0;  // damped Holt only
    double phi = 0.0;   // damped Holt only, in (0.8, 1]
    double gamma = 0.0; // seasonal only

    int season_length = 0; // 0 for non-seasonal kinds
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> seasonal; // one value per season slot
    int phase = 0;                // season slot of the next forecast step

    BoxCoxParam boxcox;

    double fit_sse = 0.0;
    int fit_n = 0;      // one-step errors accumulated during fitting
    int fit_params = 0; // smoothing parameters
    double fit_aic = 0.0;
};

/// Concatenates cluster members in (session, gesture) order into one periodic
/// training series. All members must share the same length.
std::vector<double> build_training_series(const std::vector<const GestureSeries*>& members);

/// Fits the three candidates by one-step-ahead SSE (Nelder-Mead, 3 seeded
/// starts each) and keeps the lowest-AIC one, AIC = n ln(SSE/n) + 2p. The
/// seasonal candidate requires length >= 2 * season_length; the others
/// require length >= 8.
ForecastModel fit_forecaster(std::span<const double> y, int season_length, std::uint64_t seed);

/// Deterministic h-step-ahead point forecasts from the stored state.
std::vector<double> forecast(const ForecastModel& model, int horizon);

} // namespace tsobf
