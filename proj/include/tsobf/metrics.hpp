#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace tsobf {

/// Mean absolute error between equal-length series.
double mae(std::span<const double> a, std::span<const double> b);

/// MAE between two series of the same user from different sessions; higher
/// means the sessions are harder to link.
inline double untrackability(std::span<const double> a, std::span<const double> b) {
    return mae(a, b);
}

/// MAE between the original and obfuscated series on the normalized scale.
inline double utility_loss(std::span<const double> original,
                           std::span<const double> obfuscated) {
    return mae(original, obfuscated);
}

/// Information gain log2(n / k) where k counts population series whose MAE to
/// the target is <= similarity_threshold; the target itself counts, so the
/// result lies in [0, log2 n]. Lower values mean better hiding.
double indistinguishability(std::span<const double> target,
                            const std::vector<std::vector<double>>& population,
                            double similarity_threshold);

/// One gesture's contribution to a user's cross-session comparison.
struct SessionGesture {
    std::string session_id;
    int cluster_label = 0;
    std::vector<double> values;
};

/// Mean pair MAE over every unordered session pair, pairing gestures of the
/// same cluster label across the two sessions. Empty when the user has no
/// comparable pair (fewer than two sessions or no shared label).
std::optional<double> per_user_untrackability(const std::vector<SessionGesture>& gestures);

/// Empirical CDF sampled at `points` equally spaced positions over
/// [min, max]. A single distinct value yields the single point (v, 1).
std::vector<std::pair<double, double>> build_cdf(std::vector<double> values, int points);

/// Evaluation output for one configuration. Per-user maps are keyed first by
/// variant ("original", "forecasted", "obfuscated").
struct MetricsReport {
    std::string dataset_name;
    std::map<std::string, std::map<std::string, double>> untrackability_by_variant;
    std::map<std::string, std::map<std::string, double>> indistinguishability_by_variant;
    std::map<std::string, std::map<std::string, double>> utility_by_variant;
    std::vector<double> timing_seconds; // per-gesture obfuscation durations
    nlohmann::ordered_json config_echo;

    const std::map<std::string, double>& per_user_untrackability() const {
        return untrackability_by_variant.at("obfuscated");
    }
    const std::map<std::string, double>& per_user_indistinguishability() const {
        return indistinguishability_by_variant.at("obfuscated");
    }
    const std::map<std::string, double>& per_user_utility() const {
        return utility_by_variant.at("obfuscated");
    }

    /// Serialized form; timing samples are wall-clock and therefore excluded
    /// unless include_timing is set.
    nlohmann::ordered_json to_json(bool include_timing = false) const;
};

} // namespace tsobf
