#pragma once

#include "tsobf/data.hpp"
#include "tsobf/metrics.hpp"
#include "tsobf/noise.hpp"
#include "tsobf/store.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace tsobf {

/// Everything a training or evaluation run needs, echoed into every store
/// and report it produces.
struct ObfuscationConfig {
    NoiseConfig noise;
    double train_fraction = 0.8;
    double percentile = 90.0; // sampling-rate percentile
    double similarity_threshold = 0.1;
    int parallelism = 1;
    std::optional<int> cluster_count; // k when training labels are absent
    bool train_public = true;         // also train the pooled fallback user
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::ordered_json to_json() const;
};

/// Per-gesture record of what the obfuscation run did.
struct Diagnostics {
    int cluster_label = -1;
    double lambda_train = 1.0;   // Box-Cox lambda stored with the model
    double lambda_runtime = 1.0; // lambda re-estimated on the incoming series
    bool runtime_boxcox_applied = false;
    bool used_public_models = false;
    int order_used = 0;
    double achieved_correlation = 0.0;
    bool noise_accepted = false;
    int attempts = 0;
    double elapsed_seconds = 0.0;
    std::vector<double> forecast; // typical gesture, normalized scale
    std::vector<double> noise;    // delivered correlated noise
};

struct PreprocessResult {
    Dataset train;
    Dataset test;
    FeatureExtrema extrema;
    std::map<std::string, int> target_length;
    std::vector<std::string> warnings;
};

/// ingest output -> fixed sampling rate -> split -> min-max normalization
/// with training-split extrema applied to both splits.
PreprocessResult preprocess(const Dataset& raw, const ObfuscationConfig& cfg);

/// Re-applies a store's preprocessing (per-feature target length, training
/// extrema) to an externally supplied raw dataset.
Dataset preprocess_with_store(const Dataset& raw, const ModelStore& store);

/// Offline training over every (user, feature) cell: DTW clustering, then
/// per cluster a stabilized concatenated series and a fitted forecaster.
/// Failing cells are recorded in the store and do not abort the others.
ModelStore train_offline(const PreprocessResult& pre, const ObfuscationConfig& cfg);

/// Run-time obfuscation of one gesture series: cluster assignment, runtime
/// stability check, model forecast, inverse transform, correlated noise,
/// addition. Deterministic in (gesture identity, cfg.seed).
GestureSeries obfuscate_gesture(const GestureSeries& g, const ModelStore& store,
                                const ObfuscationConfig& cfg, Diagnostics* diag = nullptr);

struct GestureEvalRecord {
    const GestureSeries* original = nullptr;
    GestureSeries obfuscated;
    Diagnostics diag;
};

/// Obfuscates every series in the test split, in deterministic order.
std::vector<GestureEvalRecord> obfuscate_dataset(const Dataset& test, const ModelStore& store,
                                                 const ObfuscationConfig& cfg);

/// The three metric families over the original / forecasted / obfuscated
/// variants of the evaluated gestures.
MetricsReport compute_metrics(const std::vector<GestureEvalRecord>& records,
                              const ObfuscationConfig& cfg, const std::string& dataset_name);

MetricsReport run_evaluation_single(const Dataset& test, const ModelStore& store,
                                    const ObfuscationConfig& cfg,
                                    const std::string& dataset_name,
                                    std::vector<GestureEvalRecord>* capture = nullptr);

std::vector<MetricsReport> run_evaluation(const Dataset& test, const ModelStore& store,
                                          const std::vector<ObfuscationConfig>& grid,
                                          const std::string& dataset_name);

/// Retrains on the union of the store's training data and new_data and
/// returns the refreshed store (same preprocessing parameters).
ModelStore update_models(const Dataset& new_data, const ModelStore& store,
                         const ObfuscationConfig& cfg);

/// The two standard experiment settings: every noise scale at tau = 0.5,
/// then tau in {0.1..0.5} at scale 2*std. Returns 10 configurations with a
/// short tag each.
std::vector<std::pair<std::string, ObfuscationConfig>>
sweep_grid(const ObfuscationConfig& base);

} // namespace tsobf
