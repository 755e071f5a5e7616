#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tsobf {

/// One univariate time-series: a single raw feature of a single gesture
/// instance, with its owning user/session identity.
struct GestureSeries {
    std::string user_id;
    std::string session_id;
    long gesture_id = 0;
    std::string feature_name;
    std::string label; // gesture type; empty when unlabeled
    std::vector<double> values;

    std::size_t sample_count() const { return values.size(); }
};

enum class SplitTag { Unsplit, Train, Test };

struct Dataset {
    std::vector<GestureSeries> series;
    std::vector<std::string> feature_names;
    SplitTag split_tag = SplitTag::Unsplit;

    bool empty() const { return series.empty(); }
    /// Distinct user ids in first-appearance-independent (sorted) order.
    std::vector<std::string> users() const;
    /// Number of distinct (user, session, gesture) instances.
    std::size_t gesture_count() const;
};

/// Column mapping for CSV ingestion. feature_cols empty means "every column
/// not otherwise claimed, in header order".
struct CsvSchema {
    std::string user_col = "user_id";
    std::string session_col = "session_id";
    std::string gesture_col = "gesture_id";
    std::string time_col = "t";
    std::string label_col = "label"; // optional column; absent is fine
    std::vector<std::string> feature_cols;
};

/// Reads a gesture dataset from CSV. Rows with any non-finite or empty
/// feature value are dropped; gestures left with fewer than 5 points are
/// dropped entirely. Throws SchemaError on a malformed header, DataError when
/// nothing usable remains.
Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Writes the canonical CSV form (header: user_id,session_id,gesture_id,
/// label,t,<features...>). Doubles are shortest-round-trip formatted.
void write_csv(const std::filesystem::path& path, const Dataset& d);

/// Per feature group, resamples every series to the nearest-rank pct-th
/// percentile of observed lengths: longer series are truncated, shorter ones
/// linearly interpolated.
Dataset fix_sampling_rate(const Dataset& d, double pct = 90.0);

struct MinMax {
    double min = 0.0;
    double max = 0.0;
};
using FeatureExtrema = std::map<std::string, MinMax>;

/// Extrema per feature. Throws DataError naming the feature when max == min.
FeatureExtrema feature_extrema(const Dataset& d);

/// x -> (x - min) / (max - min). Values outside the extrema are not clipped.
Dataset apply_normalization(const Dataset& d, const FeatureExtrema& extrema);
Dataset undo_normalization(const Dataset& d, const FeatureExtrema& extrema);
std::vector<double> denormalize_values(std::span<const double> values, const MinMax& mm);

/// Convenience form computing extrema from d itself (training split usage).
std::pair<Dataset, FeatureExtrema> normalize_minmax(const Dataset& d);

/// Splits at gesture-instance granularity, stratified per user, deterministic
/// under the seed. Users with a single gesture contribute it to the training
/// split and a warning is recorded. train_fraction must lie in (0, 1).
std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double train_fraction,
                                             std::uint64_t seed,
                                             std::vector<std::string>* warnings = nullptr);

} // namespace tsobf
