#pragma once

#include "tsobf/data.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tsobf {

/// Classic dynamic time warping distance: absolute-difference local cost,
/// full window, boundary-to-boundary alignment.
double dtw_distance(std::span<const double> a, std::span<const double> b);

struct Cluster {
    int label = 0;
    std::vector<double> centroid; // the medoid series
};

struct ClusterModel {
    std::string feature_name;
    std::string distance_kind = "dtw";
    std::vector<Cluster> clusters; // ascending label order
    /// Fraction of members whose training label matches their cluster's
    /// majority label; negative when training labels were unavailable.
    double purity = -1.0;
};

/// k-medoids (PAM swap local search) under dtw_distance over all series of
/// one feature. k defaults to the number of distinct training labels when
/// labels are present. assignments_out, when given, receives the final
/// cluster label per input series; objective_trace records the objective
/// after initialization and after each accepted swap.
ClusterModel train_clusters(const std::vector<const GestureSeries*>& series,
                            std::optional<int> k, std::uint64_t seed,
                            const std::string& feature_name,
                            std::vector<int>* assignments_out = nullptr,
                            std::vector<double>* objective_trace = nullptr);

ClusterModel train_clusters(const Dataset& train, const std::string& feature_name,
                            std::optional<int> k = {}, std::uint64_t seed = 0);

/// Label of the centroid nearest to g under DTW; ties break toward the
/// lowest label.
int assign_cluster(const ClusterModel& model, std::span<const double> g);

} // namespace tsobf
