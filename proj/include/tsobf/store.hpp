#pragma once

#include "tsobf/cluster.hpp"
#include "tsobf/data.hpp"
#include "tsobf/forecast.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace tsobf {

/// Models trained for one (user, feature) cell.
struct StoredModels {
    ClusterModel clusters;
    std::map<int, ForecastModel> forecasts; // keyed by cluster label
};

/// Pseudo-user holding models pooled across every training user; serves
/// users that never appeared in training.
inline constexpr const char* kPublicUser = "__public__";

struct CellFailure {
    std::string user;
    std::string feature;
    int cluster_label = -1; // -1: the whole (user, feature) cell failed
    std::string error;
};

/// The persisted outcome of offline training: per-user cluster and forecast
/// models, the preprocessing parameters needed to replay them, and the
/// train/test data they were derived from.
struct ModelStore {
    int format_version = 1;
    std::vector<std::string> feature_names;
    FeatureExtrema extrema;
    std::map<std::string, int> target_length; // per feature
    std::map<std::string, std::map<std::string, StoredModels>> models; // user -> feature
    std::vector<CellFailure> failures;
    nlohmann::ordered_json config_echo;
    Dataset train_data; // normalized; retained so models can be refreshed
    Dataset test_data;  // normalized held-out split

    bool has_user(const std::string& user) const { return models.count(user) != 0; }
    const StoredModels& models_for(const std::string& user, const std::string& feature) const;
};

/// Writes the store as a directory: manifest.json, train.csv, test.csv and
/// one JSON document per model. The directory is assembled under a temporary
/// name and renamed into place; with replace_existing an existing store is
/// kept as "<dir>.bak".
void save_store(const ModelStore& store, const std::filesystem::path& dir,
                bool replace_existing = false);

ModelStore load_store(const std::filesystem::path& dir);

nlohmann::ordered_json cluster_model_to_json(const ClusterModel& m);
ClusterModel cluster_model_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json forecast_model_to_json(const ForecastModel& m);
ForecastModel forecast_model_from_json(const nlohmann::ordered_json& j);

} // namespace tsobf
