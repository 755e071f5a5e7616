#include "tsobf/store.hpp"

#include "tsobf/errors.hpp"
#include "tsobf/util.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace tsobf {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const StoredModels& ModelStore::models_for(const std::string& user,
                                           const std::string& feature) const {
    auto ensure = [&](const std::string& u) -> const StoredModels* {
        auto uit = models.find(u);
        if (uit == models.end()) return nullptr;
        auto fit = uit->second.find(feature);
        return fit == uit->second.end() ? nullptr : &fit->second;
    };
    if (const auto* m = ensure(user)) return *m;
    if (const auto* m = ensure(kPublicUser)) return *m;
    throw DataError("no trained models for user '" + user + "', feature '" + feature +
                    "' and no public fallback");
}

namespace {

/// Filesystem-safe encoding of identifiers: alnum, '-', '_' pass through,
/// anything else becomes %XX.
std::string sanitize(const std::string& id) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(id.size());
    for (unsigned char c : id) {
        if (std::isalnum(c) || c == '-' || c == '_') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xf]);
        }
    }
    return out.empty() ? std::string("_") : out;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw SchemaError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

json boxcox_to_json(const BoxCoxParam& p) {
    return json{{"lambda", p.lambda}, {"shift", p.shift}, {"applied", p.applied}};
}

BoxCoxParam boxcox_from_json(const json& j) {
    BoxCoxParam p;
    p.lambda = j.at("lambda").get<double>();
    p.shift = j.at("shift").get<double>();
    p.applied = j.at("applied").get<bool>();
    return p;
}

} // namespace

json cluster_model_to_json(const ClusterModel& m) {
    json j;
    j["format_version"] = 1;
    j["feature_name"] = m.feature_name;
    j["distance"] = m.distance_kind;
    json clusters = json::array();
    for (const auto& c : m.clusters)
        clusters.push_back(json{{"label", c.label}, {"centroid", c.centroid}});
    j["clusters"] = std::move(clusters);
    if (m.purity >= 0.0) j["purity"] = m.purity;
    return j;
}

ClusterModel cluster_model_from_json(const json& j) {
    ClusterModel m;
    m.feature_name = j.at("feature_name").get<std::string>();
    m.distance_kind = j.at("distance").get<std::string>();
    for (const auto& c : j.at("clusters")) {
        Cluster cl;
        cl.label = c.at("label").get<int>();
        cl.centroid = c.at("centroid").get<std::vector<double>>();
        if (cl.centroid.empty() || !all_finite(cl.centroid))
            throw SchemaError("cluster centroid empty or non-finite");
        m.clusters.push_back(std::move(cl));
    }
    if (m.clusters.empty()) throw SchemaError("cluster model has no clusters");
    if (j.contains("purity")) m.purity = j.at("purity").get<double>();
    return m;
}

json forecast_model_to_json(const ForecastModel& m) {
    json j;
    j["format_version"] = 1;
    j["cluster_label"] = m.cluster_label;
    j["feature_name"] = m.feature_name;
    j["model_kind"] = to_string(m.kind);
    json params;
    params["alpha"] = m.alpha;
    if (m.kind == ModelKind::HoltDamped) {
        params["beta"] = m.beta;
        params["phi"] = m.phi;
    }
    if (m.kind == ModelKind::SeasonalAdditive) params["gamma"] = m.gamma;
    j["parameters"] = std::move(params);
    j["season_length"] = m.season_length;
    json state;
    state["level"] = m.level;
    state["trend"] = m.trend;
    state["seasonal"] = m.seasonal;
    state["phase"] = m.phase;
    j["state"] = std::move(state);
    j["boxcox"] = boxcox_to_json(m.boxcox);
    j["fit"] = json{{"sse", m.fit_sse},
                    {"n_eff", m.fit_n},
                    {"param_count", m.fit_params},
                    {"aic", m.fit_aic}};
    return j;
}

ForecastModel forecast_model_from_json(const json& j) {
    ForecastModel m;
    m.cluster_label = j.at("cluster_label").get<int>();
    m.feature_name = j.at("feature_name").get<std::string>();
    m.kind = model_kind_from_string(j.at("model_kind").get<std::string>());
    const auto& params = j.at("parameters");
    m.alpha = params.at("alpha").get<double>();
    if (m.kind == ModelKind::HoltDamped) {
        m.beta = params.at("beta").get<double>();
        m.phi = params.at("phi").get<double>();
    }
    if (m.kind == ModelKind::SeasonalAdditive) m.gamma = params.at("gamma").get<double>();
    m.season_length = j.at("season_length").get<int>();
    const auto& state = j.at("state");
    m.level = state.at("level").get<double>();
    m.trend = state.at("trend").get<double>();
    m.seasonal = state.at("seasonal").get<std::vector<double>>();
    m.phase = state.at("phase").get<int>();
    m.boxcox = boxcox_from_json(j.at("boxcox"));
    const auto& fit = j.at("fit");
    m.fit_sse = fit.at("sse").get<double>();
    m.fit_n = fit.at("n_eff").get<int>();
    m.fit_params = fit.at("param_count").get<int>();
    m.fit_aic = fit.at("aic").get<double>();
    return m;
}

void save_store(const ModelStore& store, const fs::path& dir, bool replace_existing) {
    if (fs::exists(dir) && !replace_existing)
        throw IoError("store path already exists: " + dir.string());

    // Assemble under a temporary sibling, then rename into place.
    fs::path tmp = dir;
    tmp += ".tmp";
    std::error_code ec;
    fs::remove_all(tmp, ec);
    fs::create_directories(tmp / "models");

    json manifest;
    manifest["format_version"] = store.format_version;
    manifest["features"] = store.feature_names;
    json extrema;
    for (const auto& [f, mm] : store.extrema)
        extrema[f] = json{{"min", mm.min}, {"max", mm.max}};
    manifest["extrema"] = std::move(extrema);
    manifest["target_length"] = store.target_length;
    manifest["config"] = store.config_echo;

    json index;
    for (const auto& [user, features] : store.models) {
        json per_user;
        for (const auto& [feature, sm] : features) {
            const fs::path rel = fs::path("models") / sanitize(user) / sanitize(feature);
            fs::create_directories(tmp / rel);
            write_text_file(tmp / rel / "clusters.json",
                            cluster_model_to_json(sm.clusters).dump(2) + "\n");
            json entry;
            entry["clusters"] = (rel / "clusters.json").generic_string();
            json forecasts;
            for (const auto& [label, fm] : sm.forecasts) {
                const std::string fname = "forecast_" + std::to_string(label) + ".json";
                write_text_file(tmp / rel / fname, forecast_model_to_json(fm).dump(2) + "\n");
                forecasts[std::to_string(label)] = (rel / fname).generic_string();
            }
            entry["forecasts"] = std::move(forecasts);
            per_user[feature] = std::move(entry);
        }
        index[user] = std::move(per_user);
    }
    manifest["models"] = std::move(index);

    json failures = json::array();
    for (const auto& f : store.failures)
        failures.push_back(json{{"user", f.user},
                                {"feature", f.feature},
                                {"cluster_label", f.cluster_label},
                                {"error", f.error}});
    manifest["cell_failures"] = std::move(failures);

    write_text_file(tmp / "manifest.json", manifest.dump(2) + "\n");
    write_csv(tmp / "train.csv", store.train_data);
    write_csv(tmp / "test.csv", store.test_data);

    if (fs::exists(dir)) {
        fs::path bak = dir;
        bak += ".bak";
        fs::remove_all(bak, ec);
        fs::rename(dir, bak);
    }
    fs::rename(tmp, dir);
}

ModelStore load_store(const fs::path& dir) {
    const json manifest = read_json_file(dir / "manifest.json");
    ModelStore store;
    try {
        store.format_version = manifest.at("format_version").get<int>();
        if (store.format_version != 1)
            throw SchemaError("unsupported store format_version " +
                              std::to_string(store.format_version));
        store.feature_names = manifest.at("features").get<std::vector<std::string>>();
        for (const auto& [f, mm] : manifest.at("extrema").items())
            store.extrema[f] = MinMax{mm.at("min").get<double>(), mm.at("max").get<double>()};
        store.target_length =
            manifest.at("target_length").get<std::map<std::string, int>>();
        store.config_echo = manifest.at("config");

        for (const auto& [user, features] : manifest.at("models").items()) {
            for (const auto& [feature, entry] : features.items()) {
                StoredModels sm;
                sm.clusters = cluster_model_from_json(
                    read_json_file(dir / entry.at("clusters").get<std::string>()));
                for (const auto& [label, rel] : entry.at("forecasts").items()) {
                    auto fm = forecast_model_from_json(
                        read_json_file(dir / rel.get<std::string>()));
                    sm.forecasts.emplace(std::stoi(label), std::move(fm));
                }
                store.models[user][feature] = std::move(sm);
            }
        }
        for (const auto& f : manifest.at("cell_failures")) {
            store.failures.push_back(CellFailure{f.at("user").get<std::string>(),
                                                 f.at("feature").get<std::string>(),
                                                 f.at("cluster_label").get<int>(),
                                                 f.at("error").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw SchemaError("malformed store manifest in " + dir.string() + ": " + e.what());
    }
    store.train_data = ingest_csv(dir / "train.csv");
    store.train_data.split_tag = SplitTag::Train;
    store.test_data = ingest_csv(dir / "test.csv");
    store.test_data.split_tag = SplitTag::Test;

    // Referential integrity: every forecast label must exist in its cluster model.
    for (const auto& [user, features] : store.models) {
        for (const auto& [feature, sm] : features) {
            for (const auto& [label, fm] : sm.forecasts) {
                const bool known = std::any_of(
                    sm.clusters.clusters.begin(), sm.clusters.clusters.end(),
                    [&](const Cluster& c) { return c.label == label; });
                if (!known)
                    throw SchemaError("store " + dir.string() + ": forecast model for user '" +
                                      user + "', feature '" + feature + "' references cluster " +
                                      std::to_string(label) + " missing from the cluster model");
            }
        }
    }
    return store;
}

} // namespace tsobf
