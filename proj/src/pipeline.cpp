#include "tsobf/pipeline.hpp"

#include "tsobf/errors.hpp"
#include "tsobf/rng.hpp"
#include "tsobf/stationarity.hpp"
#include "tsobf/util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

namespace tsobf {

using json = nlohmann::ordered_json;

void ObfuscationConfig::validate() const {
    noise.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw DataError("train fraction must lie in (0, 1)");
    if (!(percentile > 0.0 && percentile <= 100.0))
        throw DataError("sampling-rate percentile must lie in (0, 100]");
    if (!(similarity_threshold > 0.0))
        throw DataError("similarity threshold must be positive");
    if (parallelism < 1) throw DataError("parallelism must be >= 1");
    if (cluster_count && *cluster_count < 1) throw DataError("cluster count must be >= 1");
}

json ObfuscationConfig::to_json() const {
    json j;
    j["noise_scale"] = to_string(noise.scale_rule);
    j["corr_threshold"] = noise.tau;
    j["max_order"] = noise.max_order;
    j["max_retries"] = noise.max_retries;
    j["train_fraction"] = train_fraction;
    j["percentile"] = percentile;
    j["similarity_threshold"] = similarity_threshold;
    j["parallelism"] = parallelism;
    if (cluster_count) j["cluster_count"] = *cluster_count;
    j["train_public"] = train_public;
    j["seed"] = seed;
    return j;
}

PreprocessResult preprocess(const Dataset& raw, const ObfuscationConfig& cfg) {
    PreprocessResult out;
    const Dataset fixed = fix_sampling_rate(raw, cfg.percentile);
    for (const auto& f : fixed.feature_names) {
        // All series of a feature share one length after rate fixing.
        for (const auto& s : fixed.series) {
            if (s.feature_name == f) {
                out.target_length[f] = static_cast<int>(s.values.size());
                break;
            }
        }
    }
    auto [train, test] = split_train_test(fixed, cfg.train_fraction, cfg.seed, &out.warnings);
    out.extrema = feature_extrema(train);
    out.train = apply_normalization(train, out.extrema);
    out.test = apply_normalization(test, out.extrema);
    return out;
}

Dataset preprocess_with_store(const Dataset& raw, const ModelStore& store) {
    Dataset fixed = raw;
    for (auto& s : fixed.series) {
        auto it = store.target_length.find(s.feature_name);
        if (it == store.target_length.end())
            throw DataError("store has no target length for feature '" + s.feature_name + "'");
        const auto L = static_cast<std::size_t>(it->second);
        if (s.values.size() > L)
            s.values.resize(L);
        else if (s.values.size() < L)
            s.values = interpolate_to_length(s.values, L);
    }
    return apply_normalization(fixed, store.extrema);
}

namespace {

struct Cell {
    std::string user;
    std::string feature;
    std::vector<const GestureSeries*> members;
};

void train_cell(const Cell& cell, const ObfuscationConfig& cfg, int target_len,
                StoredModels& out, std::vector<CellFailure>& failures) {
    std::vector<int> assignments;
    try {
        out.clusters = train_clusters(cell.members, cfg.cluster_count,
                                      derive_seed(cfg.seed, {"cluster", cell.user, cell.feature}),
                                      cell.feature, &assignments);
    } catch (const Error& e) {
        failures.push_back({cell.user, cell.feature, -1, e.what()});
        return;
    }

    std::map<int, std::vector<const GestureSeries*>> by_label;
    for (std::size_t i = 0; i < cell.members.size(); ++i)
        by_label[assignments[i]].push_back(cell.members[i]);

    for (const auto& [label, members] : by_label) {
        try {
            const auto series = build_training_series(members);
            auto [stable, bc] = stabilize(series);
            auto model = fit_forecaster(
                stable, target_len,
                derive_seed(cfg.seed,
                            {"fit", cell.user, cell.feature, std::to_string(label)}));
            model.cluster_label = label;
            model.feature_name = cell.feature;
            model.boxcox = bc;
            out.forecasts.emplace(label, std::move(model));
        } catch (const Error& e) {
            failures.push_back({cell.user, cell.feature, label, e.what()});
        }
    }
}

} // namespace

ModelStore train_offline(const PreprocessResult& pre, const ObfuscationConfig& cfg) {
    if (pre.train.empty()) throw DataError("train_offline: empty training split");

    std::vector<Cell> cells;
    {
        std::map<std::string, std::map<std::string, std::vector<const GestureSeries*>>> grouped;
        for (const auto& s : pre.train.series) grouped[s.user_id][s.feature_name].push_back(&s);
        for (auto& [user, by_feature] : grouped)
            for (auto& [feature, members] : by_feature)
                cells.push_back({user, feature, std::move(members)});
        if (cfg.train_public) {
            std::map<std::string, std::vector<const GestureSeries*>> pooled;
            for (const auto& s : pre.train.series) pooled[s.feature_name].push_back(&s);
            for (auto& [feature, members] : pooled)
                cells.push_back({kPublicUser, feature, std::move(members)});
        }
    }

    std::vector<StoredModels> results(cells.size());
    std::vector<std::vector<CellFailure>> failures(cells.size());
    parallel_for(cells.size(), cfg.parallelism, [&](std::size_t i) {
        train_cell(cells[i], cfg, pre.target_length.at(cells[i].feature), results[i],
                   failures[i]);
    });

    ModelStore store;
    store.feature_names = pre.train.feature_names;
    store.extrema = pre.extrema;
    store.target_length = pre.target_length;
    store.config_echo = cfg.to_json();
    store.train_data = pre.train;
    store.test_data = pre.test;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (auto& f : failures[i]) store.failures.push_back(std::move(f));
        if (!results[i].clusters.clusters.empty())
            store.models[cells[i].user][cells[i].feature] = std::move(results[i]);
    }
    if (store.models.empty())
        throw FitError("train_offline: every training cell failed (" +
                       std::to_string(store.failures.size()) + " failures)");
    return store;
}

GestureSeries obfuscate_gesture(const GestureSeries& g, const ModelStore& store,
                                const ObfuscationConfig& cfg, Diagnostics* diag_out) {
    const auto t0 = std::chrono::steady_clock::now();
    Diagnostics diag;

    const StoredModels& sm = store.models_for(g.user_id, g.feature_name);
    diag.used_public_models =
        !(store.models.count(g.user_id) && store.models.at(g.user_id).count(g.feature_name));

    diag.cluster_label = assign_cluster(sm.clusters, g.values);
    auto fit = sm.forecasts.find(diag.cluster_label);
    if (fit == sm.forecasts.end())
        throw DataError("no forecast model for user '" + g.user_id + "', feature '" +
                        g.feature_name + "', cluster " + std::to_string(diag.cluster_label));
    const ForecastModel& model = fit->second;
    diag.lambda_train = model.boxcox.applied ? model.boxcox.lambda : 1.0;

    // Runtime stability check of the incoming series. The re-estimated lambda
    // is recorded next to the training one; the model's own Box-Cox parameters
    // drive the inversion below, since its forecasts live on that scale.
    try {
        const BoxCoxParam bc = stabilize(g.values).second;
        diag.lambda_runtime = bc.applied ? bc.lambda : 1.0;
        diag.runtime_boxcox_applied = bc.applied;
    } catch (const DataError&) {
        diag.lambda_runtime = 1.0; // series too short or constant: skip the check
    }

    const int horizon = static_cast<int>(g.values.size());
    const auto raw_forecast = forecast(model, horizon);
    diag.forecast = destabilize(raw_forecast, model.boxcox);

    NoiseConfig noise_cfg = cfg.noise;
    noise_cfg.seed = derive_seed(cfg.seed, {"noise", g.user_id, g.session_id,
                                            std::to_string(g.gesture_id), g.feature_name});
    const CorrelatedNoise cn = generate_correlated_noise(diag.forecast, noise_cfg);
    diag.noise = cn.values;
    diag.order_used = cn.order_used;
    diag.achieved_correlation = cn.achieved_correlation;
    diag.noise_accepted = cn.accepted;
    diag.attempts = cn.attempts;

    GestureSeries out;
    out.user_id = g.user_id;
    out.session_id = g.session_id;
    out.gesture_id = g.gesture_id;
    out.feature_name = g.feature_name;
    out.values = add_noise(diag.forecast, cn.values);

    diag.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (diag_out) *diag_out = std::move(diag);
    return out;
}

std::vector<GestureEvalRecord> obfuscate_dataset(const Dataset& test, const ModelStore& store,
                                                 const ObfuscationConfig& cfg) {
    std::vector<GestureEvalRecord> records(test.series.size());
    parallel_for(test.series.size(), cfg.parallelism, [&](std::size_t i) {
        records[i].original = &test.series[i];
        records[i].obfuscated = obfuscate_gesture(test.series[i], store, cfg, &records[i].diag);
    });
    return records;
}

namespace {

void fill_untrackability(const std::vector<GestureEvalRecord>& records,
                         const std::string& variant,
                         std::map<std::string, std::map<std::string, double>>& out) {
    std::map<std::string, std::vector<SessionGesture>> per_user;
    for (const auto& r : records) {
        const auto& src = variant == "original"     ? r.original->values
                          : variant == "forecasted" ? r.diag.forecast
                                                    : r.obfuscated.values;
        per_user[r.original->user_id].push_back(
            {r.original->session_id, r.diag.cluster_label, src});
    }
    for (const auto& [user, gestures] : per_user) {
        if (auto v = per_user_untrackability(gestures)) out[variant][user] = *v;
    }
}

void fill_indistinguishability(const std::vector<GestureEvalRecord>& records,
                               const std::string& variant, double threshold,
                               std::map<std::string, std::map<std::string, double>>& out) {
    // Population per feature: every evaluated series of that feature.
    std::map<std::string, std::vector<std::vector<double>>> population;
    std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> owner;
    for (const auto& r : records) {
        const auto& src = variant == "original"     ? r.original->values
                          : variant == "forecasted" ? r.diag.forecast
                                                    : r.obfuscated.values;
        auto& pop = population[r.original->feature_name];
        owner[r.original->feature_name].push_back({r.original->user_id, pop.size()});
        pop.push_back(src);
    }
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& [feature, pop] : population) {
        for (const auto& [user, idx] : owner[feature]) {
            const double ig = indistinguishability(pop[idx], pop, threshold);
            auto& a = acc[user];
            a.first += ig;
            a.second += 1;
        }
    }
    for (const auto& [user, a] : acc) out[variant][user] = a.first / static_cast<double>(a.second);
}

void fill_utility(const std::vector<GestureEvalRecord>& records, const std::string& variant,
                  std::map<std::string, std::map<std::string, double>>& out) {
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& r : records) {
        const auto& src = variant == "forecasted" ? r.diag.forecast : r.obfuscated.values;
        auto& a = acc[r.original->user_id];
        a.first += utility_loss(r.original->values, src);
        a.second += 1;
    }
    for (const auto& [user, a] : acc) out[variant][user] = a.first / static_cast<double>(a.second);
}

} // namespace

MetricsReport compute_metrics(const std::vector<GestureEvalRecord>& records,
                              const ObfuscationConfig& cfg, const std::string& dataset_name) {
    if (records.empty()) throw DataError("compute_metrics: no evaluated gestures");
    MetricsReport report;
    report.dataset_name = dataset_name;
    report.config_echo = cfg.to_json();
    for (const char* variant : {"original", "forecasted", "obfuscated"}) {
        fill_untrackability(records, variant, report.untrackability_by_variant);
        fill_indistinguishability(records, variant, cfg.similarity_threshold,
                                  report.indistinguishability_by_variant);
    }
    for (const char* variant : {"forecasted", "obfuscated"})
        fill_utility(records, variant, report.utility_by_variant);
    report.timing_seconds.reserve(records.size());
    for (const auto& r : records) report.timing_seconds.push_back(r.diag.elapsed_seconds);
    return report;
}

MetricsReport run_evaluation_single(const Dataset& test, const ModelStore& store,
                                    const ObfuscationConfig& cfg,
                                    const std::string& dataset_name,
                                    std::vector<GestureEvalRecord>* capture) {
    auto records = obfuscate_dataset(test, store, cfg);
    auto report = compute_metrics(records, cfg, dataset_name);
    if (capture) *capture = std::move(records);
    return report;
}

std::vector<MetricsReport> run_evaluation(const Dataset& test, const ModelStore& store,
                                          const std::vector<ObfuscationConfig>& grid,
                                          const std::string& dataset_name) {
    std::vector<MetricsReport> reports;
    reports.reserve(grid.size());
    for (const auto& cfg : grid)
        reports.push_back(run_evaluation_single(test, store, cfg, dataset_name));
    return reports;
}

ModelStore update_models(const Dataset& new_data, const ModelStore& store,
                         const ObfuscationConfig& cfg) {
    PreprocessResult pre;
    pre.extrema = store.extrema;
    pre.target_length = store.target_length;
    pre.test = store.test_data;
    pre.train = store.train_data;
    if (!new_data.empty()) {
        const Dataset prepared = preprocess_with_store(new_data, store);
        // Union keyed by (user, session, gesture, feature); new data wins.
        std::set<std::tuple<std::string, std::string, long, std::string>> seen;
        Dataset merged;
        merged.feature_names = store.train_data.feature_names;
        merged.split_tag = SplitTag::Train;
        for (const auto& s : prepared.series) {
            seen.emplace(s.user_id, s.session_id, s.gesture_id, s.feature_name);
            merged.series.push_back(s);
        }
        for (const auto& s : store.train_data.series) {
            if (!seen.count({s.user_id, s.session_id, s.gesture_id, s.feature_name}))
                merged.series.push_back(s);
        }
        pre.train = std::move(merged);
    }
    return train_offline(pre, cfg);
}

std::vector<std::pair<std::string, ObfuscationConfig>>
sweep_grid(const ObfuscationConfig& base) {
    std::vector<std::pair<std::string, ObfuscationConfig>> grid;
    for (NoiseScaleRule rule : {NoiseScaleRule::Sqrt2Std, NoiseScaleRule::SqrtStd,
                                NoiseScaleRule::TwoStd, NoiseScaleRule::StdSquared,
                                NoiseScaleRule::Std}) {
        ObfuscationConfig cfg = base;
        cfg.noise.scale_rule = rule;
        cfg.noise.tau = 0.5;
        grid.emplace_back(std::string("scale-") + to_string(rule), cfg);
    }
    for (int i = 1; i <= 5; ++i) {
        ObfuscationConfig cfg = base;
        cfg.noise.scale_rule = NoiseScaleRule::TwoStd;
        cfg.noise.tau = 0.1 * i;
        char tag[16];
        std::snprintf(tag, sizeof(tag), "tau-0.%d", i);
        grid.emplace_back(tag, cfg);
    }
    return grid;
}

} // namespace tsobf
