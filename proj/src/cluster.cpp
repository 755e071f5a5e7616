#include "tsobf/cluster.hpp"

#include "tsobf/errors.hpp"
#include "tsobf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace tsobf {

double dtw_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DataError("dtw_distance: empty series");
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<double> prev(m + 1, inf);
    std::vector<double> curr(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        curr[0] = inf;
        for (std::size_t j = 1; j <= m; ++j) {
            const double cost = std::abs(a[i - 1] - b[j - 1]);
            curr[j] = cost + std::min(std::min(prev[j], curr[j - 1]), prev[j - 1]);
        }
        std::swap(prev, curr);
    }
    return prev[m];
}

namespace {

struct PamState {
    std::vector<std::size_t> medoids;
    std::vector<int> assign; // index into medoids
    double objective = 0.0;
};

double assign_all(const std::vector<std::vector<double>>& dist,
                  const std::vector<std::size_t>& medoids, std::vector<int>& assign) {
    double total = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        int best = 0;
        double best_d = dist[i][medoids[0]];
        for (std::size_t c = 1; c < medoids.size(); ++c) {
            const double dd = dist[i][medoids[c]];
            if (dd < best_d) {
                best_d = dd;
                best = static_cast<int>(c);
            }
        }
        assign[i] = best;
        total += best_d;
    }
    return total;
}

} // namespace

ClusterModel train_clusters(const std::vector<const GestureSeries*>& series,
                            std::optional<int> k_opt, std::uint64_t seed,
                            const std::string& feature_name,
                            std::vector<int>* assignments_out,
                            std::vector<double>* objective_trace) {
    const std::size_t n = series.size();
    if (n == 0) throw DataError("train_clusters: no series for feature '" + feature_name + "'");

    std::set<std::string> distinct_labels;
    for (const auto* s : series)
        if (!s->label.empty()) distinct_labels.insert(s->label);

    int k;
    if (k_opt) {
        k = *k_opt;
    } else if (!distinct_labels.empty()) {
        k = static_cast<int>(distinct_labels.size());
    } else {
        throw DataError("train_clusters: k not given and no training labels present");
    }
    if (k < 1) throw DataError("train_clusters: k must be positive");
    if (static_cast<std::size_t>(k) > n)
        throw DataError("train_clusters: k=" + std::to_string(k) + " exceeds series count " +
                        std::to_string(n));

    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] = dtw_distance(series[i]->values, series[j]->values);

    // Seeded initialization: k distinct indices.
    Rng rng(seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);

    PamState state;
    state.medoids.assign(order.begin(), order.begin() + k);
    std::sort(state.medoids.begin(), state.medoids.end());
    state.assign.resize(n);
    state.objective = assign_all(dist, state.medoids, state.assign);
    if (objective_trace) objective_trace->push_back(state.objective);

    // PAM swap search: take the best improving (medoid, candidate) swap until
    // no swap improves the objective.
    for (;;) {
        double best_obj = state.objective;
        std::size_t best_c = 0, best_h = 0;
        bool improved = false;
        std::vector<int> scratch(n);
        for (std::size_t c = 0; c < state.medoids.size(); ++c) {
            for (std::size_t h = 0; h < n; ++h) {
                if (std::find(state.medoids.begin(), state.medoids.end(), h) !=
                    state.medoids.end())
                    continue;
                auto candidate = state.medoids;
                candidate[c] = h;
                const double obj = assign_all(dist, candidate, scratch);
                if (obj < best_obj - 1e-12) {
                    best_obj = obj;
                    best_c = c;
                    best_h = h;
                    improved = true;
                }
            }
        }
        if (!improved) break;
        state.medoids[best_c] = best_h;
        state.objective = assign_all(dist, state.medoids, state.assign);
        if (objective_trace) objective_trace->push_back(state.objective);
    }

    // Stable labeling: clusters ordered by medoid index.
    std::vector<std::size_t> medoid_order(state.medoids.size());
    for (std::size_t c = 0; c < medoid_order.size(); ++c) medoid_order[c] = c;
    std::sort(medoid_order.begin(), medoid_order.end(),
              [&](std::size_t x, std::size_t y) { return state.medoids[x] < state.medoids[y]; });
    std::vector<int> relabel(state.medoids.size());
    ClusterModel model;
    model.feature_name = feature_name;
    for (std::size_t rank = 0; rank < medoid_order.size(); ++rank) {
        relabel[medoid_order[rank]] = static_cast<int>(rank);
        Cluster cl;
        cl.label = static_cast<int>(rank);
        cl.centroid = series[state.medoids[medoid_order[rank]]]->values;
        model.clusters.push_back(std::move(cl));
    }

    std::vector<int> final_assign(n);
    for (std::size_t i = 0; i < n; ++i) final_assign[i] = relabel[state.assign[i]];
    if (assignments_out) *assignments_out = final_assign;

    if (!distinct_labels.empty()) {
        std::map<int, std::map<std::string, std::size_t>> counts;
        for (std::size_t i = 0; i < n; ++i) counts[final_assign[i]][series[i]->label]++;
        std::size_t agree = 0;
        for (const auto& [cl, by_label] : counts) {
            std::size_t best = 0;
            for (const auto& [label, c] : by_label) best = std::max(best, c);
            agree += best;
        }
        model.purity = static_cast<double>(agree) / static_cast<double>(n);
    }
    return model;
}

ClusterModel train_clusters(const Dataset& train, const std::string& feature_name,
                            std::optional<int> k, std::uint64_t seed) {
    std::vector<const GestureSeries*> members;
    for (const auto& s : train.series)
        if (s.feature_name == feature_name) members.push_back(&s);
    return train_clusters(members, k, seed, feature_name);
}

int assign_cluster(const ClusterModel& model, std::span<const double> g) {
    if (model.clusters.empty()) throw DataError("assign_cluster: untrained model");
    if (g.empty()) throw DataError("assign_cluster: empty series");
    // Clusters are stored in ascending label order, so strict improvement
    // leaves ties on the lowest label.
    int best_label = model.clusters.front().label;
    double best_d = dtw_distance(model.clusters.front().centroid, g);
    for (std::size_t c = 1; c < model.clusters.size(); ++c) {
        const double d = dtw_distance(model.clusters[c].centroid, g);
        if (d < best_d) {
            best_d = d;
            best_label = model.clusters[c].label;
        }
    }
    return best_label;
}

} // namespace tsobf
