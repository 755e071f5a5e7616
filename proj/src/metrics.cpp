#include "tsobf/metrics.hpp"

#include "tsobf/errors.hpp"
#include "tsobf/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tsobf {

double mae(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DataError("mae: length mismatch (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
    if (a.empty()) throw DataError("mae: empty series");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

double indistinguishability(std::span<const double> target,
                            const std::vector<std::vector<double>>& population,
                            double similarity_threshold) {
    if (population.empty()) throw DataError("indistinguishability: empty population");
    std::size_t k = 0;
    for (const auto& p : population)
        if (mae(target, p) <= similarity_threshold) ++k;
    k = std::max<std::size_t>(k, 1); // the target itself always counts
    return std::log2(static_cast<double>(population.size()) / static_cast<double>(k));
}

std::optional<double> per_user_untrackability(const std::vector<SessionGesture>& gestures) {
    std::map<std::string, std::map<int, std::vector<const std::vector<double>*>>> by_session;
    for (const auto& g : gestures)
        by_session[g.session_id][g.cluster_label].push_back(&g.values);

    std::vector<const std::map<int, std::vector<const std::vector<double>*>>*> sessions;
    for (const auto& [sid, labels] : by_session) sessions.push_back(&labels);

    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        for (std::size_t j = i + 1; j < sessions.size(); ++j) {
            for (const auto& [label, left] : *sessions[i]) {
                auto it = sessions[j]->find(label);
                if (it == sessions[j]->end()) continue;
                for (const auto* a : left) {
                    for (const auto* b : it->second) {
                        total += mae(*a, *b);
                        ++pairs;
                    }
                }
            }
        }
    }
    if (pairs == 0) return std::nullopt;
    return total / static_cast<double>(pairs);
}

std::vector<std::pair<double, double>> build_cdf(std::vector<double> values, int points) {
    if (values.empty()) throw DataError("build_cdf: empty input");
    if (points < 1) throw DataError("build_cdf: points must be >= 1");
    std::sort(values.begin(), values.end());
    const double lo = values.front();
    const double hi = values.back();
    const double n = static_cast<double>(values.size());

    if (!(hi > lo) || points == 1) return {{hi, 1.0}};

    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double x = (i == points - 1)
                             ? hi
                             : lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(points - 1);
        const auto count = std::upper_bound(values.begin(), values.end(), x) - values.begin();
        out.emplace_back(x, static_cast<double>(count) / n);
    }
    return out;
}

nlohmann::ordered_json MetricsReport::to_json(bool include_timing) const {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["dataset"] = dataset_name;
    j["config"] = config_echo;
    auto emit = [](const std::map<std::string, std::map<std::string, double>>& m) {
        nlohmann::ordered_json out;
        for (const auto& [variant, users] : m) {
            nlohmann::ordered_json u;
            for (const auto& [user, v] : users) u[user] = v;
            out[variant] = std::move(u);
        }
        return out;
    };
    j["untrackability"] = emit(untrackability_by_variant);
    j["indistinguishability"] = emit(indistinguishability_by_variant);
    j["utility"] = emit(utility_by_variant);
    if (include_timing) j["timing_seconds"] = timing_seconds;
    return j;
}

} // namespace tsobf
