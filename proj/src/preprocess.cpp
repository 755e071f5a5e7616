#include "tsobf/data.hpp"
#include "tsobf/errors.hpp"
#include "tsobf/rng.hpp"
#include "tsobf/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace tsobf {

Dataset fix_sampling_rate(const Dataset& d, double pct) {
    if (d.empty()) throw DataError("fix_sampling_rate: empty dataset");

    std::map<std::string, std::vector<double>> lengths;
    for (const auto& s : d.series)
        lengths[s.feature_name].push_back(static_cast<double>(s.sample_count()));

    std::map<std::string, std::size_t> target;
    for (auto& [feature, ls] : lengths)
        target[feature] = static_cast<std::size_t>(percentile_nearest_rank(std::move(ls), pct));

    Dataset out = d;
    for (auto& s : out.series) {
        const std::size_t L = target.at(s.feature_name);
        if (s.values.size() > L) {
            s.values.resize(L);
        } else if (s.values.size() < L) {
            s.values = interpolate_to_length(s.values, L);
        }
    }
    return out;
}

FeatureExtrema feature_extrema(const Dataset& d) {
    FeatureExtrema out;
    for (const auto& s : d.series) {
        auto [it, fresh] = out.try_emplace(s.feature_name,
                                           MinMax{s.values.front(), s.values.front()});
        for (double v : s.values) {
            it->second.min = std::min(it->second.min, v);
            it->second.max = std::max(it->second.max, v);
        }
        (void)fresh;
    }
    for (const auto& [feature, mm] : out) {
        if (!(mm.max > mm.min))
            throw DataError("feature '" + feature + "' is constant (min == max == " +
                            format_double(mm.min) + "); cannot min-max scale");
    }
    return out;
}

Dataset apply_normalization(const Dataset& d, const FeatureExtrema& extrema) {
    Dataset out = d;
    for (auto& s : out.series) {
        auto it = extrema.find(s.feature_name);
        if (it == extrema.end())
            throw DataError("no normalization extrema for feature '" + s.feature_name + "'");
        const double lo = it->second.min;
        const double range = it->second.max - it->second.min;
        for (double& v : s.values) v = (v - lo) / range;
    }
    return out;
}

std::vector<double> denormalize_values(std::span<const double> values, const MinMax& mm) {
    std::vector<double> out(values.begin(), values.end());
    const double range = mm.max - mm.min;
    for (double& v : out) v = v * range + mm.min;
    return out;
}

Dataset undo_normalization(const Dataset& d, const FeatureExtrema& extrema) {
    Dataset out = d;
    for (auto& s : out.series) {
        auto it = extrema.find(s.feature_name);
        if (it == extrema.end())
            throw DataError("no normalization extrema for feature '" + s.feature_name + "'");
        s.values = denormalize_values(s.values, it->second);
    }
    return out;
}

std::pair<Dataset, FeatureExtrema> normalize_minmax(const Dataset& d) {
    auto extrema = feature_extrema(d);
    return {apply_normalization(d, extrema), std::move(extrema)};
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double train_fraction,
                                             std::uint64_t seed,
                                             std::vector<std::string>* warnings) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw DataError("train_fraction must lie strictly inside (0, 1), got " +
                        format_double(train_fraction));

    using Instance = std::pair<std::string, long>; // (session, gesture)
    std::map<std::string, std::set<Instance>> per_user;
    for (const auto& s : d.series) per_user[s.user_id].insert({s.session_id, s.gesture_id});

    std::set<std::tuple<std::string, std::string, long>> train_keys;
    for (const auto& [user, instances] : per_user) {
        std::vector<Instance> ordered(instances.begin(), instances.end());
        if (ordered.size() < 2) {
            if (warnings)
                warnings->push_back("user '" + user +
                                    "' has a single gesture instance; assigned to train");
            for (const auto& inst : ordered) train_keys.emplace(user, inst.first, inst.second);
            continue;
        }
        Rng rng(derive_seed(seed, {"split", user}));
        rng.shuffle(ordered);
        auto n_train = static_cast<std::size_t>(
            std::floor(train_fraction * static_cast<double>(ordered.size()) + 1e-9));
        n_train = std::clamp<std::size_t>(n_train, 1, ordered.size() - 1);
        for (std::size_t i = 0; i < n_train; ++i)
            train_keys.emplace(user, ordered[i].first, ordered[i].second);
    }

    Dataset train, test;
    train.feature_names = test.feature_names = d.feature_names;
    train.split_tag = SplitTag::Train;
    test.split_tag = SplitTag::Test;
    for (const auto& s : d.series) {
        if (train_keys.count({s.user_id, s.session_id, s.gesture_id}))
            train.series.push_back(s);
        else
            test.series.push_back(s);
    }
    return {std::move(train), std::move(test)};
}

} // namespace tsobf
