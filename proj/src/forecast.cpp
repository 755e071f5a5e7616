#include "tsobf/forecast.hpp"

#include "tsobf/errors.hpp"
#include "tsobf/rng.hpp"
#include "tsobf/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace tsobf {

const char* to_string(ModelKind k) {
    switch (k) {
    case ModelKind::Ses: return "ses";
    case ModelKind::HoltDamped: return "holt_damped";
    case ModelKind::SeasonalAdditive: return "seasonal_additive";
    }
    return "ses";
}

ModelKind model_kind_from_string(std::string_view s) {
    if (s == "ses") return ModelKind::Ses;
    if (s == "holt_damped") return ModelKind::HoltDamped;
    if (s == "seasonal_additive") return ModelKind::SeasonalAdditive;
    throw SchemaError("unknown model kind '" + std::string(s) + "'");
}

std::vector<double> build_training_series(const std::vector<const GestureSeries*>& members) {
    if (members.empty()) throw DataError("build_training_series: no members");
    std::vector<const GestureSeries*> ordered = members;
    std::sort(ordered.begin(), ordered.end(), [](const GestureSeries* a, const GestureSeries* b) {
        return std::tie(a->session_id, a->gesture_id) < std::tie(b->session_id, b->gesture_id);
    });
    const std::size_t L = ordered.front()->values.size();
    std::vector<double> out;
    out.reserve(L * ordered.size());
    for (const auto* m : ordered) {
        if (m->values.size() != L)
            throw DataError("build_training_series: mixed lengths (" + std::to_string(L) +
                            " vs " + std::to_string(m->values.size()) + ")");
        out.insert(out.end(), m->values.begin(), m->values.end());
    }
    return out;
}

namespace {

constexpr double kParamEps = 1e-4;
constexpr double kPhiLow = 0.8 + kParamEps;

struct Box {
    std::vector<double> lo, hi;
};

std::vector<double> project(std::vector<double> p, const Box& box) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], box.lo[i], box.hi[i]);
    return p;
}

/// One-step-ahead SSE of a smoothing recursion plus its final state.
struct FitEval {
    double sse = std::numeric_limits<double>::infinity();
    int n_eff = 0;
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> seasonal;
};

FitEval eval_ses(std::span<const double> y, double alpha) {
    FitEval ev;
    double level = y[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double e = y[t] - level;
        sse += e * e;
        level += alpha * e;
    }
    ev.sse = sse;
    ev.n_eff = static_cast<int>(y.size()) - 1;
    ev.level = level;
    return ev;
}

FitEval eval_holt_damped(std::span<const double> y, double alpha, double beta, double phi) {
    FitEval ev;
    double level = y[1];
    double trend = y[1] - y[0];
    double sse = 0.0;
    for (std::size_t t = 2; t < y.size(); ++t) {
        const double pred = level + phi * trend;
        const double e = y[t] - pred;
        sse += e * e;
        const double new_level = pred + alpha * e;
        trend = beta * (new_level - level) + (1.0 - beta) * phi * trend;
        level = new_level;
    }
    ev.sse = sse;
    ev.n_eff = static_cast<int>(y.size()) - 2;
    ev.level = level;
    ev.trend = trend;
    return ev;
}

FitEval eval_seasonal(std::span<const double> y, double alpha, double gamma, int period) {
    FitEval ev;
    const auto L = static_cast<std::size_t>(period);
    double level = 0.0;
    for (std::size_t j = 0; j < L; ++j) level += y[j];
    level /= static_cast<double>(L);
    std::vector<double> seasonal(L);
    for (std::size_t j = 0; j < L; ++j) seasonal[j] = y[j] - level;

    double sse = 0.0;
    for (std::size_t t = L; t < y.size(); ++t) {
        const std::size_t slot = t % L;
        const double e = y[t] - (level + seasonal[slot]);
        sse += e * e;
        level += alpha * e;
        seasonal[slot] += gamma * (1.0 - alpha) * e;
    }
    ev.sse = sse;
    ev.n_eff = static_cast<int>(y.size()) - period;
    ev.level = level;
    ev.seasonal = std::move(seasonal);
    return ev;
}

/// Nelder-Mead with box projection. Returns the best projected point found.
template <typename Fn>
std::vector<double> nelder_mead(const Box& box, std::vector<double> start, Fn objective) {
    const std::size_t d = start.size();
    struct Vertex {
        std::vector<double> p;
        double f;
    };
    auto eval = [&](const std::vector<double>& p) { return objective(project(p, box)); };

    std::vector<Vertex> simplex;
    simplex.push_back({start, eval(start)});
    for (std::size_t i = 0; i < d; ++i) {
        auto p = start;
        const double span = box.hi[i] - box.lo[i];
        p[i] += (p[i] + 0.15 * span <= box.hi[i]) ? 0.15 * span : -0.15 * span;
        simplex.push_back({p, eval(p)});
    }

    const int max_iter = 200 * static_cast<int>(d) + 100;
    for (int iter = 0; iter < max_iter; ++iter) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        if (std::abs(simplex.back().f - simplex.front().f) <=
            1e-12 * (1.0 + std::abs(simplex.front().f)))
            break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t v = 0; v + 1 < simplex.size(); ++v)
            for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[v].p[i];
        for (double& c : centroid) c /= static_cast<double>(d);

        auto blend = [&](double coeff) {
            std::vector<double> p(d);
            for (std::size_t i = 0; i < d; ++i)
                p[i] = centroid[i] + coeff * (centroid[i] - simplex.back().p[i]);
            return p;
        };

        auto reflected = blend(1.0);
        const double fr = eval(reflected);
        if (fr < simplex.front().f) {
            auto expanded = blend(2.0);
            const double fe = eval(expanded);
            simplex.back() = fe < fr ? Vertex{expanded, fe} : Vertex{reflected, fr};
        } else if (fr < simplex[simplex.size() - 2].f) {
            simplex.back() = {reflected, fr};
        } else {
            auto contracted = blend(fr < simplex.back().f ? 0.5 : -0.5);
            const double fc = eval(contracted);
            if (fc < std::min(fr, simplex.back().f)) {
                simplex.back() = {contracted, fc};
            } else {
                for (std::size_t v = 1; v < simplex.size(); ++v) {
                    for (std::size_t i = 0; i < d; ++i)
                        simplex[v].p[i] =
                            simplex[0].p[i] + 0.5 * (simplex[v].p[i] - simplex[0].p[i]);
                    simplex[v].f = eval(simplex[v].p);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    return project(simplex.front().p, box);
}

/// Multi-start NM minimization; 3 seeded uniform starts in the box.
template <typename Fn>
std::vector<double> optimize(const Box& box, std::uint64_t seed, Fn objective) {
    Rng rng(seed);
    std::vector<double> best;
    double best_f = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 3; ++s) {
        std::vector<double> start(box.lo.size());
        for (std::size_t i = 0; i < start.size(); ++i)
            start[i] = box.lo[i] + rng.uniform() * (box.hi[i] - box.lo[i]);
        auto p = nelder_mead(box, std::move(start), objective);
        const double f = objective(p);
        if (f < best_f) {
            best_f = f;
            best = std::move(p);
        }
    }
    if (best.empty()) throw FitError("optimizer produced no finite objective");
    return best;
}

double aic_of(double sse, int n_eff, int params) {
    return static_cast<double>(n_eff) * std::log(sse / static_cast<double>(n_eff)) +
           2.0 * static_cast<double>(params);
}

} // namespace

ForecastModel fit_forecaster(std::span<const double> y, int season_length, std::uint64_t seed) {
    if (y.size() < 8) throw DataError("fit_forecaster: need at least 8 observations");
    if (!all_finite(y)) throw FitError("fit_forecaster: non-finite training series");
    if (season_length < 1) throw DataError("fit_forecaster: season_length must be positive");

    struct Candidate {
        ModelKind kind;
        FitEval ev;
        std::vector<double> params;
        int n_params;
    };
    std::vector<Candidate> fits;

    auto try_fit = [&](ModelKind kind, auto objective_eval, Box box, std::uint64_t sub_seed) {
        auto objective = [&](const std::vector<double>& p) {
            const double sse = objective_eval(p).sse;
            return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
        };
        auto p = optimize(box, sub_seed, objective);
        auto ev = objective_eval(p);
        if (!std::isfinite(ev.sse))
            throw FitError(std::string("fit_forecaster: non-finite objective for candidate '") +
                           to_string(kind) + "'");
        fits.push_back({kind, std::move(ev), std::move(p), static_cast<int>(box.lo.size())});
    };

    try_fit(
        ModelKind::Ses, [&](const std::vector<double>& p) { return eval_ses(y, p[0]); },
        Box{{kParamEps}, {1.0}}, derive_seed(seed, {"ses"}));
    try_fit(
        ModelKind::HoltDamped,
        [&](const std::vector<double>& p) { return eval_holt_damped(y, p[0], p[1], p[2]); },
        Box{{kParamEps, kParamEps, kPhiLow}, {1.0, 1.0, 1.0}}, derive_seed(seed, {"holt"}));
    if (y.size() >= 2 * static_cast<std::size_t>(season_length)) {
        try_fit(
            ModelKind::SeasonalAdditive,
            [&](const std::vector<double>& p) { return eval_seasonal(y, p[0], p[1], season_length); },
            Box{{kParamEps, kParamEps}, {1.0, 1.0}}, derive_seed(seed, {"seasonal"}));
    }

    const Candidate* best = nullptr;
    double best_aic = std::numeric_limits<double>::infinity();
    for (const auto& c : fits) {
        const double aic = aic_of(c.ev.sse, c.ev.n_eff, c.n_params);
        if (!best || aic < best_aic) {
            best = &c;
            best_aic = aic;
        }
    }

    ForecastModel m;
    m.kind = best->kind;
    m.fit_sse = best->ev.sse;
    m.fit_n = best->ev.n_eff;
    m.fit_params = best->n_params;
    m.fit_aic = best_aic;
    m.level = best->ev.level;
    switch (best->kind) {
    case ModelKind::Ses:
        m.alpha = best->params[0];
        break;
    case ModelKind::HoltDamped:
        m.alpha = best->params[0];
        m.beta = best->params[1];
        m.phi = best->params[2];
        m.trend = best->ev.trend;
        break;
    case ModelKind::SeasonalAdditive:
        m.alpha = best->params[0];
        m.gamma = best->params[1];
        m.season_length = season_length;
        m.seasonal = best->ev.seasonal;
        m.phase = static_cast<int>(y.size() % static_cast<std::size_t>(season_length));
        break;
    }
    return m;
}

std::vector<double> forecast(const ForecastModel& model, int horizon) {
    if (horizon <= 0) throw DataError("forecast: horizon must be positive");
    std::vector<double> out(static_cast<std::size_t>(horizon));
    switch (model.kind) {
    case ModelKind::Ses:
        std::fill(out.begin(), out.end(), model.level);
        break;
    case ModelKind::HoltDamped: {
        double damp = 0.0;
        double phi_pow = 1.0;
        for (int h = 0; h < horizon; ++h) {
            phi_pow *= model.phi;
            damp += phi_pow;
            out[static_cast<std::size_t>(h)] = model.level + damp * model.trend;
        }
        break;
    }
    case ModelKind::SeasonalAdditive: {
        const auto L = static_cast<std::size_t>(model.season_length);
        for (int h = 0; h < horizon; ++h) {
            const std::size_t slot = (static_cast<std::size_t>(model.phase) +
                                      static_cast<std::size_t>(h)) % L;
            out[static_cast<std::size_t>(h)] = model.level + model.seasonal[slot];
        }
        break;
    }
    }
    if (!all_finite(out)) throw FitError("forecast: non-finite output");
    return out;
}

} // namespace tsobf
