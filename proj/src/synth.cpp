#include "tsobf/synth.hpp"

#include "tsobf/errors.hpp"
#include "tsobf/rng.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace tsobf {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct UserTraits {
    double amplitude; // personal gain on the gesture shape
    double phase;     // personal timing offset
    double x_offset;
    double y_offset;
    double pressure_base;
};

// Base templates over normalized time u in [0, 1], one per gesture type
// (cycled when more types are requested).
double base_shape(int type, double u, double phase) {
    switch (type % 4) {
    case 0: return u;                                   // ramp up
    case 1: return 1.0 - u;                             // ramp down
    case 2: return std::sin(kPi * (u + 0.08 * phase));  // arch
    default: return 0.5 + 0.4 * std::sin(2.0 * kPi * (u + 0.1 * phase)); // wiggle
    }
}

std::string padded(const char* prefix, int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%s%02d", prefix, i);
    return buf;
}

} // namespace

Dataset synth_dataset(const SynthConfig& cfg) {
    if (cfg.users < 1 || cfg.types < 1 || cfg.reps < 1 || cfg.sessions < 1)
        throw DataError("synth_dataset: counts must be positive");
    if (cfg.min_len < 5 || cfg.max_len < cfg.min_len)
        throw DataError("synth_dataset: need 5 <= min_len <= max_len");

    Dataset out;
    out.feature_names = {"x_pos", "y_pos", "pressure"};

    for (int u = 0; u < cfg.users; ++u) {
        const std::string user = padded("u", u);
        Rng traits_rng(derive_seed(cfg.seed, {"traits", user}));
        const UserTraits traits{
            0.75 + 0.5 * traits_rng.uniform(),
            traits_rng.uniform(),
            60.0 * traits_rng.uniform(),
            90.0 * traits_rng.uniform(),
            0.35 + 0.4 * traits_rng.uniform(),
        };

        for (int sess = 0; sess < cfg.sessions; ++sess) {
            const std::string session = padded("s", sess);
            Rng rng(derive_seed(cfg.seed, {"session", user, session}));
            const double drift = 0.012 * rng.normal(); // slow per-session shift
            long gesture_id = 0;
            for (int type = 0; type < cfg.types; ++type) {
                const std::string label = padded("type", type);
                for (int rep = 0; rep < cfg.reps; ++rep) {
                    const int len = cfg.min_len +
                                    static_cast<int>(rng.uniform_int(
                                        static_cast<std::uint64_t>(cfg.max_len - cfg.min_len + 1)));
                    GestureSeries x, y, p;
                    x.user_id = y.user_id = p.user_id = user;
                    x.session_id = y.session_id = p.session_id = session;
                    x.gesture_id = y.gesture_id = p.gesture_id = gesture_id;
                    x.label = y.label = p.label = label;
                    x.feature_name = "x_pos";
                    y.feature_name = "y_pos";
                    p.feature_name = "pressure";
                    for (int i = 0; i < len; ++i) {
                        const double t = static_cast<double>(i) / (len - 1);
                        const double s = base_shape(type, t, traits.phase);
                        const double sd = base_shape(type + 1, t, traits.phase);
                        x.values.push_back(480.0 + traits.x_offset +
                                           320.0 * traits.amplitude * s + drift * 320.0 +
                                           rng.normal(0.0, 6.0));
                        y.values.push_back(820.0 + traits.y_offset +
                                           400.0 * traits.amplitude * sd + drift * 400.0 +
                                           rng.normal(0.0, 8.0));
                        p.values.push_back(traits.pressure_base +
                                           0.25 * traits.amplitude * std::sin(kPi * t) + drift +
                                           rng.normal(0.0, 0.015));
                    }
                    out.series.push_back(std::move(x));
                    out.series.push_back(std::move(y));
                    out.series.push_back(std::move(p));
                    ++gesture_id;
                }
            }
        }
    }
    return out;
}

} // namespace tsobf
