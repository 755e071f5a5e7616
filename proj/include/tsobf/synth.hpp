#pragma once

#include "tsobf/data.hpp"

#include <cstdint>

namespace tsobf {

/// Synthetic labeled gesture data: per gesture type a parameterized template
/// (ramp / sinusoid mixtures) with user-specific amplitude, phase and offset,
/// small session-level drift and seeded per-sample noise. Gesture lengths
/// vary inside [min_len, max_len] so sampling-rate fixing has work to do.
struct SynthConfig {
    int users = 10;
    int types = 4;
    int reps = 20; // gesture instances per (user, type, session)
    int sessions = 2;
    int min_len = 40;
    int max_len = 56;
    std::uint64_t seed = 0;
};

/// Features emitted: x_pos (pixels), y_pos (pixels), pressure (unitless).
Dataset synth_dataset(const SynthConfig& cfg);

} // namespace tsobf
