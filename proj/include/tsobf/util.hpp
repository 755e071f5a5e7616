#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tsobf {

double mean(std::span<const double> x);

/// Population variance (divisor n).
double variance(std::span<const double> x);

inline double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

/// Pearson correlation coefficient. Returns 0 when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest element (1-indexed).
/// p in (0, 100].
double percentile_nearest_rank(std::vector<double> values, double p);

bool all_finite(std::span<const double> x);

/// Resamples values to exactly target_len points by linear interpolation over
/// the series' own index range. Requires at least 2 input points.
std::vector<double> interpolate_to_length(std::span<const double> values, std::size_t target_len);

/// Shortest round-trip decimal formatting (std::to_chars) so serialized
/// doubles re-read bit-exactly.
std::string format_double(double v);

/// Strict full-string double parse; returns false on trailing garbage.
bool parse_double(std::string_view s, double& out);

/// Runs fn(i) for i in [0, n). With threads <= 1 this is a plain loop;
/// otherwise work is distributed over a fixed pool. fn must not throw across
/// iterations it does not own; exceptions are rethrown after the pool joins.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace tsobf
