#include "tsobf/util.hpp"

#include "tsobf/errors.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <mutex>
#include <thread>

namespace tsobf {

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DataError("pearson: length mismatch (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
    const std::size_t n = a.size();
    if (n < 2) return 0.0;
    const double ma = mean(a);
    const double mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

double percentile_nearest_rank(std::vector<double> values, double p) {
    if (values.empty()) throw DataError("percentile: empty input");
    if (p <= 0.0 || p > 100.0) throw DataError("percentile: p must be in (0, 100]");
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(values.size())));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

std::vector<double> interpolate_to_length(std::span<const double> values, std::size_t target_len) {
    if (values.size() < 2) throw DataError("interpolate_to_length: need at least 2 points");
    if (target_len < 2) throw DataError("interpolate_to_length: target length must be >= 2");
    if (values.size() == target_len) return {values.begin(), values.end()};
    std::vector<double> out(target_len);
    const double step = static_cast<double>(values.size() - 1) / static_cast<double>(target_len - 1);
    for (std::size_t j = 0; j < target_len; ++j) {
        const double pos = static_cast<double>(j) * step;
        const auto lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= values.size()) {
            out[j] = values.back();
        } else {
            const double frac = pos - static_cast<double>(lo);
            out[j] = values[lo] + frac * (values[lo + 1] - values[lo]);
        }
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool parse_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace tsobf
