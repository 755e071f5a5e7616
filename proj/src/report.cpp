#include "tsobf/report.hpp"

#include "tsobf/errors.hpp"
#include "tsobf/util.hpp"

#include <fstream>

namespace tsobf {

namespace fs = std::filesystem;

void write_report_json(const fs::path& path, const MetricsReport& report, bool include_timing) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report: " + path.string());
    out << report.to_json(include_timing).dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

void write_cdf_csv(const fs::path& path, const std::vector<double>& values, int points) {
    const auto cdf = build_cdf(values, points);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write CDF: " + path.string());
    out << "x,fraction\n";
    for (const auto& [x, fraction] : cdf)
        out << format_double(x) << ',' << format_double(fraction) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<fs::path> write_report_bundle(const fs::path& out_dir, const MetricsReport& report,
                                          const std::string& tag, bool include_timing) {
    fs::create_directories(out_dir);
    std::vector<fs::path> written;

    const auto report_path = out_dir / (report.dataset_name + "_report_" + tag + ".json");
    write_report_json(report_path, report, include_timing);
    written.push_back(report_path);

    struct MetricFamily {
        const char* name;
        const std::map<std::string, double>* per_user;
    };
    const MetricFamily families[] = {
        {"untrackability", &report.per_user_untrackability()},
        {"indistinguishability", &report.per_user_indistinguishability()},
        {"utility", &report.per_user_utility()},
    };
    for (const auto& fam : families) {
        std::vector<double> values;
        values.reserve(fam.per_user->size());
        for (const auto& [user, v] : *fam.per_user) values.push_back(v);
        if (values.empty()) continue;
        const auto path =
            out_dir / (report.dataset_name + "_" + fam.name + "_" + tag + ".csv");
        write_cdf_csv(path, values);
        written.push_back(path);
    }
    if (include_timing && !report.timing_seconds.empty()) {
        const auto path = out_dir / (report.dataset_name + "_timing_" + tag + ".csv");
        write_cdf_csv(path, report.timing_seconds);
        written.push_back(path);
    }
    return written;
}

} // namespace tsobf
