#include "tsobf/data.hpp"
#include "tsobf/errors.hpp"
#include "tsobf/util.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace tsobf {

std::vector<std::string> Dataset::users() const {
    std::set<std::string> u;
    for (const auto& s : series) u.insert(s.user_id);
    return {u.begin(), u.end()};
}

std::size_t Dataset::gesture_count() const {
    std::set<std::tuple<std::string, std::string, long>> g;
    for (const auto& s : series) g.emplace(s.user_id, s.session_id, s.gesture_id);
    return g.size();
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

struct GestureKey {
    std::string user, session;
    long gesture;
    auto operator<=>(const GestureKey&) const = default;
};

} // namespace

Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty CSV file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_line(line);

    auto column = [&](const std::string& name) -> int {
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };

    const int user_c = column(schema.user_col);
    const int session_c = column(schema.session_col);
    const int gesture_c = column(schema.gesture_col);
    const int time_c = column(schema.time_col);
    const int label_c = schema.label_col.empty() ? -1 : column(schema.label_col);
    for (auto [c, name] : {std::pair{user_c, schema.user_col},
                           {session_c, schema.session_col},
                           {gesture_c, schema.gesture_col},
                           {time_c, schema.time_col}}) {
        if (c < 0)
            throw SchemaError("CSV header missing required column '" + name + "' in " +
                              path.string());
    }

    std::vector<int> feature_cols;
    std::vector<std::string> feature_names;
    if (schema.feature_cols.empty()) {
        for (int i = 0; i < static_cast<int>(header.size()); ++i) {
            if (i == user_c || i == session_c || i == gesture_c || i == time_c || i == label_c)
                continue;
            feature_cols.push_back(i);
            feature_names.push_back(header[i]);
        }
    } else {
        for (const auto& name : schema.feature_cols) {
            const int c = column(name);
            if (c < 0)
                throw SchemaError("CSV header missing feature column '" + name + "' in " +
                                  path.string());
            feature_cols.push_back(c);
            feature_names.push_back(name);
        }
    }
    if (feature_cols.empty())
        throw SchemaError("CSV has no feature columns: " + path.string());

    struct Row {
        double t;
        std::vector<double> features;
    };
    std::map<GestureKey, std::vector<Row>> gestures;
    std::map<GestureKey, std::string> labels;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_line(line);
        if (fields.size() != header.size())
            throw SchemaError("CSV row " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(header.size()));

        Row row;
        if (!parse_double(fields[time_c], row.t)) continue; // broken timestamp: drop row
        row.features.resize(feature_cols.size());
        bool usable = true;
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            const auto& cell = fields[feature_cols[f]];
            double v;
            if (cell.empty() || !parse_double(cell, v) || !std::isfinite(v)) {
                usable = false;
                break;
            }
            row.features[f] = v;
        }
        if (!usable) continue;

        long gid;
        {
            const auto& cell = fields[gesture_c];
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), gid);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) continue;
        }
        GestureKey key{fields[user_c], fields[session_c], gid};
        if (key.user.empty() || key.session.empty()) continue;

        auto& rows = gestures[key];
        if (!rows.empty() && row.t <= rows.back().t)
            throw DataError("timestamps not strictly increasing for gesture " +
                            key.user + "/" + key.session + "/" + std::to_string(key.gesture) +
                            " at CSV row " + std::to_string(line_no));
        rows.push_back(std::move(row));
        if (label_c >= 0 && !fields[label_c].empty()) labels[key] = fields[label_c];
    }

    Dataset out;
    out.feature_names = feature_names;
    for (auto& [key, rows] : gestures) {
        if (rows.size() < 5) continue; // too short to be a usable gesture
        for (std::size_t f = 0; f < feature_names.size(); ++f) {
            GestureSeries s;
            s.user_id = key.user;
            s.session_id = key.session;
            s.gesture_id = key.gesture;
            s.feature_name = feature_names[f];
            if (auto it = labels.find(key); it != labels.end()) s.label = it->second;
            s.values.reserve(rows.size());
            for (const auto& r : rows) s.values.push_back(r.features[f]);
            out.series.push_back(std::move(s));
        }
    }
    if (out.series.empty())
        throw DataError("no usable gestures in " + path.string() +
                        " (all rows broken or shorter than 5 points)");
    return out;
}

void write_csv(const std::filesystem::path& path, const Dataset& d) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write CSV file: " + path.string());

    out << "user_id,session_id,gesture_id,label,t";
    for (const auto& f : d.feature_names) out << ',' << f;
    out << '\n';

    // Regroup series of one gesture across features; emit one row per sample.
    std::map<GestureKey, std::vector<const GestureSeries*>> gestures;
    for (const auto& s : d.series)
        gestures[{s.user_id, s.session_id, s.gesture_id}].push_back(&s);

    for (const auto& [key, parts] : gestures) {
        std::vector<const GestureSeries*> ordered(d.feature_names.size(), nullptr);
        std::size_t len = 0;
        for (const auto* s : parts) {
            auto it = std::find(d.feature_names.begin(), d.feature_names.end(), s->feature_name);
            if (it == d.feature_names.end())
                throw DataError("series feature '" + s->feature_name + "' not in dataset feature list");
            ordered[static_cast<std::size_t>(it - d.feature_names.begin())] = s;
            len = std::max(len, s->values.size());
        }
        const std::string& label = parts.front()->label;
        for (std::size_t i = 0; i < len; ++i) {
            out << key.user << ',' << key.session << ',' << key.gesture << ',' << label << ','
                << i;
            for (const auto* s : ordered) {
                out << ',';
                if (s && i < s->values.size()) out << format_double(s->values[i]);
            }
            out << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace tsobf
