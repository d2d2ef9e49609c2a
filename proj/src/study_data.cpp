#include "cogscope/study_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cogscope {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::optional<double> parse_double(const std::string& text) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || begin == end) return std::nullopt;
    return value;
}

double median_of(const std::vector<double>& sorted) {
    std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

// Summed in sorted order so aggregates are independent of row order.
double mean_of(const std::vector<double>& sorted) {
    double sum = 0.0;
    for (double v : sorted) sum += v;
    return sum / static_cast<double>(sorted.size());
}

} // namespace

const char* variable_kind_name(VariableKind kind) {
    switch (kind) {
        case VariableKind::Time: return "time";
        case VariableKind::Correctness: return "correctness";
        case VariableKind::Rating: return "rating";
        case VariableKind::Physiological: return "physiological";
    }
    return "unknown";
}

std::optional<VariableKind> variable_kind_from_name(std::string_view name) {
    if (name == "time") return VariableKind::Time;
    if (name == "correctness") return VariableKind::Correctness;
    if (name == "rating") return VariableKind::Rating;
    if (name == "physiological") return VariableKind::Physiological;
    return std::nullopt;
}

std::vector<Measurement> parse_measurements(std::string_view csv_text,
                                            const std::string& source_label) {
    std::vector<Measurement> rows;
    std::vector<std::string> schema_errors;
    std::vector<std::string> value_errors;

    std::istringstream stream{std::string(csv_text)};
    std::string line;
    int line_no = 0;

    if (!std::getline(stream, line))
        throw Error(ErrorCode::SchemaError, source_label + ": empty file");
    ++line_no;
    auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"dataset_id", "snippet_id", "participant_id",
                                               "variable", "value"};
    if (std::vector<std::string>(header.begin(), header.end()) != expected)
        throw Error(ErrorCode::SchemaError, source_label + ": header must be "
                                            "dataset_id,snippet_id,participant_id,variable,value");

    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 5) {
            schema_errors.push_back("row " + std::to_string(line_no) + ": expected 5 fields, got " +
                                    std::to_string(fields.size()));
            continue;
        }
        Measurement m;
        m.dataset_id = fields[0];
        m.snippet_id = fields[1];
        m.participant_id = fields[2];
        if (m.dataset_id.empty() || m.snippet_id.empty()) {
            schema_errors.push_back("row " + std::to_string(line_no) +
                                    ": dataset_id and snippet_id must be non-empty");
            continue;
        }
        auto kind = variable_kind_from_name(fields[3]);
        if (!kind) {
            schema_errors.push_back("row " + std::to_string(line_no) + ": unknown variable '" +
                                    fields[3] + "'");
            continue;
        }
        m.variable = *kind;
        auto value = parse_double(fields[4]);
        if (!value) {
            value_errors.push_back("row " + std::to_string(line_no) + ": non-numeric value '" +
                                   fields[4] + "'");
            continue;
        }
        if (!std::isfinite(*value)) {
            value_errors.push_back("row " + std::to_string(line_no) + ": value must be finite");
            continue;
        }
        if (m.variable == VariableKind::Time && *value <= 0.0) {
            value_errors.push_back("row " + std::to_string(line_no) + ": time must be > 0, got " +
                                   fields[4]);
            continue;
        }
        if (m.variable == VariableKind::Correctness && *value < 0.0) {
            value_errors.push_back("row " + std::to_string(line_no) +
                                   ": correctness must be >= 0, got " + fields[4]);
            continue;
        }
        m.value = *value;
        rows.push_back(std::move(m));
    }

    auto join = [](const std::vector<std::string>& parts) {
        std::string s;
        for (const auto& p : parts) {
            if (!s.empty()) s += "; ";
            s += p;
        }
        return s;
    };
    if (!schema_errors.empty())
        throw Error(ErrorCode::SchemaError, source_label + ": " + join(schema_errors));
    if (!value_errors.empty())
        throw Error(ErrorCode::ValueError, source_label + ": " + join(value_errors));
    return rows;
}

std::vector<Measurement> load_measurements(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + csv_path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_measurements(buffer.str(), csv_path.generic_string());
}

SnippetManifest load_manifest(const std::filesystem::path& json_path) {
    std::ifstream in(json_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + json_path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, json_path.string() + ": " + e.what());
    }

    SnippetManifest manifest;
    if (!j.contains("dataset_id") || !j["dataset_id"].is_string())
        throw Error(ErrorCode::SchemaError, json_path.string() + ": missing string 'dataset_id'");
    manifest.dataset_id = j["dataset_id"].get<std::string>();
    if (!j.contains("entries") || !j["entries"].is_array())
        throw Error(ErrorCode::SchemaError, json_path.string() + ": missing array 'entries'");

    std::filesystem::path base = json_path.parent_path();
    std::map<std::string, bool> seen;
    for (const auto& e : j["entries"]) {
        ManifestEntry entry;
        if (!e.contains("snippet_id") || !e.contains("path") || !e.contains("language"))
            throw Error(ErrorCode::SchemaError,
                        json_path.string() + ": entry needs snippet_id, path and language");
        entry.snippet_id = e["snippet_id"].get<std::string>();
        if (seen.count(entry.snippet_id))
            throw Error(ErrorCode::SchemaError, json_path.string() + ": duplicate snippet_id '" +
                                                entry.snippet_id + "'");
        seen[entry.snippet_id] = true;
        std::filesystem::path p = e["path"].get<std::string>();
        entry.path = p.is_absolute() ? p : base / p;
        auto lang = language_from_name(e["language"].get<std::string>());
        if (!lang)
            throw Error(ErrorCode::SchemaError, json_path.string() + ": unknown language '" +
                                                e["language"].get<std::string>() + "'");
        entry.language = *lang;
        if (e.contains("method")) entry.method = e["method"].get<std::string>();
        if (e.contains("invert_rating")) entry.invert_rating = e["invert_rating"].get<bool>();
        if (!std::filesystem::exists(entry.path))
            throw Error(ErrorCode::IoError, json_path.string() + ": snippet file '" +
                                            entry.path.string() + "' does not exist");
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

AggregateResult aggregate(const std::vector<Measurement>& measurements,
                          const SnippetMetricIndex& metrics) {
    AggregateResult result;

    std::map<std::pair<std::string, std::string>, std::map<VariableKind, std::vector<double>>>
        groups;
    for (const auto& m : measurements) {
        auto ds = metrics.find(m.dataset_id);
        if (ds == metrics.end() || !ds->second.count(m.snippet_id))
            throw Error(ErrorCode::MissingSnippet, "measurement references unknown snippet '" +
                                                   m.dataset_id + "/" + m.snippet_id + "'");
        groups[{m.dataset_id, m.snippet_id}][m.variable].push_back(m.value);
    }

    for (const auto& [key, by_variable] : groups) {
        SnippetAggregate agg;
        agg.dataset_id = key.first;
        agg.snippet_id = key.second;
        agg.cognitive_complexity = metrics.at(key.first).at(key.second);
        for (const auto& [kind, values] : by_variable) {
            std::vector<double> sorted(values);
            std::sort(sorted.begin(), sorted.end());
            VariableStats stats;
            stats.n = static_cast<int>(sorted.size());
            stats.mean = mean_of(sorted);
            stats.median = median_of(sorted);
            agg.stats[kind] = stats;
        }
        result.aggregates.push_back(std::move(agg));
    }

    // Snippets known to the metric index but absent from the measurements.
    for (const auto& [dataset, snippets] : metrics) {
        for (const auto& [snippet, value] : snippets) {
            (void)value;
            if (!groups.count({dataset, snippet}))
                result.warnings.push_back("snippet '" + dataset + "/" + snippet +
                                          "' has no measurements; omitted");
        }
    }
    return result;
}

std::vector<std::pair<std::string, double>>
composite_timed_correctness(const std::vector<SnippetAggregate>& aggregates,
                            const CompositeOptions& options) {
    std::map<std::string, std::vector<const SnippetAggregate*>> by_dataset;
    for (const auto& agg : aggregates) by_dataset[agg.dataset_id].push_back(&agg);

    std::vector<std::pair<std::string, double>> out;
    for (const auto& [dataset, snippets] : by_dataset) {
        double time_max = 0.0;
        double correctness_max = 0.0;
        for (const auto* agg : snippets) {
            auto t = agg->stats.find(VariableKind::Time);
            auto c = agg->stats.find(VariableKind::Correctness);
            if (t == agg->stats.end())
                throw Error(ErrorCode::MissingVariable, "snippet '" + dataset + "/" +
                                                        agg->snippet_id + "' lacks time");
            if (c == agg->stats.end())
                throw Error(ErrorCode::MissingVariable, "snippet '" + dataset + "/" +
                                                        agg->snippet_id + "' lacks correctness");
            double tv = options.use_mean_time ? t->second.mean : t->second.median;
            time_max = std::max(time_max, tv);
            correctness_max = std::max(correctness_max, c->second.mean);
        }
        if (correctness_max <= 0.0)
            throw Error(ErrorCode::DegenerateDataset,
                        "dataset '" + dataset + "': every correctness value is 0");
        for (const auto* agg : snippets) {
            double tv = options.use_mean_time ? agg->stats.at(VariableKind::Time).mean
                                              : agg->stats.at(VariableKind::Time).median;
            double cv = agg->stats.at(VariableKind::Correctness).mean;
            double composite = (tv / time_max) * (1.0 - cv / correctness_max);
            out.emplace_back(agg->snippet_id, composite);
        }
    }
    return out;
}

} // namespace cogscope
