#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cogscope/errors.hpp"
#include "cogscope/lexer.hpp"

namespace cogscope {

enum class VariableKind { Time, Correctness, Rating, Physiological };

const char* variable_kind_name(VariableKind kind);
std::optional<VariableKind> variable_kind_from_name(std::string_view name);

struct Measurement {
    std::string dataset_id;
    std::string snippet_id;
    std::string participant_id;
    VariableKind variable = VariableKind::Time;
    double value = 0.0;
};

struct VariableStats {
    int n = 0;
    double mean = 0.0;
    double median = 0.0;
};

struct SnippetAggregate {
    std::string dataset_id;
    std::string snippet_id;
    int cognitive_complexity = 0;
    std::map<VariableKind, VariableStats> stats;
};

struct ManifestEntry {
    std::string snippet_id;
    std::filesystem::path path;
    LanguageId language = LanguageId::Java;
    std::optional<std::string> method; // when set, score this method only
    bool invert_rating = false;
};

struct SnippetManifest {
    std::string dataset_id;
    std::vector<ManifestEntry> entries;
};

// CSV schema: dataset_id,snippet_id,participant_id,variable,value.
// Rejects the whole file on schema or value errors, reporting every
// offending row in the message.
std::vector<Measurement> load_measurements(const std::filesystem::path& csv_path);
std::vector<Measurement> parse_measurements(std::string_view csv_text,
                                            const std::string& source_label);

SnippetManifest load_manifest(const std::filesystem::path& json_path);

// Cognitive Complexity per (dataset_id, snippet_id).
using SnippetMetricIndex = std::map<std::string, std::map<std::string, int>>;

struct AggregateResult {
    std::vector<SnippetAggregate> aggregates; // sorted by dataset, snippet
    std::vector<std::string> warnings;
};

// Mean and median per snippet and variable; median uses the midpoint for
// even counts. Ratings are treated as continuous.
AggregateResult aggregate(const std::vector<Measurement>& measurements,
                          const SnippetMetricIndex& metrics);

struct CompositeOptions {
    bool use_mean_time = false; // default: median time, mean correctness
};

// (Time / Time_max) * (1 - Correctness / Correctness_max) per snippet;
// higher values mean harder to understand.
std::vector<std::pair<std::string, double>>
composite_timed_correctness(const std::vector<SnippetAggregate>& aggregates,
                            const CompositeOptions& options = {});

} // namespace cogscope
