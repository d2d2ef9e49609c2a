#include "cogscope/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

namespace cogscope {

namespace {

// Snippet score: the named method's value when the manifest pins one,
// otherwise the whole-file sum (datasets score whole snippets).
int snippet_cognitive(const ComplexityReport& report, const ManifestEntry& entry) {
    if (entry.method) {
        for (const auto& m : report.methods)
            if (m.method == *entry.method || m.method.ends_with("." + *entry.method) ||
                m.method.ends_with("::" + *entry.method))
                return m.cognitive;
        throw Error(ErrorCode::MissingSnippet, "method '" + *entry.method + "' not found in '" +
                                               report.file + "'");
    }
    return report.file_cognitive_total;
}

std::vector<double> collect_column(const std::vector<SnippetAggregate>& aggregates,
                                   VariableKind kind, bool invert,
                                   std::vector<const SnippetAggregate*>& used) {
    std::vector<double> values;
    for (const auto& agg : aggregates) {
        auto it = agg.stats.find(kind);
        if (it == agg.stats.end()) continue;
        values.push_back(invert ? -it->second.mean : it->second.mean);
        used.push_back(&agg);
    }
    return values;
}

} // namespace

CorrelateOutcome correlate_dataset(const DatasetInputs& inputs, const CorrelateOptions& options) {
    CorrelateOutcome outcome;
    SnippetManifest manifest = load_manifest(inputs.manifest);

    // Metric values per snippet.
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : manifest.entries) paths.push_back(entry.path);
    SnippetMetricIndex index;
    std::map<std::string, bool> invert_rating;
    {
        std::vector<ComplexityReport> reports;
        reports.reserve(paths.size());
        for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
            ComplexityReport report =
                analyze_file(manifest.entries[i].path, manifest.entries[i].language);
            if (report.tolerant)
                outcome.warnings.push_back("snippet '" + manifest.entries[i].snippet_id +
                                           "' was analyzed tolerantly");
            index[manifest.dataset_id][manifest.entries[i].snippet_id] =
                snippet_cognitive(report, manifest.entries[i]);
            invert_rating[manifest.entries[i].snippet_id] = manifest.entries[i].invert_rating;
        }
    }

    std::vector<std::string> variables =
        options.variables.empty() ? all_variable_names() : options.variables;

    for (const auto& [label, measurements_path] : inputs.measurements) {
        std::vector<Measurement> measurements = load_measurements(measurements_path);
        // Keep only rows for this dataset so one CSV can serve many datasets.
        std::erase_if(measurements, [&](const Measurement& m) {
            return m.dataset_id != manifest.dataset_id;
        });
        if (measurements.empty()) {
            outcome.warnings.push_back("no rows for dataset '" + manifest.dataset_id + "' in '" +
                                       measurements_path.generic_string() + "'");
            continue;
        }
        AggregateResult aggregated = aggregate(measurements, index);
        for (const auto& w : aggregated.warnings) outcome.warnings.push_back(w);

        for (const auto& variable : variables) {
            std::vector<double> x; // cognitive complexity
            std::vector<double> y; // understandability proxy
            if (variable == "composite") {
                std::vector<std::pair<std::string, double>> composite;
                try {
                    composite = composite_timed_correctness(aggregated.aggregates,
                                                            options.composite);
                } catch (const Error& e) {
                    // Datasets that never measured time or correctness simply
                    // contribute no composite effect in an all-variables run.
                    if (e.code() == ErrorCode::MissingVariable && options.variables.empty())
                        continue;
                    throw;
                }
                std::map<std::string, double> by_snippet(composite.begin(), composite.end());
                for (const auto& agg : aggregated.aggregates) {
                    auto it = by_snippet.find(agg.snippet_id);
                    if (it == by_snippet.end()) continue;
                    x.push_back(agg.cognitive_complexity);
                    y.push_back(it->second);
                }
            } else {
                auto kind = variable_kind_from_name(variable);
                if (!kind)
                    throw Error(ErrorCode::ConfigError, "unknown variable '" + variable + "'");
                std::vector<const SnippetAggregate*> used;
                y = collect_column(aggregated.aggregates, *kind, false, used);
                for (std::size_t i = 0; i < used.size(); ++i) {
                    x.push_back(used[i]->cognitive_complexity);
                    if (*kind == VariableKind::Rating && invert_rating[used[i]->snippet_id])
                        y[i] = -y[i];
                }
                if (y.empty()) {
                    if (!options.variables.empty())
                        throw Error(ErrorCode::MissingVariable,
                                    "dataset '" + manifest.dataset_id + "' has no '" + variable +
                                    "' measurements");
                    continue;
                }
            }
            if (x.size() < 4) {
                outcome.warnings.push_back("dataset '" + manifest.dataset_id + "', variable '" +
                                           variable + "': only " + std::to_string(x.size()) +
                                           " snippets; skipped");
                continue;
            }

            CorrelationResult corr;
            corr.dataset_id = manifest.dataset_id;
            corr.variable = variable;
            corr.n = static_cast<int>(x.size());
            corr.expected = expected_direction(variable);

            CorrelationMethod method;
            switch (options.method) {
                case MethodChoice::Pearson:
                    method = CorrelationMethod::Pearson;
                    if (!normality_check(x).pass || !normality_check(y).pass)
                        outcome.warnings.push_back(
                            "dataset '" + manifest.dataset_id + "', variable '" + variable +
                            "': pearson forced on non-normal data");
                    break;
                case MethodChoice::Kendall:
                    method = CorrelationMethod::Kendall;
                    break;
                case MethodChoice::Auto:
                default:
                    method = select_method(x, y);
                    break;
            }
            corr.method = method;
            CorrelationOutcome value = method == CorrelationMethod::Pearson
                                           ? pearson(x, y)
                                           : kendall_tau_b(x, y);
            corr.coefficient = value.coefficient;
            corr.p_value = value.p_value;

            EffectExport row;
            row.correlation = corr;
            row.effect = to_effect_size(corr);
            if (row.effect.clamped)
                outcome.warnings.push_back("dataset '" + manifest.dataset_id + "', variable '" +
                                           variable + "': perfect correlation clamped");
            (void)label;
            outcome.effects.push_back(std::move(row));
        }
    }
    return outcome;
}

std::vector<MetaGroupOutcome> synthesize_effects(const std::vector<EffectExport>& effects,
                                                 const MetaOptions& options) {
    std::vector<MetaGroupOutcome> groups;

    std::map<std::string, std::map<std::string, std::vector<const EffectExport*>>> by_variable;
    for (const auto& e : effects)
        by_variable[e.correlation.variable][e.correlation.dataset_id].push_back(&e);

    // Fixed reporting order: the five variable groups, then anything else.
    std::vector<std::string> order;
    for (const auto& name : all_variable_names())
        if (by_variable.count(name)) order.push_back(name);
    for (const auto& [name, rest] : by_variable) {
        (void)rest;
        if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
    }

    for (const auto& variable : order) {
        MetaGroupOutcome group;
        std::vector<PooledStudyEffect> studies;
        for (const auto& [dataset, rows] : by_variable[variable]) {
            (void)dataset;
            std::vector<EffectSize> members;
            for (const auto* row : rows) members.push_back(row->effect);
            PooledStudyEffect study = pool_within_study(members, options.rho);
            if (members.size() > 1)
                group.warnings.push_back("dataset '" + study.dataset_id + "', variable '" +
                                         variable + "': " + std::to_string(members.size()) +
                                         " outcomes pooled within study");
            studies.push_back(std::move(study));
        }
        if (studies.size() < 2)
            group.warnings.push_back("variable '" + variable +
                                     "': fewer than 2 studies; passthrough row");
        group.result = random_effects(studies, options.estimator);
        group.result.variable = variable;
        group.studies = std::move(studies);
        groups.push_back(std::move(group));
    }
    return groups;
}

RunConfig load_run_config(const std::filesystem::path& config_path) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + config_path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, config_path.string() + ": " + e.what());
    }

    std::filesystem::path base = config_path.parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path = p;
        return path.is_absolute() ? path : base / path;
    };

    RunConfig config;
    if (!j.contains("datasets") || !j["datasets"].is_array() || j["datasets"].empty())
        throw Error(ErrorCode::ConfigError,
                    config_path.string() + ": field 'datasets' must be a non-empty array");
    for (const auto& d : j["datasets"]) {
        if (!d.contains("dataset_id"))
            throw Error(ErrorCode::ConfigError,
                        config_path.string() + ": dataset entry missing field 'dataset_id'");
        std::string id = d["dataset_id"].get<std::string>();
        if (!d.contains("manifest"))
            throw Error(ErrorCode::ConfigError, config_path.string() + ": dataset '" + id +
                                                "' missing field 'manifest'");
        DatasetInputs inputs;
        inputs.manifest = resolve(d["manifest"].get<std::string>());
        if (!d.contains("measurements"))
            throw Error(ErrorCode::ConfigError, config_path.string() + ": dataset '" + id +
                                                "' missing field 'measurements'");
        const auto& m = d["measurements"];
        if (m.is_string()) {
            inputs.measurements.emplace_back("primary", resolve(m.get<std::string>()));
        } else if (m.is_array()) {
            for (const auto& item : m) {
                if (item.is_string()) {
                    inputs.measurements.emplace_back(
                        "outcome-" + std::to_string(inputs.measurements.size() + 1),
                        resolve(item.get<std::string>()));
                } else {
                    if (!item.contains("label") || !item.contains("path"))
                        throw Error(ErrorCode::ConfigError,
                                    config_path.string() + ": dataset '" + id +
                                    "' measurement entries need 'label' and 'path'");
                    inputs.measurements.emplace_back(item["label"].get<std::string>(),
                                                     resolve(item["path"].get<std::string>()));
                }
            }
        } else {
            throw Error(ErrorCode::ConfigError, config_path.string() + ": dataset '" + id +
                                                "' field 'measurements' must be a path or array");
        }
        config.datasets.emplace_back(id, std::move(inputs));
    }
    if (!j.contains("output_dir"))
        throw Error(ErrorCode::ConfigError, config_path.string() + ": missing field 'output_dir'");
    config.output_dir = resolve(j["output_dir"].get<std::string>());
    if (j.contains("variables")) {
        for (const auto& v : j["variables"]) {
            std::string name = v.get<std::string>();
            const auto& known = all_variable_names();
            if (std::find(known.begin(), known.end(), name) == known.end())
                throw Error(ErrorCode::ConfigError,
                            config_path.string() + ": unknown variable '" + name + "'");
            config.variables.push_back(name);
        }
    }
    if (j.contains("method")) {
        std::string m = j["method"].get<std::string>();
        if (m == "auto") config.method = MethodChoice::Auto;
        else if (m == "pearson") config.method = MethodChoice::Pearson;
        else if (m == "kendall") config.method = MethodChoice::Kendall;
        else throw Error(ErrorCode::ConfigError,
                         config_path.string() + ": field 'method' must be auto|pearson|kendall");
    }
    if (j.contains("tau2_estimator")) {
        std::string e = j["tau2_estimator"].get<std::string>();
        if (e == "dl") config.estimator = Tau2Estimator::DerSimonianLaird;
        else if (e == "reml") config.estimator = Tau2Estimator::RemlIterative;
        else throw Error(ErrorCode::ConfigError,
                         config_path.string() + ": field 'tau2_estimator' must be dl|reml");
    }
    if (j.contains("rho")) config.rho = j["rho"].get<double>();
    if (j.contains("composite_mean_time"))
        config.composite_mean_time = j["composite_mean_time"].get<bool>();
    if (j.contains("plot")) {
        config.plot = j["plot"].get<std::string>();
        if (config.plot != "svg" && config.plot != "ascii" && config.plot != "both")
            throw Error(ErrorCode::ConfigError,
                        config_path.string() + ": field 'plot' must be svg|ascii|both");
    }
    return config;
}

PipelineOutcome run_pipeline(const RunConfig& config) {
    PipelineOutcome outcome;
    std::filesystem::create_directories(config.output_dir);

    CorrelateOptions correlate_options;
    correlate_options.variables = config.variables;
    correlate_options.method = config.method;
    correlate_options.composite.use_mean_time = config.composite_mean_time;

    for (const auto& [id, inputs] : config.datasets) {
        try {
            CorrelateOutcome dataset = correlate_dataset(inputs, correlate_options);
            for (auto& e : dataset.effects) outcome.effects.push_back(std::move(e));
            for (auto& w : dataset.warnings) outcome.warnings.push_back(std::move(w));
        } catch (const std::exception& e) {
            outcome.warnings.push_back("dataset '" + id + "' failed: " + e.what());
        }
    }

    std::stable_sort(outcome.effects.begin(), outcome.effects.end(),
                     [](const EffectExport& a, const EffectExport& b) {
                         if (a.correlation.variable != b.correlation.variable)
                             return a.correlation.variable < b.correlation.variable;
                         return a.correlation.dataset_id < b.correlation.dataset_id;
                     });

    auto write_file = [&](const std::filesystem::path& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
        out << content;
        outcome.written_files.push_back(path);
    };

    write_file(config.output_dir / "effects.csv", effects_to_csv(outcome.effects));

    MetaOptions meta_options;
    meta_options.estimator = config.estimator;
    meta_options.rho = config.rho;
    outcome.groups = synthesize_effects(outcome.effects, meta_options);

    std::vector<MetaResult> meta_rows;
    for (const auto& group : outcome.groups) meta_rows.push_back(group.result);
    write_file(config.output_dir / "meta.csv", meta_to_csv(meta_rows));

    for (const auto& group : outcome.groups) {
        ForestPlotSpec spec = make_forest_spec(group.result, group.studies);
        if (config.plot == "svg" || config.plot == "both")
            write_file(config.output_dir / ("forest_" + group.result.variable + ".svg"),
                       render_forest_svg(spec));
        if (config.plot == "ascii" || config.plot == "both")
            write_file(config.output_dir / ("forest_" + group.result.variable + ".txt"),
                       render_forest_ascii(spec));
        for (const auto& w : group.warnings) outcome.warnings.push_back(w);
    }

    std::string summary = "variable,k,summary_r,ci_low,ci_high,interpretation\n";
    for (const auto& group : outcome.groups) {
        const auto& r = group.result;
        summary += r.variable + "," + std::to_string(r.k) + "," + format_real(r.summary_r) + "," +
                   format_real(r.ci_low_r) + "," + format_real(r.ci_high_r) + "," +
                   interpretation_name(r.interpretation) + "\n";
    }
    outcome.summary_table = summary;
    write_file(config.output_dir / "summary.csv", summary);
    return outcome;
}

} // namespace cogscope
