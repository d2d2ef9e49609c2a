#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cogscope/pipeline.hpp"

namespace fs = std::filesystem;
using namespace cogscope;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitWarnings = 2;

std::optional<LanguageId> parse_lang(const std::string& lang) {
    if (lang.empty()) return std::nullopt;
    auto id = language_from_name(lang);
    if (!id) throw Error(ErrorCode::UnknownLanguage, "unknown language '" + lang + "'");
    return id;
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + out_path + "'");
    out << content;
}

std::vector<fs::path> expand_paths(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& input : inputs) {
        fs::path p = input;
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::recursive_directory_iterator(p))
                if (entry.is_regular_file()) files.push_back(entry.path());
        } else {
            files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) {
                  return a.generic_string() < b.generic_string();
              });
    return files;
}

int cmd_analyze(const std::vector<std::string>& inputs, const std::string& lang,
                const std::string& format, bool per_file, bool dump_structure,
                const std::string& out_path) {
    std::optional<LanguageId> override = parse_lang(lang);
    std::vector<fs::path> files = expand_paths(inputs);
    if (files.empty()) {
        std::cerr << "error: no input files\n";
        return kExitError;
    }

    if (dump_structure) {
        std::string dumped;
        bool hard_error = false;
        for (const auto& file : files) {
            try {
                const LanguageProfile& profile = detect_language(file, override);
                std::ifstream in(file, std::ios::binary);
                if (!in) throw Error(ErrorCode::IoError, "cannot read '" + file.string() + "'");
                std::string source((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
                ScanResult scanned = scan(source, profile);
                BuildResult built = build_structure(scanned.tokens, profile);
                for (auto& unit : built.units) {
                    unit.source_file = file.generic_string();
                    dumped += structure_to_json(unit) + "\n";
                }
            } catch (const std::exception& e) {
                std::cerr << file.generic_string() << ": " << e.what() << "\n";
                hard_error = true;
            }
        }
        write_output(out_path, dumped);
        return hard_error ? kExitError : kExitOk;
    }

    std::vector<ComplexityReport> reports = analyze_files(files, override);
    bool hard_error = false;
    bool warnings = false;
    for (const auto& report : reports) {
        for (const auto& d : report.diagnostics) {
            std::cerr << report.file << ":" << d.line << ":" << d.column << ": "
                      << error_code_name(d.code) << ": " << d.message << "\n";
            if (d.code == ErrorCode::IoError || d.code == ErrorCode::UnknownLanguage)
                hard_error = true;
            else
                warnings = true;
        }
    }

    std::string content;
    if (format == "json") {
        content = metrics_to_json(reports);
    } else if (per_file) {
        content = "path,cognitive_total,max_method_cognitive,methods\n";
        for (const auto& report : reports) {
            content += report.file + "," + std::to_string(report.file_cognitive_total) + "," +
                       std::to_string(report.file_max_method_cognitive) + "," +
                       std::to_string(report.methods.size()) + "\n";
        }
    } else {
        content = metrics_to_csv(reports);
    }
    write_output(out_path, content);
    if (hard_error) return kExitError;
    return warnings ? kExitWarnings : kExitOk;
}

int cmd_correlate(const std::vector<std::string>& manifests,
                  const std::vector<std::string>& measurements, const std::string& variable,
                  const std::string& method, bool composite_mean, const std::string& out_path) {
    CorrelateOptions options;
    if (variable != "all") {
        const auto& known = all_variable_names();
        if (std::find(known.begin(), known.end(), variable) == known.end())
            throw Error(ErrorCode::ConfigError, "unknown variable '" + variable + "'");
        options.variables = {variable};
    }
    if (method == "pearson") options.method = MethodChoice::Pearson;
    else if (method == "kendall") options.method = MethodChoice::Kendall;
    else if (method == "auto") options.method = MethodChoice::Auto;
    else throw Error(ErrorCode::ConfigError, "--method must be auto|pearson|kendall");
    options.composite.use_mean_time = composite_mean;

    std::vector<EffectExport> all_effects;
    bool warnings = false;
    for (const auto& manifest : manifests) {
        DatasetInputs inputs;
        inputs.manifest = manifest;
        for (std::size_t i = 0; i < measurements.size(); ++i)
            inputs.measurements.emplace_back("outcome-" + std::to_string(i + 1),
                                             measurements[i]);
        CorrelateOutcome outcome = correlate_dataset(inputs, options);
        for (const auto& w : outcome.warnings) {
            std::cerr << "warning: " << w << "\n";
            warnings = true;
        }
        for (auto& e : outcome.effects) all_effects.push_back(std::move(e));
    }
    std::stable_sort(all_effects.begin(), all_effects.end(),
                     [](const EffectExport& a, const EffectExport& b) {
                         if (a.correlation.variable != b.correlation.variable)
                             return a.correlation.variable < b.correlation.variable;
                         return a.correlation.dataset_id < b.correlation.dataset_id;
                     });
    write_output(out_path, effects_to_csv(all_effects));
    return warnings ? kExitWarnings : kExitOk;
}

int cmd_meta(const std::vector<std::string>& effects_files, const std::string& plot,
             const std::string& estimator, double rho, const std::string& out_dir) {
    MetaOptions options;
    if (estimator == "dl") options.estimator = Tau2Estimator::DerSimonianLaird;
    else if (estimator == "reml") options.estimator = Tau2Estimator::RemlIterative;
    else throw Error(ErrorCode::ConfigError, "--tau2-estimator must be dl|reml");
    options.rho = rho;

    std::vector<EffectExport> effects;
    for (const auto& file : effects_files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw Error(ErrorCode::IoError, "cannot read '" + file + "'");
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        for (auto& e : effects_from_csv(text, file)) effects.push_back(std::move(e));
    }

    bool warnings = false;
    std::vector<MetaGroupOutcome> groups = synthesize_effects(effects, options);
    std::vector<MetaResult> rows;
    for (const auto& group : groups) {
        rows.push_back(group.result);
        for (const auto& w : group.warnings) {
            std::cerr << "warning: " << w << "\n";
            warnings = true;
        }
    }

    fs::path out = out_dir;
    fs::create_directories(out);
    {
        std::ofstream f(out / "meta.csv", std::ios::binary);
        if (!f) throw Error(ErrorCode::IoError, "cannot write meta.csv");
        f << meta_to_csv(rows);
    }
    for (const auto& group : groups) {
        ForestPlotSpec spec = make_forest_spec(group.result, group.studies);
        if (plot == "svg" || plot == "both") {
            std::ofstream f(out / ("forest_" + group.result.variable + ".svg"), std::ios::binary);
            f << render_forest_svg(spec);
        }
        if (plot == "ascii" || plot == "both") std::cout << render_forest_ascii(spec) << "\n";
    }
    return warnings ? kExitWarnings : kExitOk;
}

int cmd_pipeline(const std::string& config_path) {
    RunConfig config = load_run_config(config_path);
    PipelineOutcome outcome = run_pipeline(config);
    bool warnings = false;
    for (const auto& w : outcome.warnings) {
        std::cerr << "warning: " << w << "\n";
        warnings = true;
    }
    std::cout << outcome.summary_table;
    return warnings ? kExitWarnings : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cogscope: Cognitive Complexity metrics and their validation against "
                 "code-comprehension study data"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Compute per-method complexity metrics");
    std::vector<std::string> analyze_paths;
    std::string analyze_lang, analyze_format = "csv", analyze_out;
    bool per_file = false, per_method = false, dump_structure = false;
    analyze->add_option("paths", analyze_paths, "Source files or directories")->required();
    analyze->add_option("--lang", analyze_lang, "Language override (java|c|cpp|csharp|javascript)");
    analyze->add_option("--format", analyze_format, "Output format (csv|json)")
        ->check(CLI::IsMember({"csv", "json"}));
    analyze->add_flag("--per-file", per_file, "One row per file (cognitive sum)");
    analyze->add_flag("--per-method", per_method, "One row per method (default)");
    analyze->add_flag("--dump-structure", dump_structure, "Dump structure trees as JSON");
    analyze->add_option("-o,--out", analyze_out, "Output file (default stdout)");

    // correlate
    auto* correlate = app.add_subcommand("correlate", "Correlate metrics with study measurements");
    std::vector<std::string> manifests, measurements;
    std::string variable = "all", method = "auto", correlate_out;
    bool composite_mean = false;
    correlate->add_option("--manifest", manifests, "Snippet manifest JSON")->required();
    correlate->add_option("--measurements", measurements, "Measurements CSV")->required();
    correlate->add_option("--variable", variable,
                          "time|correctness|rating|physiological|composite|all");
    correlate->add_option("--method", method, "auto|pearson|kendall");
    correlate->add_flag("--composite-mean-time", composite_mean,
                        "Use mean instead of median time in the composite");
    correlate->add_option("-o,--out", correlate_out, "Effects CSV output (default stdout)");

    // meta
    auto* meta = app.add_subcommand("meta", "Random-effects synthesis and forest plots");
    std::vector<std::string> effects_files;
    std::string plot = "svg", estimator = "dl", meta_out = ".";
    double rho = 1.0;
    meta->add_option("--effects", effects_files, "Effects CSV files")->required();
    meta->add_option("--plot", plot, "svg|ascii|both")
        ->check(CLI::IsMember({"svg", "ascii", "both"}));
    meta->add_option("--tau2-estimator", estimator, "dl|reml");
    meta->add_option("--rho", rho, "Assumed correlation among outcomes pooled within a study");
    meta->add_option("-o,--out", meta_out, "Output directory");

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "Full analyze/correlate/meta run from config");
    std::string config_path;
    pipeline->add_option("--config", config_path, "Pipeline config JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze)
            return cmd_analyze(analyze_paths, analyze_lang, analyze_format, per_file,
                               dump_structure, analyze_out);
        if (*correlate)
            return cmd_correlate(manifests, measurements, variable, method, composite_mean,
                                 correlate_out);
        if (*meta) return cmd_meta(effects_files, plot, estimator, rho, meta_out);
        if (*pipeline) return cmd_pipeline(config_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
