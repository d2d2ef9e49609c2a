#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogscope/meta.hpp"
#include "cogscope/report.hpp"
#include "cogscope/study_data.hpp"

namespace cogscope {

// Includes the derived composite on top of the four ingested kinds.
inline const std::vector<std::string>& all_variable_names() {
    static const std::vector<std::string> names = {"time", "correctness", "rating",
                                                   "physiological", "composite"};
    return names;
}

enum class MethodChoice { Auto, Pearson, Kendall };

struct DatasetInputs {
    std::filesystem::path manifest;
    // label -> measurements file; multiple files model multiple outcomes of
    // one study and are pooled within the study at the meta stage.
    std::vector<std::pair<std::string, std::filesystem::path>> measurements;
};

struct CorrelateOptions {
    std::vector<std::string> variables; // defaults to all five
    MethodChoice method = MethodChoice::Auto;
    CompositeOptions composite;
    int thread_cap = 0;
};

struct CorrelateOutcome {
    std::vector<EffectExport> effects;
    std::vector<std::string> warnings;
};

// analyze -> aggregate -> correlate for one dataset.
CorrelateOutcome correlate_dataset(const DatasetInputs& inputs, const CorrelateOptions& options);

struct MetaOptions {
    Tau2Estimator estimator = Tau2Estimator::DerSimonianLaird;
    double rho = 1.0;
};

struct MetaGroupOutcome {
    MetaResult result;
    std::vector<PooledStudyEffect> studies;
    std::vector<std::string> warnings;
};

// Groups effects by variable, pools duplicate (dataset, variable) rows
// within each study, then applies random-effects synthesis per group.
std::vector<MetaGroupOutcome> synthesize_effects(const std::vector<EffectExport>& effects,
                                                 const MetaOptions& options);

struct RunConfig {
    std::vector<std::pair<std::string, DatasetInputs>> datasets; // id -> inputs
    std::filesystem::path output_dir;
    std::vector<std::string> variables;
    MethodChoice method = MethodChoice::Auto;
    Tau2Estimator estimator = Tau2Estimator::DerSimonianLaird;
    double rho = 1.0;
    bool composite_mean_time = false;
    std::string plot = "svg"; // svg | ascii | both
};

RunConfig load_run_config(const std::filesystem::path& config_path);

struct PipelineOutcome {
    std::vector<EffectExport> effects;
    std::vector<MetaGroupOutcome> groups; // one per variable with data
    std::vector<std::string> warnings;
    std::string summary_table; // variable,k,summary_r,ci_low,ci_high,interpretation
    std::vector<std::filesystem::path> written_files;
};

// Full reproduction bundle: per-dataset failures are isolated as warnings,
// config errors throw.
PipelineOutcome run_pipeline(const RunConfig& config);

} // namespace cogscope
