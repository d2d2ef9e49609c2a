#pragma once

#include <string>
#include <vector>

#include "cogscope/correlation.hpp"
#include "cogscope/meta.hpp"
#include "cogscope/metrics.hpp"

namespace cogscope {

// Fixed 6-decimal rendering used by every CSV/JSON/plot writer; negative
// zero is normalized.
std::string format_real(double value);

struct EffectExport {
    CorrelationResult correlation;
    EffectSize effect;
};

// path,method,cognitive,cyclomatic,loc
std::string metrics_to_csv(const std::vector<ComplexityReport>& reports);
std::string metrics_to_json(const std::vector<ComplexityReport>& reports);

// dataset_id,variable,method,coefficient,n,r,z,var_z,p_value
std::string effects_to_csv(const std::vector<EffectExport>& effects);
std::vector<EffectExport> effects_from_csv(const std::string& csv_text,
                                           const std::string& source_label);

// variable,k,summary_r,ci_low,ci_high,tau2,Q,I2,interpretation
std::string meta_to_csv(const std::vector<MetaResult>& results);

struct ForestRow {
    std::string label;
    double r = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double weight_percent = 0.0;
    double p_value = 1.0;
    int n = 0;
    bool pooled = false; // combined from multiple outcomes of one study
};

struct ForestPlotSpec {
    std::string title;
    std::vector<ForestRow> rows; // sorted by label
    double summary_r = 0.0;
    double summary_ci_low = 0.0;
    double summary_ci_high = 0.0;
    std::string interpretation;
    bool has_summary = true;
};

ForestPlotSpec make_forest_spec(const MetaResult& meta,
                                const std::vector<PooledStudyEffect>& studies);

// Confidence intervals drawn as bracketed bars on a 61-column axis spanning
// [-1, 1]; the summary is a diamond row.
std::string render_forest_ascii(const ForestPlotSpec& spec);

// SVG 1.1, deterministic output; squares sized by weight, diamond summary.
// Numeric values are repeated in data-* attributes.
std::string render_forest_svg(const ForestPlotSpec& spec);

} // namespace cogscope
