#pragma once

#include <string>
#include <vector>

#include "cogscope/correlation.hpp"

namespace cogscope {

enum class EffectInterpretation { None, Small, Medium, Large };
enum class Tau2Estimator { DerSimonianLaird, RemlIterative };

const char* interpretation_name(EffectInterpretation interpretation);

struct PooledStudyEffect {
    std::string dataset_id;
    std::string variable;
    double z = 0.0;
    double var_z = 0.0;
    int n = 0; // summed over members, display only
    std::vector<std::string> members; // >= 2 entries when outcomes were combined
    double p_value = 1.0;
};

struct StudyWeight {
    std::string dataset_id;
    double weight = 0.0; // normalized, weights sum to 1
    bool pooled = false;
};

struct MetaResult {
    std::string variable;
    int k = 0;
    double summary_z = 0.0;
    double summary_r = 0.0;
    double ci_low_r = 0.0;
    double ci_high_r = 0.0;
    double tau2 = 0.0;
    double q = 0.0;
    double i2 = 0.0; // percent in [0, 100]
    double p_value = 1.0;
    std::vector<StudyWeight> weights;
    EffectInterpretation interpretation = EffectInterpretation::None;
    bool synthesized = true; // false for a k = 1 passthrough ("not pooled")
};

// Combines multiple outcomes of one study into a single effect: the mean of
// the member z values with variance (1/m^2) * sum_ij cov(i, j), where
// cov(i, j) = rho * sqrt(v_i v_j) for i != j. rho defaults to 1 (most
// conservative). Throws MixedStudies when dataset ids differ.
PooledStudyEffect pool_within_study(const std::vector<EffectSize>& effects, double rho = 1.0);

// DerSimonian-Laird random-effects pooling (or iterative REML for tau^2).
// k = 1 inputs are passed through annotated as not synthesized.
MetaResult random_effects(const std::vector<PooledStudyEffect>& effects,
                          Tau2Estimator estimator = Tau2Estimator::DerSimonianLaird);

// |r| <= 0.1 none, > 0.1 small, > 0.3 medium, > 0.5 large.
EffectInterpretation interpret(double summary_r);

} // namespace cogscope
