#pragma once

#include <span>
#include <string>

#include "cogscope/errors.hpp"

namespace cogscope {

enum class CorrelationMethod { Pearson, Kendall };
enum class Direction { Positive, Negative };

const char* correlation_method_name(CorrelationMethod method);

// Positive for time and composite, negative for correctness, rating and
// physiological variables.
Direction expected_direction(const std::string& variable);
const char* direction_name(Direction direction);

struct CorrelationOutcome {
    double coefficient = 0.0;
    double p_value = 1.0;
};

struct CorrelationResult {
    std::string dataset_id;
    std::string variable;
    CorrelationMethod method = CorrelationMethod::Pearson;
    double coefficient = 0.0; // in [-1, 1]
    int n = 0;                // >= 3
    double p_value = 1.0;     // in [0, 1]
    Direction expected = Direction::Positive;
};

struct EffectSize {
    std::string dataset_id;
    std::string variable;
    double r = 0.0;     // Pearson-scale coefficient
    int n = 0;
    double z = 0.0;     // atanh(r)
    double var_z = 0.0; // 1 / (n - 3)
    bool converted_from_kendall = false;
    bool clamped = false; // |r| = 1 was clamped to +/-0.9999
};

// Product-moment coefficient; two-sided p via the t distribution with n-2
// degrees of freedom. Throws ConstantInput on zero variance.
CorrelationOutcome pearson(std::span<const double> x, std::span<const double> y);

// Tau-b with tie correction; p via the normal approximation with
// tie-adjusted variance. Throws AllTied when either vector is constant.
CorrelationOutcome kendall_tau_b(std::span<const double> x, std::span<const double> y);

struct NormalityResult {
    bool pass = false; // fail iff p < 0.05
    double statistic = 0.0;
    double p_value = 0.0;
};

// Shapiro-Wilk W test (Royston's approximation); 3 <= n <= 5000.
NormalityResult normality_check(std::span<const double> x);

// Pearson iff both vectors pass the normality check, Kendall otherwise.
CorrelationMethod select_method(std::span<const double> x, std::span<const double> y);

// Greiner's relation r = sin(pi * tau / 2).
double kendall_to_pearson(double tau);

// Fisher z with var 1/(n-3); Kendall coefficients are converted to the
// Pearson scale first. |r| = 1 is clamped to +/-0.9999 and flagged.
EffectSize to_effect_size(const CorrelationResult& result);

} // namespace cogscope
