#include "cogscope/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cogscope/detail/special.hpp"

namespace cogscope {

namespace {

void require_paired_input(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw Error(ErrorCode::ValueError, "vectors must have equal length");
    if (x.size() < 3)
        throw Error(ErrorCode::OutOfRangeN, "need at least 3 observations, got " +
                                            std::to_string(x.size()));
    for (double v : x)
        if (!std::isfinite(v)) throw Error(ErrorCode::ValueError, "non-finite value in x");
    for (double v : y)
        if (!std::isfinite(v)) throw Error(ErrorCode::ValueError, "non-finite value in y");
}

bool is_constant(std::span<const double> v) {
    for (double x : v)
        if (x != v[0]) return false;
    return true;
}

// Tie statistics over one vector: for each tie group of size t accumulates
// t(t-1)/2, t(t-1)(t-2) and t(t-1)(2t+5).
struct TieStats {
    double pairs = 0.0; // sum t(t-1)/2
    double v0 = 0.0;    // sum t(t-1)(t-2)
    double v1 = 0.0;    // sum t(t-1)(2t+5)
};

TieStats tie_stats(std::span<const double> v) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    TieStats s;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        double t = static_cast<double>(j - i);
        s.pairs += t * (t - 1.0) / 2.0;
        s.v0 += t * (t - 1.0) * (t - 2.0);
        s.v1 += t * (t - 1.0) * (2.0 * t + 5.0);
        i = j;
    }
    return s;
}

} // namespace

const char* correlation_method_name(CorrelationMethod method) {
    return method == CorrelationMethod::Pearson ? "pearson" : "kendall";
}

Direction expected_direction(const std::string& variable) {
    if (variable == "time" || variable == "composite") return Direction::Positive;
    return Direction::Negative;
}

const char* direction_name(Direction direction) {
    return direction == Direction::Positive ? "positive" : "negative";
}

CorrelationOutcome pearson(std::span<const double> x, std::span<const double> y) {
    require_paired_input(x, y);
    const std::size_t n = x.size();

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw Error(ErrorCode::ConstantInput, "pearson requires non-constant vectors");

    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);

    double df = static_cast<double>(n) - 2.0;
    double p;
    if (std::fabs(r) >= 1.0) {
        p = 0.0;
    } else {
        double t = r * std::sqrt(df / (1.0 - r * r));
        p = detail::student_t_two_sided_p(t, df);
    }
    return {r, std::clamp(p, 0.0, 1.0)};
}

CorrelationOutcome kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    require_paired_input(x, y);
    const std::size_t n = x.size();
    if (is_constant(x) || is_constant(y))
        throw Error(ErrorCode::AllTied, "kendall requires a non-constant vector");

    double concordant = 0.0, discordant = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dx = x[i] - x[j];
            double dy = y[i] - y[j];
            double prod = dx * dy;
            if (prod > 0.0) concordant += 1.0;
            else if (prod < 0.0) discordant += 1.0;
        }
    }

    TieStats tx = tie_stats(x);
    TieStats ty = tie_stats(y);
    double total_pairs = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    double denom = std::sqrt(total_pairs - tx.pairs) * std::sqrt(total_pairs - ty.pairs);
    double con_minus_dis = concordant - discordant;
    double tau = std::clamp(con_minus_dis / denom, -1.0, 1.0);

    // Normal approximation with tie-adjusted variance.
    double m = static_cast<double>(n) * (static_cast<double>(n) - 1.0);
    double var = (m * (2.0 * static_cast<double>(n) + 5.0) - tx.v1 - ty.v1) / 18.0 +
                 (2.0 * tx.pairs * ty.pairs) / m;
    if (n > 2) var += tx.v0 * ty.v0 / (9.0 * m * (static_cast<double>(n) - 2.0));
    double p = 1.0;
    if (var > 0.0) {
        double z = con_minus_dis / std::sqrt(var);
        p = 2.0 * detail::normal_cdf(-std::fabs(z));
    }
    return {tau, std::clamp(p, 0.0, 1.0)};
}

NormalityResult normality_check(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 3 || n > 5000)
        throw Error(ErrorCode::OutOfRangeN,
                    "Shapiro-Wilk supports 3 <= n <= 5000, got " + std::to_string(n));
    for (double v : x)
        if (!std::isfinite(v)) throw Error(ErrorCode::ValueError, "non-finite value");
    if (is_constant(x))
        throw Error(ErrorCode::ConstantInput, "Shapiro-Wilk requires a non-constant vector");

    std::vector<double> y(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nd = static_cast<double>(n);

    // Expected normal order statistics (Blom approximation).
    std::vector<double> mvec(n);
    double sum_m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mvec[i] = detail::normal_quantile((static_cast<double>(i) + 1.0 - 0.375) / (nd + 0.25));
        sum_m2 += mvec[i] * mvec[i];
    }

    std::vector<double> a(n, 0.0);
    if (n == 3) {
        a[0] = -std::sqrt(0.5);
        a[2] = std::sqrt(0.5);
    } else {
        double rsn = 1.0 / std::sqrt(nd);
        auto poly5 = [rsn](double c5, double c4, double c3, double c2, double c1) {
            return ((((c5 * rsn + c4) * rsn + c3) * rsn + c2) * rsn + c1) * rsn;
        };
        double norm = std::sqrt(sum_m2);
        double an = poly5(-2.706056, 4.434685, -2.071190, -0.147981, 0.221157) + mvec[n - 1] / norm;
        double an1 = 0.0;
        double phi;
        if (n > 5) {
            an1 = poly5(-3.582633, 5.682633, -1.752461, -0.293762, 0.042981) + mvec[n - 2] / norm;
            phi = (sum_m2 - 2.0 * mvec[n - 1] * mvec[n - 1] - 2.0 * mvec[n - 2] * mvec[n - 2]) /
                  (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
        } else {
            phi = (sum_m2 - 2.0 * mvec[n - 1] * mvec[n - 1]) / (1.0 - 2.0 * an * an);
        }
        double sqrt_phi = std::sqrt(phi);
        for (std::size_t i = 0; i < n; ++i) a[i] = mvec[i] / sqrt_phi;
        a[n - 1] = an;
        a[0] = -an;
        if (n > 5) {
            a[n - 2] = an1;
            a[1] = -an1;
        }
    }

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= nd;
    double numerator = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        numerator += a[i] * y[i];
        ss += (y[i] - mean) * (y[i] - mean);
    }
    double w = numerator * numerator / ss;
    w = std::min(w, 1.0);

    double p;
    if (n == 3) {
        constexpr double pi6 = 1.90985931710274;  // 6 / pi
        constexpr double stqr = 1.04719755119660; // asin(sqrt(3/4))
        p = pi6 * (std::asin(std::sqrt(w)) - stqr);
        p = std::clamp(p, 0.0, 1.0);
    } else {
        double log1mw = std::log1p(-w);
        double mu, sigma, zstat;
        if (n <= 11) {
            double g = -2.273 + 0.459 * nd;
            mu = 0.5440 + nd * (-0.39978 + nd * (0.025054 - nd * 0.0006714));
            sigma = std::exp(1.3822 + nd * (-0.77857 + nd * (0.062767 - nd * 0.0020322)));
            zstat = (-std::log(g - log1mw) - mu) / sigma;
        } else {
            double ln = std::log(nd);
            mu = -1.5861 + ln * (-0.31082 + ln * (-0.083751 + ln * 0.0038915));
            sigma = std::exp(-0.4803 + ln * (-0.082676 + ln * 0.0030302));
            zstat = (log1mw - mu) / sigma;
        }
        p = 1.0 - detail::normal_cdf(zstat);
        p = std::clamp(p, 0.0, 1.0);
    }

    NormalityResult result;
    result.statistic = w;
    result.p_value = p;
    result.pass = p >= 0.05;
    return result;
}

CorrelationMethod select_method(std::span<const double> x, std::span<const double> y) {
    NormalityResult nx = normality_check(x);
    NormalityResult ny = normality_check(y);
    return nx.pass && ny.pass ? CorrelationMethod::Pearson : CorrelationMethod::Kendall;
}

double kendall_to_pearson(double tau) { return std::sin(std::numbers::pi * tau / 2.0); }

EffectSize to_effect_size(const CorrelationResult& result) {
    if (result.n < 4)
        throw Error(ErrorCode::NTooSmall,
                    "Fisher z needs n >= 4, got " + std::to_string(result.n));

    EffectSize effect;
    effect.dataset_id = result.dataset_id;
    effect.variable = result.variable;
    effect.n = result.n;
    effect.converted_from_kendall = result.method == CorrelationMethod::Kendall;
    effect.r = effect.converted_from_kendall ? kendall_to_pearson(result.coefficient)
                                             : result.coefficient;
    if (std::fabs(effect.r) >= 1.0) {
        effect.r = effect.r > 0.0 ? 0.9999 : -0.9999;
        effect.clamped = true;
    }
    effect.z = std::atanh(effect.r);
    effect.var_z = 1.0 / (static_cast<double>(result.n) - 3.0);
    return effect;
}

} // namespace cogscope
