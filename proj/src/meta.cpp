#include "cogscope/meta.hpp"

#include <algorithm>
#include <cmath>

#include "cogscope/detail/special.hpp"

namespace cogscope {

namespace {

double reml_tau2(const std::vector<double>& z, const std::vector<double>& v, double start) {
    double tau2 = std::max(0.0, start);
    for (int iter = 0; iter < 200; ++iter) {
        double sw = 0.0, swz = 0.0;
        std::vector<double> w(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            w[i] = 1.0 / (v[i] + tau2);
            sw += w[i];
            swz += w[i] * z[i];
        }
        double mu = swz / sw;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            num += w[i] * w[i] * ((z[i] - mu) * (z[i] - mu) - v[i]);
            den += w[i] * w[i];
        }
        double next = std::max(0.0, num / den + 1.0 / sw);
        if (std::fabs(next - tau2) < 1e-12) return next;
        tau2 = next;
    }
    return tau2;
}

} // namespace

const char* interpretation_name(EffectInterpretation interpretation) {
    switch (interpretation) {
        case EffectInterpretation::None: return "none";
        case EffectInterpretation::Small: return "small";
        case EffectInterpretation::Medium: return "medium";
        case EffectInterpretation::Large: return "large";
    }
    return "none";
}

PooledStudyEffect pool_within_study(const std::vector<EffectSize>& effects, double rho) {
    if (effects.empty())
        throw Error(ErrorCode::ValueError, "pool_within_study needs at least one effect");
    for (const auto& e : effects) {
        if (e.dataset_id != effects.front().dataset_id)
            throw Error(ErrorCode::MixedStudies, "effects span datasets '" +
                                                 effects.front().dataset_id + "' and '" +
                                                 e.dataset_id + "'");
        if (e.variable != effects.front().variable)
            throw Error(ErrorCode::MixedStudies, "effects span variables '" +
                                                 effects.front().variable + "' and '" +
                                                 e.variable + "'");
        if (e.var_z <= 0.0)
            throw Error(ErrorCode::ValueError, "effect variance must be positive");
    }

    PooledStudyEffect pooled;
    pooled.dataset_id = effects.front().dataset_id;
    pooled.variable = effects.front().variable;

    const double m = static_cast<double>(effects.size());
    double zsum = 0.0;
    double cov_sum = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        zsum += effects[i].z;
        pooled.n += effects[i].n;
        for (std::size_t j = 0; j < effects.size(); ++j) {
            if (i == j) cov_sum += effects[i].var_z;
            else cov_sum += rho * std::sqrt(effects[i].var_z * effects[j].var_z);
        }
    }
    pooled.z = zsum / m;
    pooled.var_z = cov_sum / (m * m);
    if (effects.size() > 1)
        for (std::size_t i = 0; i < effects.size(); ++i)
            pooled.members.push_back("outcome-" + std::to_string(i + 1));
    double se = std::sqrt(pooled.var_z);
    pooled.p_value = se > 0.0 ? 2.0 * detail::normal_cdf(-std::fabs(pooled.z) / se) : 0.0;
    return pooled;
}

MetaResult random_effects(const std::vector<PooledStudyEffect>& effects,
                          Tau2Estimator estimator) {
    if (effects.empty())
        throw Error(ErrorCode::TooFewStudies, "no study effects to pool");
    for (const auto& e : effects)
        if (e.var_z <= 0.0)
            throw Error(ErrorCode::ValueError, "effect variance must be positive");

    std::vector<PooledStudyEffect> sorted(effects);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const PooledStudyEffect& a, const PooledStudyEffect& b) {
                         return a.dataset_id < b.dataset_id;
                     });

    MetaResult result;
    result.variable = sorted.front().variable;
    result.k = static_cast<int>(sorted.size());

    const double z975 = detail::normal_quantile(0.975);

    if (sorted.size() == 1) {
        const auto& e = sorted.front();
        double se = std::sqrt(e.var_z);
        result.summary_z = e.z;
        result.summary_r = std::tanh(e.z);
        result.ci_low_r = std::tanh(e.z - z975 * se);
        result.ci_high_r = std::tanh(e.z + z975 * se);
        result.tau2 = 0.0;
        result.q = 0.0;
        result.i2 = 0.0;
        result.p_value = 2.0 * detail::normal_cdf(-std::fabs(e.z) / se);
        result.weights.push_back({e.dataset_id, 1.0, e.members.size() > 1});
        result.interpretation = interpret(result.summary_r);
        result.synthesized = false;
        return result;
    }

    const std::size_t k = sorted.size();
    std::vector<double> z(k), v(k);
    for (std::size_t i = 0; i < k; ++i) {
        z[i] = sorted[i].z;
        v[i] = sorted[i].var_z;
    }

    // Fixed-effect weights drive Q and the DL moment estimate.
    double sw = 0.0, sw2 = 0.0, swz = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double w = 1.0 / v[i];
        sw += w;
        sw2 += w * w;
        swz += w * z[i];
    }
    double fixed_mean = swz / sw;
    double q = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double w = 1.0 / v[i];
        q += w * (z[i] - fixed_mean) * (z[i] - fixed_mean);
    }
    double df = static_cast<double>(k) - 1.0;
    double c = sw - sw2 / sw;
    double tau2_dl = c > 0.0 ? std::max(0.0, (q - df) / c) : 0.0;

    double tau2 = tau2_dl;
    if (estimator == Tau2Estimator::RemlIterative) tau2 = reml_tau2(z, v, tau2_dl);

    double sw_star = 0.0, swz_star = 0.0;
    std::vector<double> w_star(k);
    for (std::size_t i = 0; i < k; ++i) {
        w_star[i] = 1.0 / (v[i] + tau2);
        sw_star += w_star[i];
        swz_star += w_star[i] * z[i];
    }
    double summary_z = swz_star / sw_star;
    double se = std::sqrt(1.0 / sw_star);

    result.summary_z = summary_z;
    result.summary_r = std::tanh(summary_z);
    result.ci_low_r = std::tanh(summary_z - z975 * se);
    result.ci_high_r = std::tanh(summary_z + z975 * se);
    result.tau2 = tau2;
    result.q = q;
    result.i2 = q > 0.0 ? std::max(0.0, (q - df) / q) * 100.0 : 0.0;
    result.p_value = 2.0 * detail::normal_cdf(-std::fabs(summary_z) / se);
    for (std::size_t i = 0; i < k; ++i)
        result.weights.push_back({sorted[i].dataset_id, w_star[i] / sw_star,
                                  sorted[i].members.size() > 1});
    result.interpretation = interpret(result.summary_r);
    result.synthesized = true;
    return result;
}

EffectInterpretation interpret(double summary_r) {
    double magnitude = std::fabs(summary_r);
    if (magnitude > 0.5) return EffectInterpretation::Large;
    if (magnitude > 0.3) return EffectInterpretation::Medium;
    if (magnitude > 0.1) return EffectInterpretation::Small;
    return EffectInterpretation::None;
}

} // namespace cogscope
