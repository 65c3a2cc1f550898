#include <metamd/mu_estimation.hpp>

#include <metamd/distributions.hpp>
#include <metamd/errors.hpp>
#include <metamd/q_engine.hpp>

#include <cmath>

namespace metamd {

namespace {

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("interval level must be in (0,1)");
}

}  // namespace

MuResult mu_iv(std::span<const EffectRow> effects, double tau2hat) {
    const QContext ctx = q_context(effects, tau2hat);
    return {ctx.pooled_mean, 1.0 / ctx.W};
}

MuResult mu_ssw(std::span<const EffectRow> effects) {
    if (effects.size() < 2) throw ValidationError("mu_ssw: need K >= 2");
    double sn = 0.0, sny = 0.0;
    for (const auto& e : effects) {
        sn += e.eff_n;
        sny += e.eff_n * e.y;
    }
    return {sny / sn, 0.0};
}

double var_ssw(std::span<const EffectRow> effects, double tau2hat) {
    if (!(tau2hat >= 0.0)) throw std::domain_error("var_ssw: tau2hat must be >= 0");
    double sn = 0.0, num = 0.0;
    for (const auto& e : effects) {
        sn += e.eff_n;
        num += e.eff_n * e.eff_n * (e.v2 + tau2hat);
    }
    return num / (sn * sn);
}

MuInterval ci_mu_z(const MuResult& mu, double level) {
    check_level(level);
    const double z = quantile(DistSpec::normal(0.0, 1.0), 1.0 - (1.0 - level) / 2.0);
    const double half = z * std::sqrt(mu.variance);
    return {mu.estimate, mu.estimate - half, mu.estimate + half, level, false};
}

MuInterval ci_mu_hksj(std::span<const EffectRow> effects, double tau2hat, double level) {
    check_level(level);
    const QContext ctx = q_context(effects, tau2hat);
    const double km1 = static_cast<double>(effects.size()) - 1.0;
    double ssq = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        const double d = effects[i].y - ctx.pooled_mean;
        ssq += ctx.weights[i] * d * d;
    }
    const double variance = ssq / (km1 * ctx.W);
    const double t = quantile(DistSpec::student_t(km1), 1.0 - (1.0 - level) / 2.0);
    const double half = t * std::sqrt(variance);
    return {ctx.pooled_mean, ctx.pooled_mean - half, ctx.pooled_mean + half, level,
            effects.size() == 2};
}

MuInterval ci_mu_ssw_t(std::span<const EffectRow> effects, double tau2hat, double level) {
    check_level(level);
    const MuResult center = mu_ssw(effects);
    const double km1 = static_cast<double>(effects.size()) - 1.0;
    const double t = quantile(DistSpec::student_t(km1), 1.0 - (1.0 - level) / 2.0);
    const double half = t * std::sqrt(var_ssw(effects, tau2hat));
    return {center.estimate, center.estimate - half, center.estimate + half, level,
            effects.size() == 2};
}

}  // namespace metamd
