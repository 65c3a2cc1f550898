#include <metamd/q_engine.hpp>

#include <metamd/distributions.hpp>
#include <metamd/errors.hpp>

#include <cmath>
#include <limits>

namespace metamd {

QContext q_context(std::span<const EffectRow> effects, double tau2) {
    if (effects.size() < 2) throw ValidationError("q_context: need K >= 2");
    if (!(tau2 >= 0.0)) throw std::domain_error("q_context: tau2 must be >= 0");
    QContext ctx;
    ctx.weights.reserve(effects.size());
    double wy = 0.0;
    for (const auto& e : effects) {
        const double w = 1.0 / (e.v2 + tau2);
        ctx.weights.push_back(w);
        ctx.W += w;
        ctx.W2 += w * w;
        wy += w * e.y;
    }
    ctx.pooled_mean = wy / ctx.W;
    ctx.p.reserve(effects.size());
    for (const double w : ctx.weights) ctx.p.push_back(1.0 - w / ctx.W);
    return ctx;
}

double q_statistic(std::span<const EffectRow> effects, double tau2) {
    const QContext ctx = q_context(effects, tau2);
    double q = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        const double d = effects[i].y - ctx.pooled_mean;
        q += ctx.weights[i] * d * d;
    }
    return q;
}

double welch_g(const StudySummary& s) {
    validate_study(s, 0);
    const double nt = static_cast<double>(s.n_t);
    const double nc = static_cast<double>(s.n_c);
    return s.var_t * s.var_t / (nt * nt * (nt - 1.0)) +
           s.var_c * s.var_c / (nc * nc * (nc - 1.0));
}

std::vector<double> welch_g(std::span<const StudySummary> studies) {
    std::vector<double> g;
    g.reserve(studies.size());
    for (const auto& s : studies) g.push_back(welch_g(s));
    return g;
}

namespace {

double correction_term(std::span<const EffectRow> effects, std::span<const double> g,
                       double tau2) {
    if (g.size() != effects.size())
        throw ValidationError("welch moments: g length must match effects");
    const QContext ctx = q_context(effects, tau2);
    double sum = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        const double w = ctx.weights[i];
        sum += w * w * g[i] * ctx.p[i] * ctx.p[i];
    }
    return sum;
}

}  // namespace

WelchMoments welch_null_moments(std::span<const EffectRow> effects,
                                std::span<const double> g, double tau2) {
    const double corr = correction_term(effects, g, tau2);
    const double km1 = static_cast<double>(effects.size()) - 1.0;
    WelchMoments m;
    m.kappa1 = km1 + 2.0 * corr;
    m.kappa2 = 2.0 * km1 + 14.0 * corr;
    return m;
}

void f_approx(WelchMoments& m, std::size_t K) {
    if (K < 2) throw ValidationError("f_approx: need K >= 2");
    if (!(m.kappa1 > 0.0) || !(m.kappa2 > 0.0))
        throw ValidationError("f_approx: moments must be positive");
    const double d1 = static_cast<double>(K) - 1.0;
    const double r = m.kappa2 / (m.kappa1 * m.kappa1);
    const double denom = r * d1 - 2.0;
    if (denom > 0.0) {
        const double f2 = (4.0 * r * d1 + 2.0 * d1 - 4.0) / denom;
        if (f2 > 4.0 && std::isfinite(f2)) {
            m.f2 = f2;
            m.c = m.kappa1 * (f2 - 2.0) / f2;
            m.degenerate = false;
            return;
        }
    }
    // Variance matching infeasible: keep the mean match with a scaled chi-square.
    m.f2 = std::numeric_limits<double>::infinity();
    m.c = m.kappa1 / d1;
    m.degenerate = true;
}

double wt_null_quantile(const WelchMoments& m, std::size_t K, double prob) {
    const double d1 = static_cast<double>(K) - 1.0;
    if (std::isinf(m.f2))
        return (m.kappa1 / d1) * quantile(DistSpec::chi_square(d1), prob);
    return m.c * quantile(DistSpec::fisher_f(d1, m.f2), prob);
}

double expected_q_alternative(std::span<const EffectRow> effects,
                              std::span<const double> g, double tau2) {
    if (!(tau2 >= 0.0)) throw std::domain_error("expected_q_alternative: tau2 must be >= 0");
    const QContext ctx = q_context(effects, 0.0);
    const double km1 = static_cast<double>(effects.size()) - 1.0;
    return km1 + 2.0 * correction_term(effects, g, 0.0) +
           tau2 * (ctx.W - ctx.W2 / ctx.W);
}

}  // namespace metamd
