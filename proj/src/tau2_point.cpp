#include <metamd/tau2_point.hpp>

#include <metamd/errors.hpp>
#include <metamd/q_engine.hpp>
#include <metamd/solver.hpp>

#include <cmath>

namespace metamd {

namespace {

constexpr double kBracketCap = 1e6;

Tau2Result moment_closed_form(Tau2Method method, double numerator, double denominator) {
    Tau2Result r;
    r.method = method;
    if (!(denominator > 0.0))
        throw NumericError("tau2 moment estimator: nonpositive denominator", 0.0);
    const double raw = numerator / denominator;
    if (raw <= 0.0) {
        r.value = 0.0;
        r.truncated = raw < 0.0;
    } else {
        r.value = raw;
    }
    return r;
}

/// Solves Q(tau2) = target(tau2) for a nonincreasing difference; returns the
/// truncated-at-zero result when the difference is already <= 0 at tau2 = 0.
Tau2Result profile_root(Tau2Method method, std::span<const EffectRow> effects,
                        const std::function<double(double)>& target) {
    Tau2Result r;
    r.method = method;
    const auto h = [&](double t) { return q_statistic(effects, t) - target(t); };
    const double h0 = h(0.0);
    if (h0 <= 0.0) {
        r.value = 0.0;
        r.truncated = h0 < 0.0;
        return r;
    }
    const auto [hi, found] =
        expand_bracket([&](double t) { return h(t) < 0.0; }, 1.0, kBracketCap);
    if (!found) {
        r.converged = false;
        r.value = hi;
        r.diagnostic = "no sign change up to tau2 = " + std::to_string(hi);
        return r;
    }
    // abs_tol 0: Brent's 2*eps*|b| floor takes over, giving machine-precision
    // roots so scale equivariance survives to ~1e-12 relative.
    const RootResult root = brent_root(h, 0.0, hi, h0, h(hi), 0.0);
    r.value = root.x;
    r.converged = root.converged;
    r.iterations = root.iterations;
    if (!root.converged) r.diagnostic = "root solve did not converge";
    return r;
}

}  // namespace

const char* to_string(Tau2Method m) {
    switch (m) {
        case Tau2Method::DL: return "DL";
        case Tau2Method::REML: return "REML";
        case Tau2Method::MP: return "MP";
        case Tau2Method::J: return "J";
        case Tau2Method::WT: return "WT";
        case Tau2Method::CDL: return "CDL";
    }
    return "?";
}

Tau2Result tau2_dl(std::span<const EffectRow> effects) {
    const QContext ctx = q_context(effects, 0.0);
    const double q = q_statistic(effects, 0.0);
    const double km1 = static_cast<double>(effects.size()) - 1.0;
    return moment_closed_form(Tau2Method::DL, q - km1, ctx.W - ctx.W2 / ctx.W);
}

Tau2Result tau2_cdl(std::span<const EffectRow> effects, std::span<const double> g) {
    const QContext ctx = q_context(effects, 0.0);
    const double q = q_statistic(effects, 0.0);
    const WelchMoments m = welch_null_moments(effects, g, 0.0);
    return moment_closed_form(Tau2Method::CDL, q - m.kappa1, ctx.W - ctx.W2 / ctx.W);
}

Tau2Result tau2_mp(std::span<const EffectRow> effects) {
    const double km1 = static_cast<double>(effects.size()) - 1.0;
    return profile_root(Tau2Method::MP, effects, [km1](double) { return km1; });
}

Tau2Result tau2_wt(std::span<const EffectRow> effects, std::span<const double> g) {
    return profile_root(Tau2Method::WT, effects, [&](double t) {
        return welch_null_moments(effects, g, t).kappa1;
    });
}

double reml_loglik(std::span<const EffectRow> effects, double tau2) {
    const QContext ctx = q_context(effects, tau2);
    double loglik = -0.5 * std::log(ctx.W);
    for (std::size_t i = 0; i < effects.size(); ++i) {
        const double d = effects[i].y - ctx.pooled_mean;
        loglik += -0.5 * std::log(effects[i].v2 + tau2) - 0.5 * ctx.weights[i] * d * d;
    }
    return loglik;
}

double reml_loglik_deriv(std::span<const EffectRow> effects, double tau2) {
    const QContext ctx = q_context(effects, tau2);
    double sw2d2 = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        const double d = effects[i].y - ctx.pooled_mean;
        sw2d2 += ctx.weights[i] * ctx.weights[i] * d * d;
    }
    return 0.5 * (sw2d2 - ctx.W + ctx.W2 / ctx.W);
}

Tau2Result tau2_reml(std::span<const EffectRow> effects) {
    Tau2Result r;
    r.method = Tau2Method::REML;
    const double d0 = reml_loglik_deriv(effects, 0.0);
    if (d0 <= 0.0) {
        r.value = 0.0;
        r.truncated = d0 < 0.0;
        return r;
    }
    const auto deriv = [&](double t) { return reml_loglik_deriv(effects, t); };
    const auto [hi, found] =
        expand_bracket([&](double t) { return deriv(t) < 0.0; }, 1.0, kBracketCap);
    if (!found) {
        r.converged = false;
        r.value = hi;
        r.diagnostic = "profile likelihood still increasing at tau2 = " + std::to_string(hi);
        return r;
    }
    const RootResult root = brent_root(deriv, 0.0, hi, d0, deriv(hi), 0.0, 100);
    r.value = root.x;
    r.iterations = root.iterations;
    r.converged = root.converged;
    if (!root.converged) {
        r.diagnostic = "stationarity solve exceeded iteration cap";
        return r;
    }
    // Interior stationary point must beat the boundary.
    if (reml_loglik(effects, 0.0) > reml_loglik(effects, root.x)) {
        r.value = 0.0;
        r.truncated = true;
    }
    return r;
}

Tau2Result tau2_j(std::span<const EffectRow> effects) {
    if (effects.size() < 2) throw ValidationError("tau2_j: need K >= 2");
    double A = 0.0, ay = 0.0;
    std::vector<double> a;
    a.reserve(effects.size());
    for (const auto& e : effects) {
        a.push_back(1.0 / std::sqrt(e.v2));  // fixed reciprocal-SE weights
        A += a.back();
        ay += a.back() * e.y;
    }
    const double ybar = ay / A;
    double q_a = 0.0, e0 = 0.0, slope = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        const double d = effects[i].y - ybar;
        const double one_minus = 1.0 - a[i] / A;
        q_a += a[i] * d * d;
        e0 += a[i] * effects[i].v2 * one_minus;
        slope += a[i] * one_minus;
    }
    return moment_closed_form(Tau2Method::J, q_a - e0, slope);
}

}  // namespace metamd
