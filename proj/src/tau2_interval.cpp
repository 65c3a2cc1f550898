#include <metamd/tau2_interval.hpp>

#include <metamd/chisq_mix.hpp>
#include <metamd/distributions.hpp>
#include <metamd/errors.hpp>
#include <metamd/q_engine.hpp>
#include <metamd/solver.hpp>
#include <metamd/tau2_point.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace metamd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double search_cap(std::span<const EffectRow> effects) {
    double vmax = 0.0;
    for (const auto& e : effects) vmax = std::max(vmax, e.v2);
    return 1e6 * vmax;
}

void check_level(double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("interval level must be in (0,1)");
}

/// Bounds from Q(tau2) = target(tau2, prob): the lower bound uses the upper
/// quantile of the null reference, the upper bound the lower quantile.
Tau2Interval q_profile_bounds(Tau2IntervalMethod method,
                              std::span<const EffectRow> effects, double level,
                              const std::function<double(double, double)>& target) {
    check_level(level);
    Tau2Interval ci;
    ci.method = method;
    ci.level = level;
    const double alpha = 1.0 - level;
    const double cap = search_cap(effects);

    const auto solve = [&](double prob, double& out, bool& truncated) {
        const auto h = [&](double t) { return q_statistic(effects, t) - target(t, prob); };
        const double h0 = h(0.0);
        if (h0 <= 0.0) {
            out = 0.0;
            truncated = h0 < 0.0;
            return;
        }
        const auto [hi, found] =
            expand_bracket([&](double t) { return h(t) < 0.0; }, 1.0, cap);
        if (!found) {
            out = kInf;
            return;
        }
        const RootResult root = brent_root(h, 0.0, hi, h0, h(hi), 0.0);
        out = root.x;
        if (!root.converged) ci.converged = false;
    };

    solve(1.0 - alpha / 2.0, ci.lower, ci.lower_truncated);
    solve(alpha / 2.0, ci.upper, ci.upper_truncated);
    if (std::isinf(ci.lower)) {  // degenerate data; keep the invariant lower <= upper
        ci.lower = 0.0;
        ci.converged = false;
    }
    return ci;
}

}  // namespace

const char* to_string(Tau2IntervalMethod m) {
    switch (m) {
        case Tau2IntervalMethod::QP: return "QP";
        case Tau2IntervalMethod::WT: return "WT";
        case Tau2IntervalMethod::PL: return "PL";
        case Tau2IntervalMethod::BJ: return "BJ";
        case Tau2IntervalMethod::J: return "J";
    }
    return "?";
}

Tau2Interval ci_qprofile(std::span<const EffectRow> effects, double level) {
    const double km1 = static_cast<double>(effects.size()) - 1.0;
    const DistSpec chisq = DistSpec::chi_square(km1);
    return q_profile_bounds(Tau2IntervalMethod::QP, effects, level,
                            [&](double, double prob) { return quantile(chisq, prob); });
}

Tau2Interval ci_wt(std::span<const EffectRow> effects, std::span<const double> g,
                   double level) {
    const std::size_t K = effects.size();
    return q_profile_bounds(Tau2IntervalMethod::WT, effects, level,
                            [&](double t, double prob) {
                                WelchMoments m = welch_null_moments(effects, g, t);
                                f_approx(m, K);
                                return wt_null_quantile(m, K, prob);
                            });
}

Tau2Interval ci_pl(std::span<const EffectRow> effects, double level) {
    check_level(level);
    Tau2Interval ci;
    ci.method = Tau2IntervalMethod::PL;
    ci.level = level;

    const Tau2Result fit = tau2_reml(effects);
    if (!fit.converged) {
        ci.converged = false;
        ci.upper = kInf;
        return ci;
    }
    const double lmax = reml_loglik(effects, fit.value);
    const double crit = quantile(DistSpec::chi_square(1.0), level);
    const auto dev = [&](double t) { return 2.0 * (lmax - reml_loglik(effects, t)) - crit; };
    const double cap = search_cap(effects);

    const double dev0 = dev(0.0);
    if (dev0 <= 0.0) {
        ci.lower = 0.0;
        ci.lower_truncated = fit.value > 0.0;
    } else {
        const RootResult root = brent_root(dev, 0.0, fit.value, dev0, -crit, 0.0);
        ci.lower = root.x;
        if (!root.converged) ci.converged = false;
    }

    const double start = std::max(fit.value, 1e-3);
    const auto [hi, found] =
        expand_bracket([&](double t) { return dev(start + t) > 0.0; }, 1.0, cap);
    if (!found) {
        ci.upper = kInf;
    } else {
        const RootResult root = brent_root(dev, fit.value, start + hi, -crit, dev(start + hi), 0.0);
        ci.upper = root.x;
        if (!root.converged) ci.converged = false;
    }
    return ci;
}

std::vector<double> q_mixture_eigenvalues(std::span<const EffectRow> effects,
                                          std::span<const double> fixed_weights,
                                          double tau2) {
    const std::size_t K = effects.size();
    if (fixed_weights.size() != K)
        throw ValidationError("q_mixture_eigenvalues: weight length mismatch");
    double S = 0.0;
    for (const double w : fixed_weights) S += w;

    // B = D A D - (D A 1)(D A 1)^T / S with D = diag(sqrt(v^2 + tau2)), A = diag(w).
    Eigen::MatrixXd B(K, K);
    Eigen::VectorXd u(K);
    for (std::size_t i = 0; i < K; ++i)
        u(static_cast<Eigen::Index>(i)) =
            std::sqrt(effects[i].v2 + tau2) * fixed_weights[i];
    B = -(u * u.transpose()) / S;
    for (std::size_t i = 0; i < K; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        B(ii, ii) += fixed_weights[i] * (effects[i].v2 + tau2);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = solver.eigenvalues();
    const double cutoff = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    std::vector<double> lambdas;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > cutoff) lambdas.push_back(ev(i));
    return lambdas;
}

namespace {

Tau2Interval mixture_interval(Tau2IntervalMethod method,
                              std::span<const EffectRow> effects,
                              std::span<const double> fixed_weights, double level) {
    check_level(level);
    Tau2Interval ci;
    ci.method = method;
    ci.level = level;
    const double alpha = 1.0 - level;
    const double cap = search_cap(effects);

    // Observed Q with the fixed weights.
    double S = 0.0, wy = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        S += fixed_weights[i];
        wy += fixed_weights[i] * effects[i].y;
    }
    const double ybar = wy / S;
    double q_obs = 0.0;
    for (std::size_t i = 0; i < effects.size(); ++i) {
        const double d = effects[i].y - ybar;
        q_obs += fixed_weights[i] * d * d;
    }

    const auto cdf_at = [&](double t) {
        ChiSqMix mix;
        mix.coeff = q_mixture_eigenvalues(effects, fixed_weights, t);
        mix.df.assign(mix.coeff.size(), 1.0);
        return chisq_mix_cdf(mix, q_obs);
    };

    const auto solve = [&](double prob, double& out, bool& truncated) {
        const double at0 = cdf_at(0.0);
        if (at0 <= prob) {  // mixture only grows with tau2, so the bound sits at 0
            out = 0.0;
            truncated = at0 < prob;
            return;
        }
        const auto h = [&](double t) { return cdf_at(t) - prob; };
        const auto [hi, found] =
            expand_bracket([&](double t) { return h(t) < 0.0; }, 1.0, cap);
        if (!found) {
            out = kInf;
            return;
        }
        const RootResult root = brent_root(h, 0.0, hi, at0 - prob, h(hi), 0.0);
        out = root.x;
        if (!root.converged) ci.converged = false;
    };

    solve(1.0 - alpha / 2.0, ci.lower, ci.lower_truncated);
    solve(alpha / 2.0, ci.upper, ci.upper_truncated);
    return ci;
}

}  // namespace

Tau2Interval ci_bj(std::span<const EffectRow> effects, double level) {
    std::vector<double> w;
    w.reserve(effects.size());
    for (const auto& e : effects) w.push_back(1.0 / e.v2);
    return mixture_interval(Tau2IntervalMethod::BJ, effects, w, level);
}

Tau2Interval ci_j(std::span<const EffectRow> effects, double level) {
    std::vector<double> w;
    w.reserve(effects.size());
    for (const auto& e : effects) w.push_back(1.0 / std::sqrt(e.v2));
    return mixture_interval(Tau2IntervalMethod::J, effects, w, level);
}

}  // namespace metamd
