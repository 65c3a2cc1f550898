#pragma once

#include <metamd/study.hpp>

#include <span>
#include <vector>

namespace metamd {

/// Inverse-variance weight state at a given tau2: w_i = 1/(v_i^2 + tau2),
/// W = sum w_i, W2 = sum w_i^2, p_i = 1 - w_i/W, pooled_mean = sum w_i y_i / W.
struct QContext {
    std::vector<double> weights;
    std::vector<double> p;
    double W = 0.0;
    double W2 = 0.0;
    double pooled_mean = 0.0;
};

QContext q_context(std::span<const EffectRow> effects, double tau2);

/// Cochran's Q evaluated with weights at tau2; nonincreasing in tau2.
double q_statistic(std::span<const EffectRow> effects, double tau2);

/// Welch correction term g_i = s_T^4/(n_T^2 (n_T-1)) + s_C^4/(n_C^2 (n_C-1)).
double welch_g(const StudySummary& s);

std::vector<double> welch_g(std::span<const StudySummary> studies);

/// First two moments of Q and its scaled-F approximation c * F_{K-1,f2}.
/// f2 == +inf marks the scaled chi-square fallback.
struct WelchMoments {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double c = 1.0;
    double f2 = 0.0;
    bool degenerate = false;  // variance matching infeasible, chi-square fallback
};

/// kappa1 = (K-1) + 2 sum w_i^2 g_i p_i^2, kappa2 = 2(K-1) + 14 sum w_i^2 g_i p_i^2,
/// with weights evaluated at tau2 and g_i fixed at their data values.
WelchMoments welch_null_moments(std::span<const EffectRow> effects,
                                std::span<const double> g, double tau2);

/// Two-moment match of c * F_{K-1,f2} to (kappa1, kappa2). Fills c/f2/degenerate.
void f_approx(WelchMoments& m, std::size_t K);

/// Quantile of the matched null distribution of Q.
double wt_null_quantile(const WelchMoments& m, std::size_t K, double prob);

/// E(Q) under alternatives with fixed-effect weights:
/// kappa1(0) + tau2 * (W - W2/W).
double expected_q_alternative(std::span<const EffectRow> effects,
                              std::span<const double> g, double tau2);

}  // namespace metamd
