#pragma once

#include <metamd/study.hpp>

#include <span>

namespace metamd {

enum class Tau2IntervalMethod { QP, WT, PL, BJ, J };

const char* to_string(Tau2IntervalMethod m);

struct Tau2Interval {
    Tau2IntervalMethod method = Tau2IntervalMethod::QP;
    double lower = 0.0;
    double upper = 0.0;  // +inf when the search cap is exceeded
    double level = 0.95;
    bool lower_truncated = false;
    bool upper_truncated = false;
    bool converged = true;
};

/// Q-profile: Q(tau_L^2) = chisq_{K-1; 1-a/2}, Q(tau_U^2) = chisq_{K-1; a/2}.
Tau2Interval ci_qprofile(std::span<const EffectRow> effects, double level = 0.95);

/// Q-profile against the moment-matched scaled-F null distribution of Q,
/// with moments re-evaluated at each candidate tau2.
Tau2Interval ci_wt(std::span<const EffectRow> effects, std::span<const double> g,
                   double level = 0.95);

/// Profile-likelihood interval around the REML estimate.
Tau2Interval ci_pl(std::span<const EffectRow> effects, double level = 0.95);

/// Inverts the chi-square-mixture distribution of the fixed-weight Q
/// (weights 1/v_i^2) under candidate tau2.
Tau2Interval ci_bj(std::span<const EffectRow> effects, double level = 0.95);

/// Same construction with fixed weights 1/v_i.
Tau2Interval ci_j(std::span<const EffectRow> effects, double level = 0.95);

/// Eigenvalues of the quadratic-form matrix of the fixed-weight Q statistic
/// at marginal variances v_i^2 + tau2 (exposed for testing).
std::vector<double> q_mixture_eigenvalues(std::span<const EffectRow> effects,
                                          std::span<const double> fixed_weights,
                                          double tau2);

}  // namespace metamd
