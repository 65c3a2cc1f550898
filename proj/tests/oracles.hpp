#pragma once

// Independent reference implementations used only to check the library.
// Everything here is deliberately written from the defining formulas
// (series, continued fractions, grid scans, brute-force simulation) and
// shares no code with the implementation under test.

#include <metamd/study.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace oracles {

double erf_oracle(double x);
double normal_cdf_oracle(double x);

/// Regularized lower incomplete gamma P(a,x).
double gammainc_lower_reg(double a, double x);
/// Regularized incomplete beta I_x(a,b).
double betainc_reg(double a, double b, double x);

double chisq_cdf_oracle(double df, double x);
double t_cdf_oracle(double df, double x);
double f_cdf_oracle(double d1, double d2, double x);

/// Bisection inverse of a monotone cdf on [lo,hi].
double quantile_by_bisection(double (*cdf)(double, double), double param, double p,
                             double lo, double hi);
double chisq_quantile_oracle(double df, double p);
double t_quantile_oracle(double df, double p);

/// Q(tau2) from the defining sum (no shared code with the q-engine).
double q_oracle(std::span<const metamd::EffectRow> effects, double tau2);

/// kappa1(tau2) from the defining sum.
double kappa1_oracle(std::span<const metamd::EffectRow> effects,
                     std::span<const double> g, double tau2);

/// Two-stage grid scan (coarse 0.01, fine 1e-4) for the root of
/// Q(tau2) = target(tau2); returns 0 when Q(0) <= target(0).
double grid_root(std::span<const metamd::EffectRow> effects,
                 const std::vector<double>& g, bool use_kappa1_target,
                 double fixed_target, double hi);

/// Grid maximization of the restricted log-likelihood (coarse + fine scan).
double reml_grid_oracle(std::span<const metamd::EffectRow> effects, double hi);

double reml_loglik_oracle(std::span<const metamd::EffectRow> effects, double tau2);

/// Empirical CDF of sum_i coeff[i]*chisq(int df[i]) at x from `draws`
/// squared-normal simulations.
double mixture_ecdf(const std::vector<double>& coeff, const std::vector<int>& df,
                    double x, std::size_t draws, std::uint64_t seed);

}  // namespace oracles
