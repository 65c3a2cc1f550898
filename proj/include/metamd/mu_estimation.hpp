#pragma once

#include <metamd/study.hpp>

#include <span>

namespace metamd {

struct MuResult {
    double estimate = 0.0;
    double variance = 0.0;
};

struct MuInterval {
    double center = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    bool low_df = false;  // K = 2: a single degree of freedom behind the t quantile
};

/// Inverse-variance weighted mean at tau2hat; variance = 1/sum(w).
MuResult mu_iv(std::span<const EffectRow> effects, double tau2hat);

/// Effective-sample-size weighted mean (estimate only; variance left 0).
MuResult mu_ssw(std::span<const EffectRow> effects);

/// Variance of the SSW estimate: sum n~_i^2 (v_i^2 + tau2hat) / (sum n~_i)^2.
double var_ssw(std::span<const EffectRow> effects, double tau2hat);

/// center +/- z_{1-a/2} sqrt(variance).
MuInterval ci_mu_z(const MuResult& mu, double level = 0.95);

/// IV center with the Hartung-Knapp-Sidik-Jonkman variance and t quantiles.
MuInterval ci_mu_hksj(std::span<const EffectRow> effects, double tau2hat,
                      double level = 0.95);

/// SSW center, var_ssw variance, t quantiles on K-1 df.
MuInterval ci_mu_ssw_t(std::span<const EffectRow> effects, double tau2hat,
                       double level = 0.95);

}  // namespace metamd
