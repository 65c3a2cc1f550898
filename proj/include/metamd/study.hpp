#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace metamd {

/// Two-arm study summary: per-arm size, sample mean, and sample variance.
struct StudySummary {
    std::size_t n_t = 0;
    double mean_t = 0.0;
    double var_t = 0.0;
    std::size_t n_c = 0;
    double mean_c = 0.0;
    double var_c = 0.0;
};

/// Per-study derived quantities for the mean-difference effect.
struct EffectRow {
    double y = 0.0;      // mean_t - mean_c
    double v2 = 0.0;     // var_t/n_t + var_c/n_c (unpooled)
    std::size_t n_t = 0;
    std::size_t n_c = 0;
    double eff_n = 0.0;  // n_t * n_c / (n_t + n_c)
};

/// Validates a single study (arm sizes >= 2, variances > 0); throws
/// ValidationError naming the offending field. `index` only labels messages.
void validate_study(const StudySummary& s, std::size_t index);

EffectRow md_effect(const StudySummary& s);

/// Validates the whole dataset (K >= 2 plus per-study invariants) and
/// returns the effect rows.
std::vector<EffectRow> validate_dataset(std::span<const StudySummary> studies);

/// Affine transform helper: means -> scale*mean (+ shift on the treatment
/// arm when shift_treatment_only), variances -> scale^2 * variance.
std::vector<StudySummary> shift_scale(std::span<const StudySummary> studies,
                                      double shift, double scale,
                                      bool shift_treatment_only = true);

}  // namespace metamd
