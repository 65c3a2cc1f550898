#pragma once

#include <vector>

namespace metamd {

/// Positive linear combination of independent chi-square variables,
/// sum_i coeff[i] * chisq(df[i]).
struct ChiSqMix {
    std::vector<double> coeff;
    std::vector<double> df;

    void validate() const;
};

/// CDF of the mixture at x by Imhof-type numerical inversion of the
/// characteristic function. Absolute accuracy abs_tol (default 1e-6).
double chisq_mix_cdf(const ChiSqMix& mix, double x, double abs_tol = 1e-6);

}  // namespace metamd
