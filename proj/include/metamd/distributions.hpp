#pragma once

#include <metamd/rng.hpp>

namespace metamd {

enum class DistFamily { Normal, StudentT, ChiSquare, FisherF };

/// Parametrized distribution. Degrees of freedom are real-valued throughout;
/// the fractional-df F distribution is required by the moment-matched
/// approximation to Cochran's Q.
struct DistSpec {
    DistFamily family;
    double p1;  // mean | df | d1
    double p2;  // sd   | --- | d2

    static DistSpec normal(double mean, double sd);
    static DistSpec student_t(double df);
    static DistSpec chi_square(double df);
    static DistSpec fisher_f(double d1, double d2);
};

double cdf(const DistSpec& spec, double x);

/// Inverse CDF; requires p in (0,1).
double quantile(const DistSpec& spec, double p);

/// One draw via inverse-CDF of a single uniform; deterministic given the
/// rng stream.
double sample(const DistSpec& spec, Rng& rng);

}  // namespace metamd
