#include <metamd/distributions.hpp>

#include <metamd/errors.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>

namespace metamd {

namespace {

void require_finite_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ValidationError(std::string(what) + " must be finite and > 0");
}

template <typename F>
double dispatch(const DistSpec& spec, F&& f) {
    switch (spec.family) {
        case DistFamily::Normal:
            return f(boost::math::normal_distribution<double>(spec.p1, spec.p2));
        case DistFamily::StudentT:
            return f(boost::math::students_t_distribution<double>(spec.p1));
        case DistFamily::ChiSquare:
            return f(boost::math::chi_squared_distribution<double>(spec.p1));
        case DistFamily::FisherF:
            return f(boost::math::fisher_f_distribution<double>(spec.p1, spec.p2));
    }
    throw ValidationError("unknown distribution family");
}

}  // namespace

DistSpec DistSpec::normal(double mean, double sd) {
    if (!std::isfinite(mean)) throw ValidationError("normal mean must be finite");
    require_finite_positive(sd, "normal sd");
    return {DistFamily::Normal, mean, sd};
}

DistSpec DistSpec::student_t(double df) {
    require_finite_positive(df, "student-t df");
    return {DistFamily::StudentT, df, 0.0};
}

DistSpec DistSpec::chi_square(double df) {
    require_finite_positive(df, "chi-square df");
    return {DistFamily::ChiSquare, df, 0.0};
}

DistSpec DistSpec::fisher_f(double d1, double d2) {
    require_finite_positive(d1, "fisher-f d1");
    require_finite_positive(d2, "fisher-f d2");
    return {DistFamily::FisherF, d1, d2};
}

double cdf(const DistSpec& spec, double x) {
    if (std::isnan(x)) throw ValidationError("cdf: x is NaN");
    if (x == std::numeric_limits<double>::infinity()) return 1.0;
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    return dispatch(spec, [x](const auto& d) { return boost::math::cdf(d, x); });
}

double quantile(const DistSpec& spec, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("quantile: p must be in (0,1)");
    return dispatch(spec, [p](const auto& d) { return boost::math::quantile(d, p); });
}

double sample(const DistSpec& spec, Rng& rng) {
    return quantile(spec, rng.next_double());
}

}  // namespace metamd
