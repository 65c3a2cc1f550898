#include <metamd/chisq_mix.hpp>

#include <metamd/errors.hpp>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace metamd {

void ChiSqMix::validate() const {
    if (coeff.empty() || coeff.size() != df.size())
        throw ValidationError("chisq mix: coeff/df must be nonempty and equal length");
    for (std::size_t i = 0; i < coeff.size(); ++i) {
        if (!(coeff[i] > 0.0) || !std::isfinite(coeff[i]))
            throw ValidationError("chisq mix: coefficients must be finite and > 0");
        if (!(df[i] > 0.0) || !std::isfinite(df[i]))
            throw ValidationError("chisq mix: dfs must be finite and > 0");
    }
}

// Imhof (1961): P(Q > x) = 1/2 + (1/pi) * Int_0^inf sin(theta(u)) / (u rho(u)) du
// with theta(u) = (1/2) sum h_i atan(l_i u) - x u / 2 and
// rho(u) = prod (1 + l_i^2 u^2)^(h_i / 4).
double chisq_mix_cdf(const ChiSqMix& mix, double x, double abs_tol) {
    mix.validate();
    if (!std::isfinite(x)) {
        if (std::isnan(x)) throw ValidationError("chisq_mix_cdf: x is NaN");
        return x > 0.0 ? 1.0 : 0.0;
    }
    if (x <= 0.0) return 0.0;

    const std::size_t m = mix.coeff.size();
    // One term is exactly a scaled chi-square; the Imhof tail bound decays
    // like U^{-df/2} there, far too slowly to integrate.
    if (m == 1)
        return boost::math::cdf(boost::math::chi_squared_distribution<double>(mix.df[0]),
                                x / mix.coeff[0]);
    // Normalize by the largest coefficient: P(sum l_i X_i <= x) is invariant
    // under common rescaling, and doing it here makes the numerical result
    // scale-invariant too (the quadrature sees identical inputs).
    const double scale = *std::max_element(mix.coeff.begin(), mix.coeff.end());
    std::vector<double> l(mix.coeff);
    for (double& li : l) li /= scale;
    x /= scale;
    const auto& h = mix.df;

    const auto integrand = [&](double u) -> double {
        if (u <= 0.0) return 0.5 * (std::inner_product(h.begin(), h.end(), l.begin(), 0.0) - x);
        double theta = -0.5 * x * u;
        double log_rho = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double lu = l[i] * u;
            theta += 0.5 * h[i] * std::atan(lu);
            log_rho += 0.25 * h[i] * std::log1p(lu * lu);
        }
        return std::sin(theta) * std::exp(-log_rho) / u;
    };

    // Truncation point from Imhof's tail bound:
    //   |tail| <= 1 / (pi k U^k prod l_i^(h_i/2)),  k = sum h_i / 2.
    const double k = 0.5 * std::accumulate(h.begin(), h.end(), 0.0);
    double log_prod = 0.0;
    for (std::size_t i = 0; i < m; ++i) log_prod += 0.5 * h[i] * std::log(l[i]);
    const double tail_budget = 0.25 * abs_tol;
    const double log_decay =
        (std::log(2.0) - std::log(M_PI * k * tail_budget) - log_prod) / k;
    // Oscillation bound: past u ~ 2*sum(h)/x the phase derivative is at least
    // x/4, and integration by parts gives |tail| <= ~12 g(U)/x with
    // g(U) <= U^-(k+1) / prod l^(h/2). Often far smaller than the pure
    // envelope-decay bound; both are valid truncation points, take the min.
    const double sum_h = std::accumulate(h.begin(), h.end(), 0.0);
    double log_upper = log_decay;
    if (x > 0.0) {
        const double log_osc =
            std::max(std::log(2.0 * sum_h / x),
                     (std::log(12.0) - std::log(x) - std::log(tail_budget) - log_prod) /
                         (k + 1.0));
        log_upper = std::min(log_decay, log_osc);
    }
    double upper = std::exp(std::min(log_upper, 30.0));
    upper = std::clamp(upper, 1.0, 1e13);

    // Chunk so no segment spans too many oscillations of sin(theta).
    const double freq = 0.5 * x + 0.5 * std::inner_product(h.begin(), h.end(), l.begin(), 0.0);
    const double oscillations = upper * freq / (2.0 * M_PI);
    const std::size_t nchunks =
        static_cast<std::size_t>(std::clamp(std::ceil(oscillations / 8.0), 1.0, 4096.0));
    const double chunk = upper / static_cast<double>(nchunks);

    using quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    double integral = 0.0;
    double err_total = 0.0;
    const double chunk_tol = 0.5 * abs_tol * M_PI / static_cast<double>(nchunks);
    for (std::size_t c = 0; c < nchunks; ++c) {
        double err = 0.0;
        integral += quad::integrate(integrand, c * chunk, (c + 1) * chunk, 12, chunk_tol, &err);
        err_total += err;
    }
    err_total = err_total / M_PI + tail_budget;
    if (!(err_total <= abs_tol))
        throw NumericError("chisq_mix_cdf: quadrature did not reach tolerance", err_total);

    const double upper_tail = 0.5 + integral / M_PI;
    return std::clamp(1.0 - upper_tail, 0.0, 1.0);
}

}  // namespace metamd
