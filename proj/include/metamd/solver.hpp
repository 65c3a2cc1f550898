#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>

namespace metamd {

struct RootResult {
    double x = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Brent's method on [a,b]; requires f(a) and f(b) of opposite sign
/// (fa/fb may be supplied to save two evaluations).
RootResult brent_root(const std::function<double(double)>& f, double a, double b,
                      double fa, double fb, double abs_tol = 1e-8,
                      std::size_t max_iter = 200);

RootResult brent_root(const std::function<double(double)>& f, double a, double b,
                      double abs_tol = 1e-8, std::size_t max_iter = 200);

struct MinResult {
    double x = 0.0;
    double fx = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Brent parabolic-interpolation minimization on [a,b].
MinResult brent_minimize(const std::function<double(double)>& f, double a, double b,
                         double abs_tol = 1e-10, std::size_t max_iter = 200);

/// Doubling search for an upper bracket: smallest hi = lo_step * 2^j (j >= 0)
/// with pred(hi) true, capped at `cap`. Returns {hi, found}.
std::pair<double, bool> expand_bracket(const std::function<bool(double)>& pred,
                                       double lo_step, double cap);

}  // namespace metamd
