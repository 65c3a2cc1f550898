#include <metamd/solver.hpp>

#include <algorithm>
#include <limits>

namespace metamd {

RootResult brent_root(const std::function<double(double)>& f, double a, double b,
                      double fa, double fb, double abs_tol, std::size_t max_iter) {
    RootResult res;
    if (fa == 0.0) return {a, true, 0};
    if (fb == 0.0) return {b, true, 0};
    if (fa * fb > 0.0) return {a, false, 0};

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        res.iterations = iter;
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * abs_tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) {
            res.x = b;
            res.converged = true;
            return res;
        }
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            e = d = b - a;
        }
    }
    res.x = b;
    res.converged = false;
    return res;
}

RootResult brent_root(const std::function<double(double)>& f, double a, double b,
                      double abs_tol, std::size_t max_iter) {
    return brent_root(f, a, b, f(a), f(b), abs_tol, max_iter);
}

MinResult brent_minimize(const std::function<double(double)>& f, double a, double b,
                         double abs_tol, std::size_t max_iter) {
    const double gold = 0.5 * (3.0 - std::sqrt(5.0));
    double x = a + gold * (b - a);
    double w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    MinResult res;
    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        res.iterations = iter;
        const double xm = 0.5 * (a + b);
        const double tol1 = std::sqrt(std::numeric_limits<double>::epsilon()) * std::abs(x) + abs_tol;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) {
            res.x = x;
            res.fx = fx;
            res.converged = true;
            return res;
        }
        bool parabolic = false;
        if (std::abs(e) > tol1) {
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double e_old = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (xm > x) ? tol1 : -tol1;
                parabolic = true;
            }
        }
        if (!parabolic) {
            e = (x >= xm) ? a - x : b - x;
            d = gold * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
        const double fu = f(u);
        if (fu <= fx) {
            if (u >= x) a = x; else b = x;
            v = w; w = x; x = u;
            fv = fw; fw = fx; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; w = u;
                fv = fw; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    res.x = x;
    res.fx = fx;
    res.converged = false;
    return res;
}

std::pair<double, bool> expand_bracket(const std::function<bool(double)>& pred,
                                       double lo_step, double cap) {
    double hi = lo_step;
    while (hi <= cap) {
        if (pred(hi)) return {hi, true};
        hi *= 2.0;
    }
    return {cap, false};
}

}  // namespace metamd
