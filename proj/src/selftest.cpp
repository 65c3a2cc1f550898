#include <metamd/selftest.hpp>

#include <metamd/chisq_mix.hpp>
#include <metamd/distributions.hpp>
#include <metamd/mu_estimation.hpp>
#include <metamd/q_engine.hpp>
#include <metamd/simulation.hpp>
#include <metamd/study.hpp>
#include <metamd/tau2_interval.hpp>
#include <metamd/tau2_point.hpp>

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace metamd {

namespace {

struct Check {
    std::string name;
    std::function<bool()> run;
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::vector<EffectRow> toy_effects(std::initializer_list<double> y,
                                   std::initializer_list<double> v2) {
    std::vector<EffectRow> rows;
    auto yi = y.begin();
    auto vi = v2.begin();
    for (; yi != y.end(); ++yi, ++vi) rows.push_back({*yi, *vi, 10, 10, 5.0});
    return rows;
}

std::vector<Check> make_checks() {
    return {
        {"normal cdf symmetry at 0",
         [] { return near(cdf(DistSpec::normal(0, 1), 0.0), 0.5, 1e-14); }},
        {"chisq(2) cdf exponential identity",
         [] { return near(cdf(DistSpec::chi_square(2), 2.0), 1.0 - std::exp(-1.0), 1e-12); }},
        {"normal cdf at 1.96",
         [] { return near(cdf(DistSpec::normal(0, 1), 1.96), 0.9750021, 1e-7); }},
        {"t(4) 0.975 quantile",
         [] { return near(quantile(DistSpec::student_t(4), 0.975), 2.7764, 5e-5); }},
        {"F(1,1e12) 0.95 quantile approaches chisq(1)",
         [] { return near(quantile(DistSpec::fisher_f(1, 1e12), 0.95), 3.8415, 1e-3); }},
        {"cdf/quantile round trip across families",
         [] {
             for (const DistSpec& spec :
                  {DistSpec::normal(0, 1), DistSpec::student_t(3.5),
                   DistSpec::chi_square(7.2), DistSpec::fisher_f(4, 17.5)}) {
                 for (double p = 0.01; p < 0.995; p += 0.07)
                     if (!near(cdf(spec, quantile(spec, p)), p, 1e-9)) return false;
             }
             return true;
         }},
        {"chisq mix additivity (1+1 df)",
         [] {
             return near(chisq_mix_cdf({{1.0, 1.0}, {1.0, 1.0}}, 2.0),
                         cdf(DistSpec::chi_square(2), 2.0), 1e-6);
         }},
        {"chisq mix scaling identity",
         [] {
             return near(chisq_mix_cdf({{2.0}, {3.0}}, 2.0 * 1.7),
                         cdf(DistSpec::chi_square(3), 1.7), 1e-6);
         }},
        {"md_effect hand values",
         [] {
             const EffectRow r = md_effect({4, 5, 4, 2, 3, 2});
             return near(r.y, 2.0, 1e-15) && near(r.v2, 2.0, 1e-15) &&
                    near(r.eff_n, 8.0 / 6.0, 1e-15);
         }},
        {"Q statistic hand values",
         [] {
             const auto e = toy_effects({0, 2}, {1, 1});
             return near(q_statistic(e, 0.0), 2.0, 1e-12) &&
                    near(q_statistic(e, 1.0), 1.0, 1e-12);
         }},
        {"welch moments two-study toy",
         [] {
             std::vector<StudySummary> studies = {{2, 0, 1, 2, 0, 1}, {2, 0, 1, 2, 0, 1}};
             const auto effects = validate_dataset(studies);
             const auto g = welch_g(studies);
             const WelchMoments m = welch_null_moments(effects, g, 0.0);
             return near(m.kappa1, 1.5, 1e-12) && near(m.kappa2, 5.5, 1e-12);
         }},
        {"f_approx matching toy",
         [] {
             WelchMoments m{1.5, 5.5};
             f_approx(m, 2);
             return near(m.f2, 17.5, 1e-9) && near(m.c, 1.5 * 15.5 / 17.5, 1e-9);
         }},
        {"DL hand value",
         [] {
             const auto e = toy_effects({0, 2}, {1, 1});
             return near(tau2_dl(e).value, 1.0, 1e-12);
         }},
        {"MP hand solve",
         [] {
             const auto e = toy_effects({0, 2}, {1, 1});
             return near(tau2_mp(e).value, 1.0, 1e-6);
         }},
        {"WT=MP and CDL=DL when g = 0",
         [] {
             const auto e = toy_effects({0.3, 1.9, 0.7}, {0.8, 1.2, 1.0});
             const std::vector<double> zeros(e.size(), 0.0);
             return near(tau2_wt(e, zeros).value, tau2_mp(e).value, 1e-10) &&
                    near(tau2_cdl(e, zeros).value, tau2_dl(e).value, 1e-12);
         }},
        {"mu IV hand value",
         [] {
             const auto e = toy_effects({0, 2}, {1, 3});
             const MuResult m = mu_iv(e, 1.0);
             return near(m.estimate, 2.0 / 3.0, 1e-12) && near(m.variance, 4.0 / 3.0, 1e-12);
         }},
        {"HKSJ hand value",
         [] {
             const auto e = toy_effects({0, 2}, {1, 1});
             const MuInterval ci = ci_mu_hksj(e, 1.0, 0.95);
             return near(ci.center, 1.0, 1e-12) && near(ci.upper - ci.center, 12.706, 5e-3);
         }},
        {"QP brackets MP when untruncated",
         [] {
             const auto e = toy_effects({0.0, 2.0, 4.0}, {1.0, 1.5, 0.7});
             const Tau2Interval ci = ci_qprofile(e, 0.95);
             const double mp = tau2_mp(e).value;
             return ci.lower <= mp && mp <= ci.upper;
         }},
        {"simulation determinism",
         [] {
             Scenario sc;
             sc.K = 5;
             sc.sizes.assign(5, 20);
             sc.n_pattern = "20";
             sc.q = 0.5;
             sc.reps = 50;
             sc.seed = 7;
             sc.methods = MethodSet::none();
             sc.methods.tau2_point[0] = true;
             const AggregateMetrics a = run_scenario(sc, 1);
             const AggregateMetrics b = run_scenario(sc, 4);
             return a.bias_tau2[0] == b.bias_tau2[0];
         }},
        {"arm split ceiling rule",
         [] {
             return arm_split(20, 0.75) == std::pair<std::size_t, std::size_t>{5, 15} &&
                    arm_split(12, 0.75) == std::pair<std::size_t, std::size_t>{3, 9};
         }},
    };
}

}  // namespace

int run_selftest(std::ostream& out) {
    int failures = 0;
    for (const Check& check : make_checks()) {
        bool ok = false;
        std::string err;
        try {
            ok = check.run();
        } catch (const std::exception& e) {
            err = e.what();
        }
        out << (ok ? "PASS" : "FAIL") << "  " << check.name;
        if (!ok && !err.empty()) out << "  (" << err << ")";
        out << '\n';
        if (!ok) ++failures;
    }
    return failures;
}

}  // namespace metamd
