#include <metamd/simulation.hpp>

#include <metamd/distributions.hpp>
#include <metamd/errors.hpp>
#include <metamd/mu_estimation.hpp>
#include <metamd/q_engine.hpp>
#include <metamd/tau2_interval.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <tuple>

namespace metamd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Neumaier compensated accumulator; keeps aggregation order-insensitive
/// errors negligible.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct MeanVar {
    Kahan s, s2;
    std::size_t n = 0;
    void add(double x) {
        s.add(x);
        s2.add(x * x);
        ++n;
    }
    double mean() const { return s.value() / static_cast<double>(n); }
    double se_of_mean() const {
        if (n < 2) return kNaN;
        const double m = mean();
        const double var = std::max(0.0, (s2.value() - static_cast<double>(n) * m * m) /
                                             static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

double binom_se(double p, std::size_t n) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

const char* tau2_point_name(std::size_t i) {
    static const char* names[] = {"DL", "REML", "MP", "J", "WT", "CDL"};
    return names[i];
}

const char* tau2_interval_name(std::size_t i) {
    static const char* names[] = {"QP", "WT", "PL", "BJ", "J"};
    return names[i];
}

const char* mu_point_name(std::size_t i) {
    static const char* names[] = {"IV-DL", "IV-REML", "IV-MP", "IV-J",
                                  "IV-WT", "IV-CDL", "SSW"};
    return names[i];
}

const char* mu_interval_name(std::size_t i) {
    static const char* names[] = {"z-DL",  "z-REML", "z-MP",   "z-J",    "z-WT",
                                  "z-CDL", "HKSJ",   "HKSJ-WT", "SSW-WT", "SSW-CDL"};
    return names[i];
}

MethodSet MethodSet::all() {
    MethodSet m;
    m.tau2_point.fill(true);
    m.tau2_interval.fill(true);
    m.mu_point.fill(true);
    m.mu_interval.fill(true);
    return m;
}

MethodSet MethodSet::none() { return MethodSet{}; }

void Scenario::validate() const {
    if (K < 2) throw ValidationError("scenario: K must be >= 2");
    if (sizes.size() != K) throw ValidationError("scenario: sizes length must equal K");
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("scenario: q must be in (0,1)");
    if (!(sigma2_c > 0.0) || !(sigma2_t > 0.0))
        throw ValidationError("scenario: within-study variances must be > 0");
    if (!(tau2 >= 0.0)) throw ValidationError("scenario: tau2 must be >= 0");
    if (reps == 0) throw ValidationError("scenario: reps must be > 0");
    for (const std::size_t n : sizes) {
        if (n < 4) throw ValidationError("scenario: each study size must be >= 4");
        const auto [nt, nc] = arm_split(n, q);
        if (nt < 2 || nc < 2)
            throw ValidationError("scenario: arm split leaves an arm with < 2 subjects");
    }
}

std::pair<std::size_t, std::size_t> arm_split(std::size_t n, double q) {
    const auto n_t = static_cast<std::size_t>(
        std::ceil((1.0 - q) * static_cast<double>(n)));
    return {n_t, n - n_t};
}

std::vector<StudySummary> generate_dataset(const Scenario& sc, Rng& rng) {
    std::vector<StudySummary> studies;
    studies.reserve(sc.K);
    for (std::size_t i = 0; i < sc.K; ++i) {
        const auto [n_t, n_c] = arm_split(sc.sizes[i], sc.q);
        const double ft = static_cast<double>(n_t) - 1.0;
        const double fc = static_cast<double>(n_c) - 1.0;
        const double s2t = sc.sigma2_t * sample(DistSpec::chi_square(ft), rng) / ft;
        const double s2c = sc.sigma2_c * sample(DistSpec::chi_square(fc), rng) / fc;
        const double sd_y = std::sqrt(sc.sigma2_t / static_cast<double>(n_t) +
                                      sc.sigma2_c / static_cast<double>(n_c) + sc.tau2);
        const double y = sample(DistSpec::normal(sc.mu, sd_y), rng);
        // Summary-level convention: the drawn MD sits in mean_t, mean_c = 0.
        studies.push_back({n_t, y, s2t, n_c, 0.0, s2c});
    }
    return studies;
}

RepRecord run_replication(const Scenario& sc, Rng& rng) {
    const std::vector<StudySummary> studies = generate_dataset(sc, rng);
    const std::vector<EffectRow> effects = validate_dataset(studies);
    const std::vector<double> g = welch_g(studies);

    RepRecord rec;
    rec.tau2.fill(kNaN);
    rec.tau2_lo.fill(kNaN);
    rec.tau2_hi.fill(kNaN);
    rec.mu.fill(kNaN);
    rec.mu_lo.fill(kNaN);
    rec.mu_hi.fill(kNaN);

    const MethodSet& ms = sc.methods;

    // tau2 point estimates needed directly or as inputs to mu methods.
    std::array<bool, kNumTau2Point> need = ms.tau2_point;
    for (std::size_t i = 0; i < 6; ++i)
        if (ms.mu_point[i] || ms.mu_interval[i]) need[i] = true;
    if (ms.mu_interval[6]) need[0] = true;                       // HKSJ uses DL
    if (ms.mu_interval[7] || ms.mu_interval[8]) need[4] = true;  // HKSJ-WT, SSW-WT
    if (ms.mu_interval[9]) need[5] = true;                       // SSW-CDL

    for (std::size_t i = 0; i < kNumTau2Point; ++i) {
        if (!need[i]) continue;
        try {
            Tau2Result res;
            switch (static_cast<Tau2Method>(i)) {
                case Tau2Method::DL: res = tau2_dl(effects); break;
                case Tau2Method::REML: res = tau2_reml(effects); break;
                case Tau2Method::MP: res = tau2_mp(effects); break;
                case Tau2Method::J: res = tau2_j(effects); break;
                case Tau2Method::WT: res = tau2_wt(effects, g); break;
                case Tau2Method::CDL: res = tau2_cdl(effects, g); break;
            }
            rec.tau2[i] = res.value;
            rec.tau2_ok[i] = res.converged;
        } catch (const NumericError&) {
            rec.tau2_ok[i] = false;
        }
    }

    for (std::size_t i = 0; i < kNumTau2Interval; ++i) {
        if (!ms.tau2_interval[i]) continue;
        try {
            Tau2Interval ci;
            switch (static_cast<Tau2IntervalMethod>(i)) {
                case Tau2IntervalMethod::QP: ci = ci_qprofile(effects, sc.level); break;
                case Tau2IntervalMethod::WT: ci = ci_wt(effects, g, sc.level); break;
                case Tau2IntervalMethod::PL: ci = ci_pl(effects, sc.level); break;
                case Tau2IntervalMethod::BJ: ci = ci_bj(effects, sc.level); break;
                case Tau2IntervalMethod::J: ci = ci_j(effects, sc.level); break;
            }
            rec.tau2_lo[i] = ci.lower;
            rec.tau2_hi[i] = ci.upper;
            rec.tau2_ci_ok[i] = ci.converged;
        } catch (const NumericError&) {
            rec.tau2_ci_ok[i] = false;
        }
    }

    for (std::size_t i = 0; i < 6; ++i) {
        if (!(ms.mu_point[i] || ms.mu_interval[i])) continue;
        if (!rec.tau2_ok[i]) continue;
        const MuResult mu = mu_iv(effects, rec.tau2[i]);
        rec.mu[i] = mu.estimate;
        rec.mu_ok[i] = true;
        if (ms.mu_interval[i]) {
            const MuInterval ci = ci_mu_z(mu, sc.level);
            rec.mu_lo[i] = ci.lower;
            rec.mu_hi[i] = ci.upper;
            rec.mu_ci_ok[i] = true;
        }
    }
    if (ms.mu_point[6] || ms.mu_interval[8] || ms.mu_interval[9]) {
        rec.mu[6] = mu_ssw(effects).estimate;
        rec.mu_ok[6] = true;
    }
    if (ms.mu_interval[6] && rec.tau2_ok[0]) {
        const MuInterval ci = ci_mu_hksj(effects, rec.tau2[0], sc.level);
        rec.mu_lo[6] = ci.lower;
        rec.mu_hi[6] = ci.upper;
        rec.mu_ci_ok[6] = true;
    }
    if (ms.mu_interval[7] && rec.tau2_ok[4]) {
        const MuInterval ci = ci_mu_hksj(effects, rec.tau2[4], sc.level);
        rec.mu_lo[7] = ci.lower;
        rec.mu_hi[7] = ci.upper;
        rec.mu_ci_ok[7] = true;
    }
    if (ms.mu_interval[8] && rec.tau2_ok[4]) {
        const MuInterval ci = ci_mu_ssw_t(effects, rec.tau2[4], sc.level);
        rec.mu_lo[8] = ci.lower;
        rec.mu_hi[8] = ci.upper;
        rec.mu_ci_ok[8] = true;
    }
    if (ms.mu_interval[9] && rec.tau2_ok[5]) {
        const MuInterval ci = ci_mu_ssw_t(effects, rec.tau2[5], sc.level);
        rec.mu_lo[9] = ci.lower;
        rec.mu_hi[9] = ci.upper;
        rec.mu_ci_ok[9] = true;
    }
    return rec;
}

AggregateMetrics run_scenario(const Scenario& sc, unsigned n_threads) {
    sc.validate();
    std::vector<RepRecord> records(sc.reps);

    const auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            Rng rng = Rng::derive(sc.seed, sc.index, r);
            records[r] = run_replication(sc, rng);
        }
    };

    if (n_threads <= 1 || sc.reps < 2) {
        worker(0, sc.reps);
    } else {
        const std::size_t nt = std::min<std::size_t>(n_threads, sc.reps);
        std::vector<std::thread> pool;
        const std::size_t chunk = (sc.reps + nt - 1) / nt;
        for (std::size_t t = 0; t < nt; ++t) {
            const std::size_t b = t * chunk;
            const std::size_t e = std::min(sc.reps, b + chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }

    // Sequential reduction in replication order: identical results for any
    // thread count.
    AggregateMetrics agg;
    agg.reps = sc.reps;
    std::array<MeanVar, kNumTau2Point> t_bias;
    std::array<MeanVar, kNumMuPoint> m_bias, m_sq;
    std::array<std::size_t, kNumTau2Interval> t_hits{}, t_n{};
    std::array<MeanVar, kNumTau2Interval> t_width;
    std::array<std::size_t, kNumMuInterval> m_hits{}, m_n{};
    std::array<MeanVar, kNumMuInterval> m_width;

    for (const RepRecord& rec : records) {
        for (std::size_t i = 0; i < kNumTau2Point; ++i) {
            if (!sc.methods.tau2_point[i]) continue;
            if (!rec.tau2_ok[i]) {
                ++agg.tau2_nonconv[i];
                continue;
            }
            t_bias[i].add(rec.tau2[i] - sc.tau2);
        }
        for (std::size_t i = 0; i < kNumTau2Interval; ++i) {
            if (!sc.methods.tau2_interval[i]) continue;
            if (!rec.tau2_ci_ok[i]) {
                ++agg.tau2_ci_nonconv[i];
                continue;
            }
            ++t_n[i];
            if (rec.tau2_lo[i] <= sc.tau2 && sc.tau2 <= rec.tau2_hi[i]) ++t_hits[i];
            if (std::isfinite(rec.tau2_hi[i]))
                t_width[i].add(rec.tau2_hi[i] - rec.tau2_lo[i]);
            else
                ++agg.tau2_ci_unbounded[i];
        }
        for (std::size_t i = 0; i < kNumMuPoint; ++i) {
            if (!sc.methods.mu_point[i]) continue;
            if (!rec.mu_ok[i]) {
                ++agg.mu_nonconv[i];
                continue;
            }
            const double err = rec.mu[i] - sc.mu;
            m_bias[i].add(err);
            m_sq[i].add(err * err);
        }
        for (std::size_t i = 0; i < kNumMuInterval; ++i) {
            if (!sc.methods.mu_interval[i]) continue;
            if (!rec.mu_ci_ok[i]) {
                ++agg.mu_ci_nonconv[i];
                continue;
            }
            ++m_n[i];
            if (rec.mu_lo[i] <= sc.mu && sc.mu <= rec.mu_hi[i]) ++m_hits[i];
            m_width[i].add(rec.mu_hi[i] - rec.mu_lo[i]);
        }
    }

    agg.bias_tau2.fill(kNaN);
    agg.bias_tau2_se.fill(kNaN);
    agg.cov_tau2.fill(kNaN);
    agg.cov_tau2_se.fill(kNaN);
    agg.width_tau2.fill(kNaN);
    agg.bias_mu.fill(kNaN);
    agg.bias_mu_se.fill(kNaN);
    agg.mse_mu.fill(kNaN);
    agg.mse_mu_se.fill(kNaN);
    agg.cov_mu.fill(kNaN);
    agg.cov_mu_se.fill(kNaN);
    agg.width_mu.fill(kNaN);

    for (std::size_t i = 0; i < kNumTau2Point; ++i) {
        if (!sc.methods.tau2_point[i] || t_bias[i].n == 0) continue;
        agg.bias_tau2[i] = t_bias[i].mean();
        agg.bias_tau2_se[i] = t_bias[i].se_of_mean();
    }
    for (std::size_t i = 0; i < kNumTau2Interval; ++i) {
        if (!sc.methods.tau2_interval[i] || t_n[i] == 0) continue;
        const double p = static_cast<double>(t_hits[i]) / static_cast<double>(t_n[i]);
        agg.cov_tau2[i] = p;
        agg.cov_tau2_se[i] = binom_se(p, t_n[i]);
        if (t_width[i].n > 0) agg.width_tau2[i] = t_width[i].mean();
    }
    for (std::size_t i = 0; i < kNumMuPoint; ++i) {
        if (!sc.methods.mu_point[i] || m_bias[i].n == 0) continue;
        agg.bias_mu[i] = m_bias[i].mean();
        agg.bias_mu_se[i] = m_bias[i].se_of_mean();
        agg.mse_mu[i] = m_sq[i].mean();
        agg.mse_mu_se[i] = m_sq[i].se_of_mean();
    }
    for (std::size_t i = 0; i < kNumMuInterval; ++i) {
        if (!sc.methods.mu_interval[i] || m_n[i] == 0) continue;
        const double p = static_cast<double>(m_hits[i]) / static_cast<double>(m_n[i]);
        agg.cov_mu[i] = p;
        agg.cov_mu_se[i] = binom_se(p, m_n[i]);
        agg.width_mu[i] = m_width[i].mean();
    }
    return agg;
}

std::pair<double, double> mse_ratio(const AggregateMetrics& metrics) {
    const double ssw = metrics.mse_mu[6];
    const double mp = metrics.mse_mu[2];
    const double wt = metrics.mse_mu[4];
    if (std::isnan(ssw) || std::isnan(mp) || std::isnan(wt))
        throw ValidationError("mse_ratio: required MSE entries missing");
    if (!(mp > 0.0) || !(wt > 0.0))
        throw NumericError("mse_ratio: zero MSE denominator", 0.0);
    return {ssw / mp, ssw / wt};
}

std::vector<Scenario> expand_grid(const GridConfig& config) {
    if (config.k_values.empty() || config.size_patterns.empty() ||
        config.q_values.empty() || config.sigma2_pairs.empty() ||
        config.tau2_values.empty())
        throw ValidationError("grid config: every grid list must be nonempty");

    std::vector<Scenario> grid;
    for (const std::size_t K : config.k_values) {
        for (const SizePattern& pat : config.size_patterns) {
            if (pat.sizes.empty() || K % pat.sizes.size() != 0)
                throw ValidationError("grid config: pattern '" + pat.name +
                                      "' length must divide K=" + std::to_string(K));
            std::vector<std::size_t> sizes;
            sizes.reserve(K);
            for (std::size_t i = 0; i < K; ++i) sizes.push_back(pat.sizes[i % pat.sizes.size()]);
            for (const double q : config.q_values) {
                for (const auto& [s2c, s2t] : config.sigma2_pairs) {
                    for (const double t2 : config.tau2_values) {
                        Scenario sc;
                        sc.K = K;
                        sc.sizes = sizes;
                        sc.n_pattern = pat.name;
                        sc.q = q;
                        sc.sigma2_c = s2c;
                        sc.sigma2_t = s2t;
                        sc.tau2 = t2;
                        sc.mu = config.mu;
                        sc.reps = config.reps;
                        sc.seed = config.seed;
                        sc.level = config.level;
                        sc.methods = config.methods;
                        sc.validate();
                        grid.push_back(std::move(sc));
                    }
                }
            }
        }
    }
    std::sort(grid.begin(), grid.end(), [](const Scenario& a, const Scenario& b) {
        return std::tie(a.K, a.n_pattern, a.q, a.sigma2_c, a.sigma2_t, a.tau2, a.mu) <
               std::tie(b.K, b.n_pattern, b.q, b.sigma2_c, b.sigma2_t, b.tau2, b.mu);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i].index = i;
    return grid;
}

}  // namespace metamd
