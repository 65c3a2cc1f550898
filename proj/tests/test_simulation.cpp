#include <metamd/errors.hpp>
#include <metamd/simulation.hpp>

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace metamd;

namespace {

Scenario small_scenario() {
    Scenario sc;
    sc.K = 5;
    sc.sizes = {20, 20, 20, 20, 20};
    sc.n_pattern = "20";
    sc.q = 0.5;
    sc.sigma2_c = 1.0;
    sc.sigma2_t = 1.0;
    sc.tau2 = 0.2;
    sc.mu = 0.0;
    sc.reps = 100;
    sc.seed = 20240817;
    sc.index = 0;
    return sc;
}

}  // namespace

TEST_CASE("arm_split") {
    CHECK(arm_split(20, 0.5) == std::pair<std::size_t, std::size_t>{10, 10});
    CHECK(arm_split(20, 0.75) == std::pair<std::size_t, std::size_t>{5, 15});
    CHECK(arm_split(12, 0.75) == std::pair<std::size_t, std::size_t>{3, 9});
    CHECK(arm_split(21, 0.5) == std::pair<std::size_t, std::size_t>{11, 10});
}

TEST_CASE("scenario validation") {
    Scenario sc = small_scenario();
    CHECK_NOTHROW(sc.validate());
    SUBCASE("reps = 0 rejected") {
        sc.reps = 0;
        CHECK_THROWS_AS(sc.validate(), ValidationError);
    }
    SUBCASE("sizes length must equal K") {
        sc.sizes.pop_back();
        CHECK_THROWS_AS(sc.validate(), ValidationError);
    }
    SUBCASE("each n >= 4") {
        sc.sizes[2] = 3;
        CHECK_THROWS_AS(sc.validate(), ValidationError);
    }
    SUBCASE("nonpositive variances rejected") {
        sc.sigma2_t = 0.0;
        CHECK_THROWS_AS(sc.validate(), ValidationError);
    }
}

TEST_CASE("generate_dataset: determinism and shape") {
    const Scenario sc = small_scenario();
    Rng a = Rng::derive(sc.seed, sc.index, 0);
    Rng b = Rng::derive(sc.seed, sc.index, 0);
    const auto da = generate_dataset(sc, a);
    const auto db = generate_dataset(sc, b);
    REQUIRE(da.size() == sc.K);
    for (std::size_t i = 0; i < sc.K; ++i) {
        CHECK(da[i].mean_t == db[i].mean_t);  // bitwise
        CHECK(da[i].var_t == db[i].var_t);
        CHECK(da[i].var_c == db[i].var_c);
        CHECK(da[i].mean_c == 0.0);  // y carried via mean_t, mean_c = 0
        CHECK(da[i].n_t == 10);
        CHECK(da[i].n_c == 10);
    }
    Rng c = Rng::derive(sc.seed, sc.index, 1);
    const auto dc = generate_dataset(sc, c);
    CHECK(dc[0].mean_t != da[0].mean_t);  // different replication, different stream
}

TEST_CASE("generate_dataset: moments match the generative model") {
    Scenario sc = small_scenario();
    sc.sigma2_c = 1.0;
    sc.sigma2_t = 2.0;
    sc.q = 0.75;  // arms (5, 15)
    sc.tau2 = 0.0;
    constexpr int reps = 50'000;
    Rng rng(42);
    double sum_y = 0.0, sum_y2 = 0.0, sum_s2t = 0.0, sum_s2c = 0.0;
    std::size_t n_studies = 0;
    for (int r = 0; r < reps; ++r) {
        const auto ds = generate_dataset(sc, rng);
        for (const auto& s : ds) {
            sum_y += s.mean_t;
            sum_y2 += s.mean_t * s.mean_t;
            sum_s2t += s.var_t;
            sum_s2c += s.var_c;
            ++n_studies;
        }
    }
    const double n = static_cast<double>(n_studies);
    // E[s2_ij] = sigma2_ij within 3 MC-SE; Var(s2) = 2 sigma^4/(n_ij - 1)
    const double se_s2t = std::sqrt(2.0 * 4.0 / 4.0 / n);
    const double se_s2c = std::sqrt(2.0 * 1.0 / 14.0 / n);
    CHECK(std::fabs(sum_s2t / n - 2.0) <= 3.0 * se_s2t);
    CHECK(std::fabs(sum_s2c / n - 1.0) <= 3.0 * se_s2c);
    // y ~ N(mu, sigma2_t/n_t + sigma2_c/n_c + tau2) = N(0, 2/5 + 1/15)
    const double var_y = 2.0 / 5.0 + 1.0 / 15.0;
    CHECK(std::fabs(sum_y / n) <= 3.0 * std::sqrt(var_y / n));
    const double samp_var = sum_y2 / n - (sum_y / n) * (sum_y / n);
    CHECK(std::fabs(samp_var - var_y) <= 3.0 * std::sqrt(2.0 * var_y * var_y / n));
}

TEST_CASE("run_replication basics") {
    const Scenario sc = small_scenario();
    Rng rng = Rng::derive(sc.seed, sc.index, 0);
    const RepRecord rec = run_replication(sc, rng);
    for (std::size_t i = 0; i < kNumTau2Point; ++i) {
        CHECK(rec.tau2_ok[i]);
        CHECK(rec.tau2[i] >= 0.0);
    }
    for (std::size_t i = 0; i < kNumTau2Interval; ++i) {
        CHECK(rec.tau2_ci_ok[i]);
        CHECK(rec.tau2_lo[i] <= rec.tau2_hi[i]);
    }
    for (std::size_t i = 0; i < kNumMuPoint; ++i) CHECK(rec.mu_ok[i]);
    for (std::size_t i = 0; i < kNumMuInterval; ++i) {
        CHECK(rec.mu_ci_ok[i]);
        CHECK(rec.mu_lo[i] <= rec.mu_hi[i]);
    }
}

TEST_CASE("run_replication honors the method subset") {
    Scenario sc = small_scenario();
    sc.methods = MethodSet::none();
    sc.methods.tau2_point[2] = true;  // MP only
    Rng rng = Rng::derive(sc.seed, sc.index, 0);
    const RepRecord rec = run_replication(sc, rng);
    CHECK(rec.tau2_ok[2]);
    CHECK_FALSE(rec.tau2_ok[0]);
    CHECK(std::isnan(rec.tau2[0]));
    CHECK_FALSE(rec.mu_ok[0]);
}

TEST_CASE("dependency resolution: HKSJ-WT implies the WT point estimate internally") {
    Scenario sc = small_scenario();
    sc.methods = MethodSet::none();
    sc.methods.mu_interval[7] = true;  // HKSJ-WT
    Rng rng = Rng::derive(sc.seed, sc.index, 0);
    const RepRecord rec = run_replication(sc, rng);
    CHECK(rec.mu_ci_ok[7]);
    CHECK(std::isfinite(rec.mu_lo[7]));
}

TEST_CASE("run_scenario aggregates and MC-SE formula") {
    Scenario sc = small_scenario();
    sc.reps = 400;
    const AggregateMetrics agg = run_scenario(sc, 1);
    CHECK(agg.reps == 400);
    for (std::size_t i = 0; i < kNumTau2Interval; ++i) {
        CHECK(agg.cov_tau2[i] >= 0.0);
        CHECK(agg.cov_tau2[i] <= 1.0);
        const double p = agg.cov_tau2[i];
        CHECK(agg.cov_tau2_se[i] ==
              doctest::Approx(std::sqrt(p * (1.0 - p) / 400.0)).epsilon(1e-10));
    }
    for (std::size_t i = 0; i < kNumMuInterval; ++i) {
        CHECK(agg.cov_mu[i] >= 0.0);
        CHECK(agg.cov_mu[i] <= 1.0);
    }
    // mu unbiasedness sanity at small reps (loose): |bias| below 5 MC-SE
    for (std::size_t i = 0; i < kNumMuPoint; ++i)
        CHECK(std::fabs(agg.bias_mu[i]) <= 5.0 * agg.bias_mu_se[i] + 1e-12);
}

TEST_CASE("run_scenario deterministic across thread counts") {
    Scenario sc = small_scenario();
    sc.reps = 150;
    const AggregateMetrics a = run_scenario(sc, 1);
    const AggregateMetrics b = run_scenario(sc, 4);
    for (std::size_t i = 0; i < kNumTau2Point; ++i) CHECK(a.bias_tau2[i] == b.bias_tau2[i]);
    for (std::size_t i = 0; i < kNumTau2Interval; ++i) {
        CHECK(a.cov_tau2[i] == b.cov_tau2[i]);
        CHECK(a.width_tau2[i] == b.width_tau2[i]);
    }
    for (std::size_t i = 0; i < kNumMuPoint; ++i) {
        CHECK(a.bias_mu[i] == b.bias_mu[i]);
        CHECK(a.mse_mu[i] == b.mse_mu[i]);
    }
    for (std::size_t i = 0; i < kNumMuInterval; ++i) CHECK(a.cov_mu[i] == b.cov_mu[i]);
}

TEST_CASE("mse_ratio") {
    Scenario sc = small_scenario();
    sc.reps = 300;
    sc.tau2 = 0.0;
    const AggregateMetrics agg = run_scenario(sc, 1);
    const auto [ssw_mp, ssw_wt] = mse_ratio(agg);
    // equal sizes, equal variances, tau2=0: SSW and IV weights nearly coincide
    CHECK(ssw_mp == doctest::Approx(1.0).epsilon(0.05));
    CHECK(ssw_wt == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("mean tau2_MP decreases in n for tau2 = 0 (homogeneous case)") {
    double prev = 1e300;
    for (std::size_t n : {20u, 40u, 100u, 250u}) {
        Scenario sc = small_scenario();
        sc.sizes.assign(5, n);
        sc.n_pattern = std::to_string(n);
        sc.tau2 = 0.0;
        sc.reps = 2000;
        sc.methods = MethodSet::none();
        sc.methods.tau2_point[2] = true;  // MP
        const AggregateMetrics agg = run_scenario(sc, 1);
        const double mean_mp = agg.bias_tau2[2];  // true value 0, bias = mean
        CHECK(mean_mp > 0.0);
        CHECK(mean_mp < prev);
        prev = mean_mp;
    }
}

TEST_CASE("expand_grid") {
    SUBCASE("single-point config gives one scenario") {
        GridConfig cfg;
        cfg.k_values = {5};
        cfg.size_patterns = {{"20", {20}}};
        cfg.q_values = {0.5};
        cfg.sigma2_pairs = {{1.0, 1.0}};
        cfg.tau2_values = {0.3};
        cfg.reps = 10;
        cfg.seed = 1;
        const auto grid = expand_grid(cfg);
        REQUIRE(grid.size() == 1);
        CHECK(grid[0].K == 5);
        CHECK(grid[0].sizes == std::vector<std::size_t>(5, 20));
        CHECK(grid[0].index == 0);
    }
    SUBCASE("paper-default equal-n arm count: 3 x 4 x 2 x 2 x 21") {
        GridConfig cfg;
        cfg.k_values = {5, 10, 30};
        cfg.size_patterns = {{"20", {20}}, {"40", {40}}, {"100", {100}}, {"250", {250}}};
        cfg.q_values = {0.5, 0.75};
        cfg.sigma2_pairs = {{1.0, 1.0}, {1.0, 2.0}};
        // tau2 0(0.01)0.1 and 0(0.1)1 share the 0 point: 21 distinct values
        for (int i = 0; i <= 10; ++i) cfg.tau2_values.push_back(i * 0.01);
        for (int i = 1; i <= 10; ++i) cfg.tau2_values.push_back(i * 0.1);
        cfg.reps = 10;
        cfg.seed = 1;
        const auto grid = expand_grid(cfg);
        CHECK(grid.size() == 3 * 4 * 2 * 2 * 21);
        // indices assigned after lexicographic sort
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(grid[i].index == i);
    }
    SUBCASE("unequal pattern repeated for K = 10") {
        GridConfig cfg;
        cfg.k_values = {10};
        cfg.size_patterns = {{"u30", {12, 16, 18, 20, 84}}};
        cfg.q_values = {0.5};
        cfg.sigma2_pairs = {{1.0, 1.0}};
        cfg.tau2_values = {0.0};
        cfg.reps = 10;
        cfg.seed = 1;
        const auto grid = expand_grid(cfg);
        REQUIRE(grid.size() == 1);
        const std::vector<std::size_t> expect{12, 16, 18, 20, 84, 12, 16, 18, 20, 84};
        CHECK(grid[0].sizes == expect);
    }
    SUBCASE("pattern length must divide K") {
        GridConfig cfg;
        cfg.k_values = {7};
        cfg.size_patterns = {{"u", {12, 16, 18, 20, 84}}};
        cfg.q_values = {0.5};
        cfg.sigma2_pairs = {{1.0, 1.0}};
        cfg.tau2_values = {0.0};
        cfg.reps = 10;
        cfg.seed = 1;
        CHECK_THROWS_AS(expand_grid(cfg), ValidationError);
    }
}
