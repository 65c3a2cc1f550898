#pragma once

#include <metamd/rng.hpp>
#include <metamd/study.hpp>
#include <metamd/tau2_point.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace metamd {

inline constexpr std::size_t kNumTau2Point = 6;     // DL REML MP J WT CDL
inline constexpr std::size_t kNumTau2Interval = 5;  // QP WT PL BJ J
inline constexpr std::size_t kNumMuPoint = 7;       // IV x 6, SSW
inline constexpr std::size_t kNumMuInterval = 10;   // z x 6, HKSJ, HKSJ-WT, SSW-WT, SSW-CDL

const char* tau2_point_name(std::size_t i);
const char* tau2_interval_name(std::size_t i);
const char* mu_point_name(std::size_t i);
const char* mu_interval_name(std::size_t i);

/// Which estimators a simulation run evaluates. Dependencies (e.g. HKSJ-WT
/// needing the WT point estimate) are resolved internally.
struct MethodSet {
    std::array<bool, kNumTau2Point> tau2_point{};
    std::array<bool, kNumTau2Interval> tau2_interval{};
    std::array<bool, kNumMuPoint> mu_point{};
    std::array<bool, kNumMuInterval> mu_interval{};

    static MethodSet all();
    static MethodSet none();
};

/// One simulation cell: the data-generating parameters plus replication
/// count and master seed.
struct Scenario {
    std::size_t K = 0;
    std::vector<std::size_t> sizes;  // per-study total n, length K
    std::string n_pattern;           // key for output rows, e.g. "20" or "u30"
    double q = 0.5;
    double sigma2_c = 1.0;
    double sigma2_t = 1.0;
    double tau2 = 0.0;
    double mu = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    std::size_t index = 0;  // position in the expanded grid; keys the RNG stream
    double level = 0.95;
    MethodSet methods = MethodSet::all();

    void validate() const;
};

std::pair<std::size_t, std::size_t> arm_split(std::size_t n, double q);

std::vector<StudySummary> generate_dataset(const Scenario& sc, Rng& rng);

/// Everything computed on one generated dataset. NaN marks a method that was
/// disabled or failed; the ok flags separate the two.
struct RepRecord {
    std::array<double, kNumTau2Point> tau2{};
    std::array<bool, kNumTau2Point> tau2_ok{};
    std::array<double, kNumTau2Interval> tau2_lo{}, tau2_hi{};
    std::array<bool, kNumTau2Interval> tau2_ci_ok{};
    std::array<double, kNumMuPoint> mu{};
    std::array<bool, kNumMuPoint> mu_ok{};
    std::array<double, kNumMuInterval> mu_lo{}, mu_hi{};
    std::array<bool, kNumMuInterval> mu_ci_ok{};
};

RepRecord run_replication(const Scenario& sc, Rng& rng);

struct AggregateMetrics {
    std::size_t reps = 0;
    std::array<double, kNumTau2Point> bias_tau2{}, bias_tau2_se{};
    std::array<std::size_t, kNumTau2Point> tau2_nonconv{};
    std::array<double, kNumTau2Interval> cov_tau2{}, cov_tau2_se{}, width_tau2{};
    std::array<std::size_t, kNumTau2Interval> tau2_ci_nonconv{}, tau2_ci_unbounded{};
    std::array<double, kNumMuPoint> bias_mu{}, bias_mu_se{}, mse_mu{}, mse_mu_se{};
    std::array<std::size_t, kNumMuPoint> mu_nonconv{};
    std::array<double, kNumMuInterval> cov_mu{}, cov_mu_se{}, width_mu{};
    std::array<std::size_t, kNumMuInterval> mu_ci_nonconv{};
};

/// Runs all replications of one scenario. Deterministic for a fixed
/// (config, seed) regardless of n_threads: each replication gets its own
/// derived RNG stream and aggregation runs in replication order.
AggregateMetrics run_scenario(const Scenario& sc, unsigned n_threads = 1);

/// MSE(SSW)/MSE(IV-MP) and MSE(SSW)/MSE(IV-WT).
std::pair<double, double> mse_ratio(const AggregateMetrics& metrics);

struct SizePattern {
    std::string name;
    std::vector<std::size_t> sizes;
};

struct GridConfig {
    std::vector<std::size_t> k_values;
    std::vector<SizePattern> size_patterns;
    std::vector<double> q_values;
    std::vector<std::pair<double, double>> sigma2_pairs;  // (sigma2_c, sigma2_t)
    std::vector<double> tau2_values;
    double mu = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    double level = 0.95;
    MethodSet methods = MethodSet::all();
    std::string output;
};

/// Cross product of the grid lists, sorted lexicographically by scenario
/// keys; scenario index set after sorting.
std::vector<Scenario> expand_grid(const GridConfig& config);

}  // namespace metamd
