#include <metamd/dataset_io.hpp>
#include <metamd/errors.hpp>
#include <metamd/figure_data.hpp>
#include <metamd/grid_config.hpp>
#include <metamd/mu_estimation.hpp>
#include <metamd/q_engine.hpp>
#include <metamd/results_io.hpp>
#include <metamd/selftest.hpp>
#include <metamd/simulation.hpp>
#include <metamd/tau2_interval.hpp>
#include <metamd/tau2_point.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

namespace {

using namespace metamd;

unsigned thread_count() {
    if (const char* env = std::getenv("METAMD_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    return 1;
}

MethodSet parse_method_subset(const std::vector<std::string>& tau2_names,
                              const std::vector<std::string>& mu_names) {
    MethodSet ms = MethodSet::all();
    if (!tau2_names.empty()) {
        ms.tau2_point.fill(false);
        ms.tau2_interval.fill(false);
        for (const auto& name : tau2_names) {
            bool found = false;
            for (std::size_t i = 0; i < kNumTau2Point; ++i)
                if (name == tau2_point_name(i)) ms.tau2_point[i] = found = true;
            for (std::size_t i = 0; i < kNumTau2Interval; ++i)
                if (name == tau2_interval_name(i)) ms.tau2_interval[i] = found = true;
            if (!found) throw ValidationError("unknown tau2 method '" + name + "'");
        }
    }
    if (!mu_names.empty()) {
        ms.mu_point.fill(false);
        ms.mu_interval.fill(false);
        for (const auto& name : mu_names) {
            bool found = false;
            for (std::size_t i = 0; i < kNumMuPoint; ++i)
                if (name == mu_point_name(i)) ms.mu_point[i] = found = true;
            for (std::size_t i = 0; i < kNumMuInterval; ++i)
                if (name == mu_interval_name(i)) ms.mu_interval[i] = found = true;
            if (!found) throw ValidationError("unknown mu method '" + name + "'");
        }
    }
    return ms;
}

int cmd_analyze(const std::string& path, double level,
                const std::vector<std::string>& tau2_names,
                const std::vector<std::string>& mu_names) {
    const Dataset ds = read_dataset_file(path);
    const std::vector<EffectRow> effects = validate_dataset(ds.studies);
    const std::vector<double> g = welch_g(ds.studies);
    const MethodSet ms = parse_method_subset(tau2_names, mu_names);

    std::printf("study-level effects (K = %zu)\n", effects.size());
    std::printf("%-12s %12s %12s %10s\n", "study", "y", "v2", "eff_n");
    for (std::size_t i = 0; i < effects.size(); ++i)
        std::printf("%-12s %12.6g %12.6g %10.4g\n", ds.ids[i].c_str(), effects[i].y,
                    effects[i].v2, effects[i].eff_n);

    std::printf("\ntau2 point estimates\n");
    for (std::size_t i = 0; i < kNumTau2Point; ++i) {
        if (!ms.tau2_point[i]) continue;
        Tau2Result r;
        switch (static_cast<Tau2Method>(i)) {
            case Tau2Method::DL: r = tau2_dl(effects); break;
            case Tau2Method::REML: r = tau2_reml(effects); break;
            case Tau2Method::MP: r = tau2_mp(effects); break;
            case Tau2Method::J: r = tau2_j(effects); break;
            case Tau2Method::WT: r = tau2_wt(effects, g); break;
            case Tau2Method::CDL: r = tau2_cdl(effects, g); break;
        }
        std::printf("%-8s %12.6g%s%s\n", to_string(r.method), r.value,
                    r.truncated ? "  (truncated at 0)" : "",
                    r.converged ? "" : "  (NOT CONVERGED)");
    }

    std::printf("\ntau2 %.0f%% intervals\n", level * 100.0);
    for (std::size_t i = 0; i < kNumTau2Interval; ++i) {
        if (!ms.tau2_interval[i]) continue;
        Tau2Interval ci;
        switch (static_cast<Tau2IntervalMethod>(i)) {
            case Tau2IntervalMethod::QP: ci = ci_qprofile(effects, level); break;
            case Tau2IntervalMethod::WT: ci = ci_wt(effects, g, level); break;
            case Tau2IntervalMethod::PL: ci = ci_pl(effects, level); break;
            case Tau2IntervalMethod::BJ: ci = ci_bj(effects, level); break;
            case Tau2IntervalMethod::J: ci = ci_j(effects, level); break;
        }
        std::printf("%-8s [%12.6g, %12s]\n", to_string(ci.method), ci.lower,
                    format_value(ci.upper).c_str());
    }

    std::printf("\nmu point estimates\n");
    std::array<double, kNumTau2Point> tau2{};
    for (std::size_t i = 0; i < kNumTau2Point; ++i) {
        switch (static_cast<Tau2Method>(i)) {
            case Tau2Method::DL: tau2[i] = tau2_dl(effects).value; break;
            case Tau2Method::REML: tau2[i] = tau2_reml(effects).value; break;
            case Tau2Method::MP: tau2[i] = tau2_mp(effects).value; break;
            case Tau2Method::J: tau2[i] = tau2_j(effects).value; break;
            case Tau2Method::WT: tau2[i] = tau2_wt(effects, g).value; break;
            case Tau2Method::CDL: tau2[i] = tau2_cdl(effects, g).value; break;
        }
    }
    for (std::size_t i = 0; i < kNumMuPoint; ++i) {
        if (!ms.mu_point[i]) continue;
        const double est =
            i < 6 ? mu_iv(effects, tau2[i]).estimate : mu_ssw(effects).estimate;
        std::printf("%-8s %12.6g\n", mu_point_name(i), est);
    }

    std::printf("\nmu %.0f%% intervals\n", level * 100.0);
    for (std::size_t i = 0; i < kNumMuInterval; ++i) {
        if (!ms.mu_interval[i]) continue;
        MuInterval ci;
        if (i < 6)
            ci = ci_mu_z(mu_iv(effects, tau2[i]), level);
        else if (i == 6)
            ci = ci_mu_hksj(effects, tau2[0], level);
        else if (i == 7)
            ci = ci_mu_hksj(effects, tau2[4], level);
        else
            ci = ci_mu_ssw_t(effects, tau2[i == 8 ? 4 : 5], level);
        std::printf("%-8s %12.6g [%12.6g, %12.6g]%s\n", mu_interval_name(i), ci.center,
                    ci.lower, ci.upper, ci.low_df ? "  (1 df)" : "");
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& output_override) {
    const GridConfig cfg = read_grid_config_file(config_path);
    const std::string out_path = output_override.empty() ? cfg.output : output_override;
    if (out_path.empty())
        throw ValidationError("no output path: set \"output\" in the config or pass --output");

    const std::vector<Scenario> grid = expand_grid(cfg);
    const unsigned threads = thread_count();
    std::vector<ResultRow> rows;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const AggregateMetrics agg = run_scenario(grid[i], threads);
        const auto scenario_rows = rows_for(grid[i], agg);
        rows.insert(rows.end(), scenario_rows.begin(), scenario_rows.end());
        const auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
        std::fprintf(stderr,
                     "scenario %zu/%zu done (K=%zu n=%s q=%g tau2=%g, %llds elapsed)\n",
                     i + 1, grid.size(), grid[i].K, grid[i].n_pattern.c_str(), grid[i].q,
                     grid[i].tau2, static_cast<long long>(elapsed));
    }
    std::ofstream out(out_path);
    if (!out) throw ValidationError("cannot open output file: " + out_path);
    write_results_csv(out, rows);
    std::fprintf(stderr, "wrote %zu rows to %s\n", rows.size(), out_path.c_str());
    return 0;
}

int cmd_figure_data(const std::string& results_path, const std::string& family,
                    const std::string& n_pattern, std::size_t K, std::string out_path) {
    const auto rows = read_results_file(results_path);
    const PanelData panel = extract_panel(rows, family, n_pattern, K);
    if (out_path.empty())
        out_path = "panel_" + family + "_n" + n_pattern + "_K" + std::to_string(K) + ".csv";
    std::ofstream out(out_path);
    if (!out) throw ValidationError("cannot open output file: " + out_path);
    write_panel_csv(out, panel);
    std::fprintf(stderr, "wrote panel to %s\n", out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-effects meta-analysis of mean differences"};
    app.require_subcommand(1);

    std::string dataset_path, config_path, results_path, family, n_pattern, out_path;
    std::string output_override;
    std::vector<std::string> tau2_methods, mu_methods;
    double level = 0.95;
    std::size_t K = 0;

    auto* analyze = app.add_subcommand("analyze", "analyze a dataset CSV");
    analyze->add_option("file", dataset_path, "dataset CSV")->required();
    analyze->add_option("--level", level, "confidence level (default 0.95)");
    analyze->add_option("--tau2-methods", tau2_methods,
                        "subset of tau2 methods (point or interval names)");
    analyze->add_option("--mu-methods", mu_methods, "subset of mu methods");

    auto* simulate = app.add_subcommand("simulate", "run a simulation grid");
    simulate->add_option("config", config_path, "grid config JSON")->required();
    simulate->add_option("--output", output_override, "override the config output path");

    auto* figure = app.add_subcommand("figure-data", "extract plot-ready panel data");
    figure->add_option("results", results_path, "results CSV from simulate")->required();
    figure->add_option("--family", family, "figure family A1..B6")->required();
    figure->add_option("--n", n_pattern, "size-pattern key, e.g. 20 or u30")->required();
    figure->add_option("--K", K, "number of studies")->required();
    figure->add_option("--out", out_path, "output file (default panel_<...>.csv)");

    auto* selftest = app.add_subcommand("selftest", "run embedded checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(dataset_path, level, tau2_methods, mu_methods);
        if (simulate->parsed()) return cmd_simulate(config_path, output_override);
        if (figure->parsed())
            return cmd_figure_data(results_path, family, n_pattern, K, out_path);
        if (selftest->parsed()) {
            const int failures = metamd::run_selftest(std::cout);
            std::printf("%s (%d failure%s)\n", failures == 0 ? "ALL PASS" : "FAILED",
                        failures, failures == 1 ? "" : "s");
            return failures == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
