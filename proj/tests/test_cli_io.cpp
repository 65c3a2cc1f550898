#include <metamd/dataset_io.hpp>
#include <metamd/errors.hpp>
#include <metamd/figure_data.hpp>
#include <metamd/grid_config.hpp>
#include <metamd/results_io.hpp>
#include <metamd/selftest.hpp>
#include <metamd/tau2_point.hpp>

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace metamd;

TEST_CASE("dataset CSV ingestion") {
    SUBCASE("two-study toy file matches the hand values") {
        std::istringstream in(
            "study_id,n_t,mean_t,sd_t,n_c,mean_c,sd_c\n"
            "a,4,2.0,1.0,4,0.0,1.0\n"
            "b,4,0.0,1.0,4,0.0,1.0\n");
        const Dataset ds = read_dataset_csv(in, "toy");
        REQUIRE(ds.studies.size() == 2);
        CHECK(ds.ids[0] == "a");
        CHECK(ds.studies[0].var_t == doctest::Approx(1.0));  // sd squared
        const auto effects = validate_dataset(ds.studies);
        // v2 = 1/4 + 1/4 = 1/2 each; y = (2, 0); Q(0) = 4; DL = (4-1)/(W - W2/W) = 3/2
        CHECK(effects[0].v2 == doctest::Approx(0.5));
        CHECK(tau2_dl(effects).value == doctest::Approx(1.5));
        CHECK(tau2_mp(effects).value > 0.0);
    }
    SUBCASE("sd converted to variance") {
        std::istringstream in(
            "study_id,n_t,mean_t,sd_t,n_c,mean_c,sd_c\n"
            "s,5,1.0,3.0,5,0.0,2.0\n"
            "t,5,1.0,3.0,5,0.0,2.0\n");
        const Dataset ds = read_dataset_csv(in);
        CHECK(ds.studies[0].var_t == doctest::Approx(9.0));
        CHECK(ds.studies[0].var_c == doctest::Approx(4.0));
    }
    SUBCASE("empty file rejected") {
        std::istringstream in("");
        CHECK_THROWS_AS(read_dataset_csv(in), ValidationError);
    }
    SUBCASE("header only rejected") {
        std::istringstream in("study_id,n_t,mean_t,sd_t,n_c,mean_c,sd_c\n");
        CHECK_THROWS_WITH_AS(read_dataset_csv(in, "x"), doctest::Contains("no data rows"),
                             ValidationError);
    }
    SUBCASE("wrong header rejected") {
        std::istringstream in("id,n_t,mean_t,sd_t,n_c,mean_c,sd_c\n");
        CHECK_THROWS_AS(read_dataset_csv(in), ValidationError);
    }
    SUBCASE("parse error names the line and column") {
        std::istringstream in(
            "study_id,n_t,mean_t,sd_t,n_c,mean_c,sd_c\n"
            "a,4,2.0,1.0,4,0.0,1.0\n"
            "b,4,oops,1.0,4,0.0,1.0\n");
        CHECK_THROWS_WITH_AS(read_dataset_csv(in, "f.csv"),
                             doctest::Contains("f.csv:3: column 3 (mean_t)"),
                             ValidationError);
    }
    SUBCASE("non-integer count rejected") {
        std::istringstream in(
            "study_id,n_t,mean_t,sd_t,n_c,mean_c,sd_c\n"
            "a,4.5,2.0,1.0,4,0.0,1.0\n");
        CHECK_THROWS_WITH_AS(read_dataset_csv(in, "f.csv"), doctest::Contains("column 2"),
                             ValidationError);
    }
}

TEST_CASE("format_value tokens") {
    CHECK(format_value(std::numeric_limits<double>::quiet_NaN()) == "na");
    CHECK(format_value(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_value(0.5) == "0.5");
    CHECK(format_value(0.0) == "0");
}

TEST_CASE("results CSV round-trip") {
    Scenario sc;
    sc.K = 5;
    sc.sizes.assign(5, 20);
    sc.n_pattern = "20";
    sc.q = 0.75;
    sc.sigma2_c = 1.0;
    sc.sigma2_t = 2.0;
    sc.tau2 = 0.3;
    sc.reps = 50;
    sc.seed = 9;
    const AggregateMetrics agg = run_scenario(sc, 1);
    const auto rows = rows_for(sc, agg);
    REQUIRE(!rows.empty());

    std::ostringstream out;
    write_results_csv(out, rows);
    std::istringstream in(out.str());
    const auto back = read_results_csv(in, "rt");
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].K == rows[i].K);
        CHECK(back[i].n_pattern == rows[i].n_pattern);
        CHECK(back[i].method == rows[i].method);
        CHECK(back[i].metric == rows[i].metric);
        if (std::isnan(rows[i].value))
            CHECK(std::isnan(back[i].value));
        else
            CHECK(back[i].value == doctest::Approx(rows[i].value).epsilon(1e-9));
    }
    // expected shape: 6 tau2 points x2 + 5 tau2 CIs x3 + 7 mu points x3 + 10 mu CIs x3
    //                 + 2 mse_ratio rows
    CHECK(rows.size() == 6 * 2 + 5 * 3 + 7 * 3 + 10 * 3 + 2);
}

TEST_CASE("grid config JSON") {
    SUBCASE("full config parses") {
        std::istringstream in(R"({
            "K": [5, 10],
            "size_patterns": [{"name": "20", "sizes": [20]},
                              {"name": "u30", "sizes": [12, 16, 18, 20, 84]}],
            "q": [0.5, 0.75],
            "sigma2": [[1.0, 1.0], [1.0, 2.0]],
            "tau2": [0.0, 0.5],
            "mu": 0.0,
            "reps": 100,
            "seed": 42,
            "level": 0.95,
            "methods": {"tau2_point": ["DL", "MP"], "mu_interval": ["HKSJ"]},
            "output": "out.csv"
        })");
        const GridConfig cfg = read_grid_config(in, "cfg");
        CHECK(cfg.k_values == std::vector<std::size_t>{5, 10});
        CHECK(cfg.size_patterns.size() == 2);
        CHECK(cfg.sigma2_pairs.size() == 2);
        CHECK(cfg.reps == 100);
        CHECK(cfg.seed == 42);
        CHECK(cfg.output == "out.csv");
        CHECK(cfg.methods.tau2_point[0]);   // DL
        CHECK(cfg.methods.tau2_point[2]);   // MP
        CHECK_FALSE(cfg.methods.tau2_point[1]);
        CHECK(cfg.methods.mu_interval[6]);  // HKSJ
        CHECK_FALSE(cfg.methods.mu_interval[0]);
        CHECK(cfg.methods.tau2_interval[0]);  // untouched lists stay enabled
        const auto grid = expand_grid(cfg);
        CHECK(grid.size() == 2 * 2 * 2 * 2 * 2);
    }
    SUBCASE("unknown keys rejected") {
        std::istringstream in(R"({"K": [5], "size_patterns": [{"name":"20","sizes":[20]}],
            "q": [0.5], "sigma2": [[1,1]], "tau2": [0], "reps": 10, "seed": 1,
            "bogus": true})");
        CHECK_THROWS_WITH_AS(read_grid_config(in, "cfg"), doctest::Contains("bogus"),
                             ValidationError);
    }
    SUBCASE("missing required key rejected") {
        std::istringstream in(R"({"K": [5]})");
        CHECK_THROWS_AS(read_grid_config(in, "cfg"), ValidationError);
    }
    SUBCASE("unknown method name rejected") {
        std::istringstream in(R"({"K": [5], "size_patterns": [{"name":"20","sizes":[20]}],
            "q": [0.5], "sigma2": [[1,1]], "tau2": [0], "reps": 10, "seed": 1,
            "methods": {"tau2_point": ["XYZ"]}})");
        CHECK_THROWS_WITH_AS(read_grid_config(in, "cfg"), doctest::Contains("XYZ"),
                             ValidationError);
    }
    SUBCASE("malformed JSON rejected with the source name") {
        std::istringstream in("{not json");
        CHECK_THROWS_WITH_AS(read_grid_config(in, "cfg.json"), doctest::Contains("cfg.json"),
                             ValidationError);
    }
}

TEST_CASE("figure-data panels") {
    Scenario sc;
    sc.K = 5;
    sc.sizes.assign(5, 20);
    sc.n_pattern = "20";
    sc.q = 0.5;
    sc.sigma2_c = 1.0;
    sc.sigma2_t = 1.0;
    sc.reps = 30;
    sc.seed = 5;
    std::vector<ResultRow> rows;
    for (double t2 : {0.0, 0.5, 1.0}) {
        sc.tau2 = t2;
        const auto r = rows_for(sc, run_scenario(sc, 1));
        rows.insert(rows.end(), r.begin(), r.end());
    }
    SUBCASE("A1: tau2 bias panel has the six point-method columns") {
        const PanelData p = extract_panel(rows, "A1", "20", 5);
        CHECK(p.metric == "bias_tau2");
        CHECK(p.methods == std::vector<std::string>{"DL", "REML", "MP", "J", "WT", "CDL"});
        CHECK(p.tau2 == std::vector<double>{0.0, 0.5, 1.0});
        for (const auto& row : p.values)
            for (double v : row) CHECK(std::isfinite(v));
    }
    SUBCASE("A2: tau2 coverage panel has the interval methods") {
        const PanelData p = extract_panel(rows, "A2", "20", 5);
        CHECK(p.metric == "cov_tau2");
        CHECK(p.methods == std::vector<std::string>{"QP", "BJ", "PL", "WT", "J"});
    }
    SUBCASE("B families map to mu metrics") {
        CHECK(extract_panel(rows, "B1", "20", 5).metric == "bias_mu");
        CHECK(extract_panel(rows, "B2", "20", 5).metric == "cov_mu");
    }
    SUBCASE("empty selection lists available panels") {
        CHECK_THROWS_WITH_AS(extract_panel(rows, "A1", "40", 10),
                             doctest::Contains("(n=20,K=5)"), ValidationError);
    }
    SUBCASE("bad family name rejected") {
        CHECK_THROWS_AS(extract_panel(rows, "C1", "20", 5), ValidationError);
        CHECK_THROWS_AS(extract_panel(rows, "A7", "20", 5), ValidationError);
    }
    SUBCASE("panel CSV layout") {
        const PanelData p = extract_panel(rows, "A1", "20", 5);
        std::ostringstream out;
        write_panel_csv(out, p);
        std::istringstream in(out.str());
        std::string header;
        std::getline(in, header);
        CHECK(header == "tau2,DL,REML,MP,J,WT,CDL");
        std::size_t data_lines = 0;
        for (std::string l; std::getline(in, l);) ++data_lines;
        CHECK(data_lines == 3);
    }
}

TEST_CASE("selftest passes on a fresh build") {
    std::ostringstream sink;
    CHECK(run_selftest(sink) == 0);
}
