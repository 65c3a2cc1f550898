#include <metamd/results_io.hpp>

#include <metamd/errors.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace metamd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_token(const std::string& s) {
    if (s == "na") return kNaN;
    if (s == "inf") return std::numeric_limits<double>::infinity();
    return std::stod(s);
}

void push(std::vector<ResultRow>& rows, const Scenario& sc, const char* method,
          const char* metric, double value, double mc_se) {
    rows.push_back({sc.K, sc.n_pattern, sc.q, sc.sigma2_c, sc.sigma2_t, sc.tau2, sc.mu,
                    method, metric, value, mc_se});
}

}  // namespace

std::string format_value(double v) {
    if (std::isnan(v)) return "na";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<ResultRow> rows_for(const Scenario& sc, const AggregateMetrics& agg) {
    std::vector<ResultRow> rows;
    for (std::size_t i = 0; i < kNumTau2Point; ++i) {
        if (!sc.methods.tau2_point[i]) continue;
        push(rows, sc, tau2_point_name(i), "bias_tau2", agg.bias_tau2[i], agg.bias_tau2_se[i]);
        push(rows, sc, tau2_point_name(i), "nonconverged",
             static_cast<double>(agg.tau2_nonconv[i]), kNaN);
    }
    for (std::size_t i = 0; i < kNumTau2Interval; ++i) {
        if (!sc.methods.tau2_interval[i]) continue;
        push(rows, sc, tau2_interval_name(i), "cov_tau2", agg.cov_tau2[i], agg.cov_tau2_se[i]);
        push(rows, sc, tau2_interval_name(i), "width", agg.width_tau2[i], kNaN);
        push(rows, sc, tau2_interval_name(i), "nonconverged",
             static_cast<double>(agg.tau2_ci_nonconv[i]), kNaN);
    }
    for (std::size_t i = 0; i < kNumMuPoint; ++i) {
        if (!sc.methods.mu_point[i]) continue;
        push(rows, sc, mu_point_name(i), "bias_mu", agg.bias_mu[i], agg.bias_mu_se[i]);
        push(rows, sc, mu_point_name(i), "mse_mu", agg.mse_mu[i], agg.mse_mu_se[i]);
        push(rows, sc, mu_point_name(i), "nonconverged",
             static_cast<double>(agg.mu_nonconv[i]), kNaN);
    }
    for (std::size_t i = 0; i < kNumMuInterval; ++i) {
        if (!sc.methods.mu_interval[i]) continue;
        push(rows, sc, mu_interval_name(i), "cov_mu", agg.cov_mu[i], agg.cov_mu_se[i]);
        push(rows, sc, mu_interval_name(i), "width", agg.width_mu[i], kNaN);
        push(rows, sc, mu_interval_name(i), "nonconverged",
             static_cast<double>(agg.mu_ci_nonconv[i]), kNaN);
    }
    // MSE ratios when SSW and both IV references were run.
    if (sc.methods.mu_point[6] && sc.methods.mu_point[2] && sc.methods.mu_point[4] &&
        !std::isnan(agg.mse_mu[6]) && agg.mse_mu[2] > 0.0 && agg.mse_mu[4] > 0.0) {
        const auto [vs_mp, vs_wt] = mse_ratio(agg);
        push(rows, sc, "SSW/IV-MP", "mse_ratio", vs_mp, kNaN);
        push(rows, sc, "SSW/IV-WT", "mse_ratio", vs_wt, kNaN);
    }
    return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "K,n_pattern,q,sigma2_c,sigma2_t,tau2,mu,method,metric,value,mc_se\n";
    for (const auto& r : rows) {
        out << r.K << ',' << r.n_pattern << ',' << format_value(r.q) << ','
            << format_value(r.sigma2_c) << ',' << format_value(r.sigma2_t) << ','
            << format_value(r.tau2) << ',' << format_value(r.mu) << ',' << r.method
            << ',' << r.metric << ',' << format_value(r.value) << ','
            << format_value(r.mc_se) << '\n';
    }
}

std::vector<ResultRow> read_results_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError(source_name + ": empty results file");
    std::vector<ResultRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string f[11];
        for (int i = 0; i < 11; ++i) {
            if (!std::getline(ss, f[i], ','))
                throw ValidationError(source_name + ":" + std::to_string(lineno) +
                                      ": expected 11 fields");
        }
        try {
            ResultRow r;
            r.K = static_cast<std::size_t>(std::stoul(f[0]));
            r.n_pattern = f[1];
            r.q = parse_token(f[2]);
            r.sigma2_c = parse_token(f[3]);
            r.sigma2_t = parse_token(f[4]);
            r.tau2 = parse_token(f[5]);
            r.mu = parse_token(f[6]);
            r.method = f[7];
            r.metric = f[8];
            r.value = parse_token(f[9]);
            r.mc_se = parse_token(f[10]);
            rows.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw ValidationError(source_name + ":" + std::to_string(lineno) + ": " +
                                  e.what());
        }
    }
    return rows;
}

std::vector<ResultRow> read_results_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open results file: " + path);
    return read_results_csv(in, path);
}

}  // namespace metamd
