#pragma once

#include <metamd/simulation.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace metamd {

/// One long-format results row. NaN serializes as "na", infinity as "inf".
struct ResultRow {
    std::size_t K = 0;
    std::string n_pattern;
    double q = 0.0;
    double sigma2_c = 0.0;
    double sigma2_t = 0.0;
    double tau2 = 0.0;
    double mu = 0.0;
    std::string method;
    std::string metric;
    double value = 0.0;
    double mc_se = 0.0;
};

/// Rows for one scenario in canonical method/metric order.
std::vector<ResultRow> rows_for(const Scenario& sc, const AggregateMetrics& agg);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in,
                                        const std::string& source_name = "<stream>");
std::vector<ResultRow> read_results_file(const std::string& path);

std::string format_value(double v);

}  // namespace metamd
