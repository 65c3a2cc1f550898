#pragma once

#include <metamd/results_io.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace metamd {

/// One plot-ready panel: tau2 on the x axis, one column per method.
struct PanelData {
    std::string family;
    std::string metric;
    std::vector<std::string> methods;
    std::vector<double> tau2;                 // sorted ascending
    std::vector<std::vector<double>> values;  // [tau2 index][method index]
};

/// Families A1..A6 map to bias_tau2 (odd) / cov_tau2 (even);
/// B1..B6 map to bias_mu (odd) / cov_mu (even).
PanelData extract_panel(const std::vector<ResultRow>& rows, const std::string& family,
                        const std::string& n_pattern, std::size_t K);

void write_panel_csv(std::ostream& out, const PanelData& panel);

}  // namespace metamd
