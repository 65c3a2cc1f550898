#include <metamd/figure_data.hpp>

#include <metamd/errors.hpp>
#include <metamd/simulation.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <set>

namespace metamd {

namespace {

struct FamilySpec {
    std::string metric;
    std::vector<std::string> methods;
};

FamilySpec family_spec(const std::string& family) {
    if (family.size() != 2 || (family[0] != 'A' && family[0] != 'B') ||
        family[1] < '1' || family[1] > '6')
        throw ValidationError("unknown figure family '" + family + "' (expected A1..B6)");
    const bool tau_family = family[0] == 'A';
    const bool odd = ((family[1] - '0') % 2) == 1;
    FamilySpec spec;
    if (tau_family && odd) {
        spec.metric = "bias_tau2";
        for (std::size_t i = 0; i < kNumTau2Point; ++i)
            spec.methods.push_back(tau2_point_name(i));
    } else if (tau_family) {
        spec.metric = "cov_tau2";
        spec.methods = {"QP", "BJ", "PL", "WT", "J"};
    } else if (odd) {
        spec.metric = "bias_mu";
        for (std::size_t i = 0; i < kNumMuPoint; ++i)
            spec.methods.push_back(mu_point_name(i));
    } else {
        spec.metric = "cov_mu";
        for (std::size_t i = 0; i < kNumMuInterval; ++i)
            spec.methods.push_back(mu_interval_name(i));
    }
    return spec;
}

}  // namespace

PanelData extract_panel(const std::vector<ResultRow>& rows, const std::string& family,
                        const std::string& n_pattern, std::size_t K) {
    const FamilySpec spec = family_spec(family);
    PanelData panel;
    panel.family = family;
    panel.metric = spec.metric;
    panel.methods = spec.methods;

    std::map<double, std::map<std::string, double>> by_tau2;
    std::set<std::pair<std::string, std::size_t>> available;
    for (const auto& r : rows) {
        if (r.metric != spec.metric) continue;
        available.insert({r.n_pattern, r.K});
        if (r.n_pattern != n_pattern || r.K != K) continue;
        by_tau2[r.tau2][r.method] = r.value;
    }
    if (by_tau2.empty()) {
        std::string listing = "no rows for family " + family + " at n_pattern=" +
                              n_pattern + ", K=" + std::to_string(K) +
                              "; available panels:";
        if (available.empty()) listing += " (none)";
        for (const auto& [np, k] : available)
            listing += " (n=" + np + ",K=" + std::to_string(k) + ")";
        throw ValidationError(listing);
    }
    for (const auto& [t2, methods] : by_tau2) {
        panel.tau2.push_back(t2);
        std::vector<double> row;
        row.reserve(spec.methods.size());
        for (const auto& m : spec.methods) {
            const auto it = methods.find(m);
            row.push_back(it == methods.end() ? std::numeric_limits<double>::quiet_NaN()
                                              : it->second);
        }
        panel.values.push_back(std::move(row));
    }
    return panel;
}

void write_panel_csv(std::ostream& out, const PanelData& panel) {
    out << "tau2";
    for (const auto& m : panel.methods) out << ',' << m;
    out << '\n';
    for (std::size_t i = 0; i < panel.tau2.size(); ++i) {
        out << format_value(panel.tau2[i]);
        for (const double v : panel.values[i]) out << ',' << format_value(v);
        out << '\n';
    }
}

}  // namespace metamd
