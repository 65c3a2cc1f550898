#include <metamd/study.hpp>

#include <metamd/errors.hpp>

#include <cmath>
#include <string>

namespace metamd {

namespace {

std::string label(std::size_t index) {
    return "study " + std::to_string(index + 1);
}

}  // namespace

void validate_study(const StudySummary& s, std::size_t index) {
    if (s.n_t < 2) throw ValidationError(label(index) + ": n_t must be >= 2");
    if (s.n_c < 2) throw ValidationError(label(index) + ": n_c must be >= 2");
    if (!(s.var_t > 0.0) || !std::isfinite(s.var_t))
        throw ValidationError(label(index) + ": var_t must be finite and > 0");
    if (!(s.var_c > 0.0) || !std::isfinite(s.var_c))
        throw ValidationError(label(index) + ": var_c must be finite and > 0");
    if (!std::isfinite(s.mean_t)) throw ValidationError(label(index) + ": mean_t must be finite");
    if (!std::isfinite(s.mean_c)) throw ValidationError(label(index) + ": mean_c must be finite");
}

EffectRow md_effect(const StudySummary& s) {
    validate_study(s, 0);
    EffectRow row;
    row.y = s.mean_t - s.mean_c;
    row.v2 = s.var_t / static_cast<double>(s.n_t) + s.var_c / static_cast<double>(s.n_c);
    row.n_t = s.n_t;
    row.n_c = s.n_c;
    row.eff_n = static_cast<double>(s.n_t) * static_cast<double>(s.n_c) /
                static_cast<double>(s.n_t + s.n_c);
    return row;
}

std::vector<EffectRow> validate_dataset(std::span<const StudySummary> studies) {
    if (studies.size() < 2) throw ValidationError("insufficient studies: need K >= 2");
    std::vector<EffectRow> rows;
    rows.reserve(studies.size());
    for (std::size_t i = 0; i < studies.size(); ++i) {
        validate_study(studies[i], i);
        rows.push_back(md_effect(studies[i]));
    }
    return rows;
}

std::vector<StudySummary> shift_scale(std::span<const StudySummary> studies,
                                      double shift, double scale,
                                      bool shift_treatment_only) {
    if (!(scale > 0.0)) throw std::domain_error("shift_scale: scale must be > 0");
    std::vector<StudySummary> out(studies.begin(), studies.end());
    for (auto& s : out) {
        s.mean_t = scale * s.mean_t + shift;
        s.mean_c = scale * s.mean_c + (shift_treatment_only ? 0.0 : shift);
        s.var_t *= scale * scale;
        s.var_c *= scale * scale;
    }
    return out;
}

}  // namespace metamd
