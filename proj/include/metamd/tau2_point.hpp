#pragma once

#include <metamd/study.hpp>

#include <span>
#include <string>

namespace metamd {

enum class Tau2Method { DL, REML, MP, J, WT, CDL };

const char* to_string(Tau2Method m);

struct Tau2Result {
    Tau2Method method = Tau2Method::DL;
    double value = 0.0;
    bool converged = true;
    std::size_t iterations = 0;
    bool truncated = false;  // hit the tau2 = 0 boundary
    std::string diagnostic;
};

Tau2Result tau2_dl(std::span<const EffectRow> effects);
Tau2Result tau2_cdl(std::span<const EffectRow> effects, std::span<const double> g);
Tau2Result tau2_mp(std::span<const EffectRow> effects);
Tau2Result tau2_wt(std::span<const EffectRow> effects, std::span<const double> g);
Tau2Result tau2_reml(std::span<const EffectRow> effects);
Tau2Result tau2_j(std::span<const EffectRow> effects);

/// Restricted log-likelihood (constants dropped) and its tau2-derivative.
double reml_loglik(std::span<const EffectRow> effects, double tau2);
double reml_loglik_deriv(std::span<const EffectRow> effects, double tau2);

}  // namespace metamd
