#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdmin/directions.hpp"
#include "mdmin/norms.hpp"

namespace mdmin {

// Named method catalog for the benchmark harness. A preset pins the
// direction strategy, the minimized norm and a default relaxation; the
// remaining run parameters come from the experiment. "nagm" is the fixed
// step accelerated-gradient baseline, not a framework instance.
struct Preset {
  std::string name;
  StrategySpec strategy;
  NormSpec norm = NormSpec::from_ell(0.0);
  double omega = 1.0;
  bool baseline = false;  // runs outside the multi-direction framework
  // expected to hit the iteration cap on badly conditioned instances (the
  // convergence guarantee holds, but the rate constant is close to one)
  bool slow_at_high_kappa = false;
  std::string summary;
};

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> catalog = [] {
    std::vector<Preset> v;
    v.push_back({"sd", {StrategyKind::GradientOnly}, NormSpec::from_ell(0.0), 1.0, false, true,
                 "steepest descent: gradient direction, exact line search"});
    v.push_back({"mg", {StrategyKind::GradientOnly}, NormSpec::from_ell(0.5), 1.0, false, true,
                 "minimal gradient: gradient direction, 2-norm of the gradient minimized"});
    v.push_back({"cg", {StrategyKind::GradPrevStep}, NormSpec::from_ell(0.0), 1.0, false, false,
                 "conjugate gradients via [g, previous step]"});
    v.push_back({"cr", {StrategyKind::GradPrevStep}, NormSpec::from_ell(0.5), 1.0, false, false,
                 "conjugate residuals via [g, previous step]"});
    v.push_back({"cd1", {StrategyKind::GradPrevStep}, NormSpec::from_ell(1.0), 1.0, false, false,
                 "conjugate directions under the first power weight"});
    v.push_back({"forsythe2", {StrategyKind::Forsythe, 2}, NormSpec::from_ell(0.0), 1.0, false,
                 false, "two-column Krylov directions [g, Ag]"});
    v.push_back({"forsythe3", {StrategyKind::Forsythe, 3}, NormSpec::from_ell(0.0), 1.0, false,
                 false, "three-column Krylov directions [g, Ag, A^2 g]"});
    v.push_back({"forsythe4", {StrategyKind::Forsythe, 4}, NormSpec::from_ell(0.0), 1.0, false,
                 false, "four-column Krylov directions"});
    v.push_back({"gdwgm", {StrategyKind::GradPrevStep}, NormSpec::gdwgm(0.5), 1.0, false, false,
                 "delayed weighted gradient merit norm, mu = 0.5"});
    v.push_back({"gdrd", {StrategyKind::GradRandom}, NormSpec::from_ell(0.0), 1.0, false, true,
                 "gradient plus a fresh random direction"});
    v.push_back({"forsythe-mom", {StrategyKind::ForsytheMomentum}, NormSpec::from_ell(0.0), 1.0,
                 false, false, "[g, Ag, previous step]"});
    v.push_back({"mom-rand", {StrategyKind::MomentumRandom}, NormSpec::from_ell(0.0), 1.0, false,
                 true, "[g, previous step, random direction]"});
    v.push_back({"nagm", {StrategyKind::GradientOnly}, NormSpec::from_ell(0.0), 1.0, true, true,
                 "accelerated gradient baseline with constant steps"});
    return v;
  }();
  return catalog;
}

inline const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

// Every catalog entry that is a framework instance (everything but the
// fixed-step baseline).
inline std::vector<Preset> framework_presets() {
  std::vector<Preset> out;
  for (const auto& p : presets())
    if (!p.baseline) out.push_back(p);
  return out;
}

}  // namespace mdmin
