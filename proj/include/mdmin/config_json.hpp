#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "mdmin/directions.hpp"
#include "mdmin/norms.hpp"
#include "mdmin/preconditioner.hpp"
#include "mdmin/problem.hpp"

namespace mdmin {

// Anything wrong with user-supplied configuration. The CLI maps this to its
// configuration exit code.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::GradientOnly: return "gradient-only";
    case StrategyKind::GradPrevStep: return "grad-prev-step";
    case StrategyKind::Forsythe: return "forsythe";
    case StrategyKind::ForsytheMomentum: return "forsythe-momentum";
    case StrategyKind::GradRandom: return "grad-random";
    case StrategyKind::MomentumRandom: return "momentum-random";
    case StrategyKind::GradStepYdiff: return "grad-step-ydiff";
  }
  return "unknown";
}

inline StrategyKind strategy_kind_from_string(const std::string& s) {
  if (s == "gradient-only") return StrategyKind::GradientOnly;
  if (s == "grad-prev-step") return StrategyKind::GradPrevStep;
  if (s == "forsythe") return StrategyKind::Forsythe;
  if (s == "forsythe-momentum") return StrategyKind::ForsytheMomentum;
  if (s == "grad-random") return StrategyKind::GradRandom;
  if (s == "momentum-random") return StrategyKind::MomentumRandom;
  if (s == "grad-step-ydiff") return StrategyKind::GradStepYdiff;
  throw config_error("unknown strategy kind: " + s);
}

inline nlohmann::json to_json(const StrategySpec& spec) {
  nlohmann::json j{{"kind", to_string(spec.kind)}};
  if (spec.kind == StrategyKind::Forsythe) j["s"] = spec.s;
  return j;
}

inline StrategySpec strategy_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw config_error("strategy must be an object with a \"kind\" field");
  StrategySpec spec;
  spec.kind = strategy_kind_from_string(j.at("kind").get<std::string>());
  if (spec.kind == StrategyKind::Forsythe) {
    if (!j.contains("s")) throw config_error("forsythe strategy needs an \"s\" field");
    spec.s = j.at("s").get<int>();
  }
  return spec;
}

// A norm serializes to the shorthand {"ell": x} when it is a unit pure
// power, and to {"coeffs": {"-1": c, "0": c, ...}} in general. Both forms
// are accepted on input.
inline nlohmann::json to_json(const NormSpec& norm) {
  if (norm.ell && norm.coeffs.size() == 1 && norm.coeffs.begin()->second == 1.0)
    return nlohmann::json{{"ell", *norm.ell}};
  nlohmann::json coeffs = nlohmann::json::object();
  for (const auto& [power, c] : norm.coeffs) coeffs[std::to_string(power)] = c;
  return nlohmann::json{{"coeffs", coeffs}};
}

inline NormSpec norm_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw config_error("norm must be an object");
  if (j.contains("ell")) return NormSpec::from_ell(j.at("ell").get<double>());
  if (j.contains("mu")) return NormSpec::gdwgm(j.at("mu").get<double>());
  if (j.contains("coeffs")) {
    std::map<int, double> coeffs;
    for (const auto& [key, value] : j.at("coeffs").items()) {
      try {
        coeffs[std::stoi(key)] = value.get<double>();
      } catch (const std::exception&) {
        throw config_error("norm coefficient powers must be integers, got: " + key);
      }
    }
    try {
      return NormSpec::from_coeffs(std::move(coeffs));
    } catch (const std::invalid_argument& e) {
      throw config_error(e.what());
    }
  }
  throw config_error("norm needs \"ell\", \"mu\" or \"coeffs\"");
}

// The configurations only ever name a preconditioner family; the actual
// operator is built against the problem at run time.
enum class PrecondChoice { Identity, Jacobi, JacobiSqrt };

inline std::string to_string(PrecondChoice c) {
  switch (c) {
    case PrecondChoice::Identity: return "identity";
    case PrecondChoice::Jacobi: return "jacobi";
    case PrecondChoice::JacobiSqrt: return "jacobi-sqrt";
  }
  return "unknown";
}

inline PrecondChoice precond_choice_from_string(const std::string& s) {
  if (s == "identity") return PrecondChoice::Identity;
  if (s == "jacobi") return PrecondChoice::Jacobi;
  if (s == "jacobi-sqrt") return PrecondChoice::JacobiSqrt;
  throw config_error("unknown preconditioner: " + s);
}

inline Preconditioner resolve_precond(PrecondChoice choice, const ProblemInstance& problem) {
  switch (choice) {
    case PrecondChoice::Identity: return Preconditioner::identity();
    case PrecondChoice::Jacobi: return Preconditioner::jacobi(problem);
    case PrecondChoice::JacobiSqrt: return Preconditioner::jacobi_sqrt(problem);
  }
  throw std::logic_error("resolve_precond: unknown choice");
}

}  // namespace mdmin
