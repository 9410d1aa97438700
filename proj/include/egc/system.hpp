#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "egc/errors.hpp"

namespace egc {

enum class Scenario { Incoherent, Coherent };

enum class Method { DensityIntegral, Quadrature, Series, ClosedForm };

inline std::string_view to_string(Scenario s) { return s == Scenario::Incoherent ? "incoherent" : "coherent"; }

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::DensityIntegral: return "density";
    case Method::Quadrature: return "quadrature";
    case Method::Series: return "series";
    case Method::ClosedForm: return "closed";
  }
  return "?";
}

inline std::optional<Scenario> parse_scenario(std::string_view s) {
  if (s == "incoherent" || s == "inc") return Scenario::Incoherent;
  if (s == "coherent" || s == "coh") return Scenario::Coherent;
  return std::nullopt;
}

inline std::optional<Method> parse_method(std::string_view s) {
  if (s == "density") return Method::DensityIntegral;
  if (s == "quadrature" || s == "quad") return Method::Quadrature;
  if (s == "series") return Method::Series;
  if (s == "closed") return Method::ClosedForm;
  return std::nullopt;
}

/// M-branch EGC receiver with N Rayleigh co-channel interferers.
struct SystemConfig {
  int m_branches = 1;
  int n_interferers = 1;
  double omega_s = 1.0;
  double omega_i = 1.0;
  double f_m0 = 1.0;
  double f_mi = 1.0;
  Scenario scenario = Scenario::Incoherent;

  double gamma() const { return omega_s / omega_i; }

  void validate() const {
    if (m_branches < 1) throw domain_error("SystemConfig: M must be >= 1");
    if (n_interferers < 1) throw domain_error("SystemConfig: N must be >= 1");
    if (!(omega_s > 0.0) || !std::isfinite(omega_s)) throw domain_error("SystemConfig: Omega_S must be positive");
    if (!(omega_i > 0.0) || !std::isfinite(omega_i)) throw domain_error("SystemConfig: Omega_I must be positive");
    if (!(f_m0 >= 0.0) || !std::isfinite(f_m0)) throw domain_error("SystemConfig: f_m0 must be >= 0");
    if (!(f_mi >= 0.0) || !std::isfinite(f_mi)) throw domain_error("SystemConfig: f_mi must be >= 0");
    const double g = gamma();
    if (!(g > 0.0) || !std::isfinite(g)) throw domain_error("SystemConfig: Omega_S/Omega_I must be finite and positive");
  }
};

struct DerivedParams {
  double alpha;
  double beta;
  double gamma;
};

/// Incoherent: (alpha, beta) = (MN, gamma). Coherent: (N, gamma/M).
inline DerivedParams derived_params(const SystemConfig& cfg) {
  cfg.validate();
  const double m = cfg.m_branches;
  const double n = cfg.n_interferers;
  const double g = cfg.gamma();
  if (cfg.scenario == Scenario::Incoherent) return {m * n, g, g};
  return {n, g / m, g};
}

struct DerivativeVariances {
  double sigma2_xdot;
  double sigma2_ydot;
};

inline DerivativeVariances derivative_variances(const SystemConfig& cfg) {
  cfg.validate();
  const double m = cfg.m_branches;
  const double a0 = std::numbers::pi * cfg.f_m0;
  const double ai = std::numbers::pi * cfg.f_mi;
  const double y_power = cfg.scenario == Scenario::Incoherent ? cfg.omega_i : m * cfg.omega_i;
  return {a0 * a0 * m * cfg.omega_s, ai * ai * y_power};
}

/// NSIRth in dB for a linear threshold z.
inline double nsirth_db(double gamma, double z) { return 10.0 * std::log10(gamma / z); }

/// Linear threshold z for an NSIRth in dB.
inline double threshold_from_nsirth_db(double gamma, double nsirth_db) {
  return gamma / std::pow(10.0, nsirth_db / 10.0);
}

}  // namespace egc
