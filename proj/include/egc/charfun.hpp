#pragma once

// Characteristic functions of Nakagami-like envelopes
//   f(u) = (1/Omega)^alpha 2 u^(2 alpha - 1) / Gamma(alpha) exp(-u^2/Omega)
// and of the EGC desired/interference envelope sums built from them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <complex>
#include <numbers>
#include <sstream>
#include <utility>

#include "egc/errors.hpp"
#include "egc/specfun.hpp"
#include "egc/system.hpp"

namespace egc::charfun {

using CfValue = std::complex<double>;

/// Envelope CF with Gamma(alpha+1/2)/Gamma(alpha) cached.
class BranchCf {
 public:
  BranchCf(double omega_avg, double alpha) : omega_avg_(omega_avg), alpha_(alpha) {
    if (!(omega_avg > 0.0) || !std::isfinite(omega_avg)) throw domain_error("branch_cf: Omega must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw domain_error("branch_cf: alpha must be positive");
    sqrt_omega_ = std::sqrt(omega_avg);
    ratio_ = specfun::gamma_ratio_half(alpha);
  }

  CfValue operator()(double omega) const {
    if (!std::isfinite(omega)) throw domain_error("branch_cf: omega must be finite");
    if (omega == 0.0) return {1.0, 0.0};
    const double x = -0.25 * omega * omega * omega_avg_;
    const auto re = specfun::kummer_1f1(alpha_, 0.5, x);
    const auto im = specfun::kummer_1f1(alpha_ + 0.5, 1.5, x);
    if (!re.converged || !im.converged) {
      if (alpha_ >= kFourierMinAlpha) return fourier_fallback(omega);
      std::ostringstream os;
      os << "charfun: 1F1 did not converge (omega=" << omega << ", Omega=" << omega_avg_ << ", alpha=" << alpha_
         << ")";
      throw numerical_error(os.str());
    }
    return {re.value, omega * sqrt_omega_ * ratio_ * im.value};
  }

  double omega_avg() const { return omega_avg_; }
  double alpha() const { return alpha_; }
  /// E[U] = sqrt(Omega) Gamma(alpha+1/2)/Gamma(alpha).
  double mean() const { return sqrt_omega_ * ratio_; }

 private:
  static constexpr double kFourierMinAlpha = 10.0;

  // Trapezoid rule on the unit-power density over its effective support. The
  // density is negligible at both ends (with a zero of order 2 alpha - 1 at
  // u = 0), so the rule converges geometrically once the step resolves omega.
  CfValue fourier_fallback(double omega) const {
    const double w = omega * sqrt_omega_;
    const double centre = std::sqrt(alpha_);
    const double lo = std::max(0.0, centre - 12.0);
    const double hi = centre + 12.0;
    const double step_target = 2.0 * std::numbers::pi / (std::abs(w) + 16.0);
    const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / step_target));
    const double h = (hi - lo) / static_cast<double>(panels);
    // Exponent taken relative to the mode u0; the rule's own mass normalizes.
    const double u0 = std::sqrt(alpha_ - 0.5);
    double mass = 0.0, re = 0.0, im = 0.0;
    for (std::size_t k = 1; k < panels; ++k) {
      const double u = lo + h * static_cast<double>(k);
      const double d = u - u0;
      const double f = std::exp((2.0 * alpha_ - 1.0) * std::log1p(d / u0) - d * (2.0 * u0 + d));
      mass += f;
      re += f * std::cos(w * u);
      im += f * std::sin(w * u);
    }
    return {re / mass, im / mass};
  }

  double omega_avg_;
  double alpha_;
  double sqrt_omega_;
  double ratio_;
};

inline CfValue branch_cf(double omega, double omega_avg, double alpha) { return BranchCf(omega_avg, alpha)(omega); }

/// z^m for a positive integer m.
inline CfValue integer_power(CfValue z, int m) {
  if (m < 1) throw domain_error("integer_power: exponent must be >= 1");
  if (m <= 8) {
    CfValue r = z;
    for (int k = 1; k < m; ++k) r *= z;
    return r;
  }
  return std::polar(std::pow(std::abs(z), m), m * std::arg(z));
}

/// CF of the sum of M i.i.d. envelopes: [branch]^M.
class SumCf {
 public:
  SumCf(BranchCf branch, int m) : branch_(branch), m_(m) {
    if (m < 1) throw domain_error("SumCf: M must be >= 1");
  }
  CfValue operator()(double omega) const { return integer_power(branch_(omega), m_); }
  double mean() const { return m_ * branch_.mean(); }
  int m() const { return m_; }

 private:
  BranchCf branch_;
  int m_;
};

struct SystemCfs {
  SumCf phi_x;
  BranchCf phi_y;
};

/// Phi_X = [Phi(., Omega_S, 1)]^M; Phi_Y = Phi(., Omega_I, MN) for incoherent,
/// Phi(., M Omega_I, N) for coherent combining.
inline SystemCfs system_cfs(const SystemConfig& cfg) {
  cfg.validate();
  const double m = cfg.m_branches;
  const double n = cfg.n_interferers;
  BranchCf y = cfg.scenario == Scenario::Incoherent ? BranchCf(cfg.omega_i, m * n) : BranchCf(m * cfg.omega_i, n);
  return {SumCf(BranchCf(cfg.omega_s, 1.0), cfg.m_branches), y};
}

/// The same pair at unit powers, shape alpha for the interference. Results
/// built on these depend on (M, alpha, z/beta) only.
inline SystemCfs normalized_cfs(int m, double alpha) { return {SumCf(BranchCf(1.0, 1.0), m), BranchCf(1.0, alpha)}; }

}  // namespace egc::charfun
