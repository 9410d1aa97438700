#pragma once

// Outage probability, normalized level crossing rate and normalized average
// fade duration of the EGC output SIR.
//
// Everything is evaluated in normalized form. With X' = X/sqrt(Omega_S) (sum of
// M unit-power Rayleigh envelopes) and Y' the unit-power interference envelope
// of shape alpha, the statistics depend on (M, alpha, t = z/beta) only:
//   OP       = P(X' < s Y'),                 s = sqrt(t)
//   LCR/f_m0 = sqrt(pi/2) sqrt(M + rho^2 t) I(s),  rho = f_mi/f_m0
//   I(s)     = int_0^inf f_X'(u s) f_Y'(u) du
// and AFD * f_m0 = OP / (LCR/f_m0).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "egc/charfun.hpp"
#include "egc/errors.hpp"
#include "egc/quadrature.hpp"
#include "egc/specfun.hpp"
#include "egc/system.hpp"

namespace egc::analytic {

using quadrature::QuadratureSpec;

struct BeaulieuParams {
  double t_period = 80.0;
  /// Terms always summed. With extend_tail the sum continues in doubling
  /// blocks until the estimated remainder is below tail_tol.
  std::size_t l_terms = 200;
  bool extend_tail = true;
  double tail_tol = 1e-10;
  std::size_t max_terms = std::size_t{1} << 20;

  double omega0() const { return 2.0 * std::numbers::pi / t_period; }

  void validate() const {
    if (!(t_period > 0.0) || !std::isfinite(t_period)) throw domain_error("BeaulieuParams: T must be positive");
    if (l_terms < 1) throw domain_error("BeaulieuParams: L must be >= 1");
    if (!(tail_tol > 0.0)) throw domain_error("BeaulieuParams: tail_tol must be positive");
  }
};

struct MethodParams {
  /// Unset means default_quadrature_spec(config).
  std::optional<QuadratureSpec> quadrature;
  BeaulieuParams series;
};

struct StatValue {
  double value = 0.0;
  std::size_t evaluations = 0;
  /// False when a series hit max_terms before its remainder estimate met
  /// tail_tol.
  bool converged = true;
};

struct StatPoint {
  double z = 0.0;
  double nsirth_db = 0.0;
  double op = 0.0;
  double lcr_norm = 0.0;
  double afd_norm = 0.0;
  bool afd_defined = true;
  Method method = Method::Quadrature;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// Default tolerances 1e-9 with tail panels of width 2 pi / sqrt(M) in
/// normalized frequency.
inline QuadratureSpec default_quadrature_spec(const SystemConfig& cfg) {
  QuadratureSpec spec;
  spec.tail_panel_width = 2.0 * std::numbers::pi / std::sqrt(static_cast<double>(cfg.m_branches));
  return spec;
}

// ---------------------------------------------------------------------------
// Dual-branch desired envelope

inline double desired_envelope_cdf_m2(double x, double omega_s) {
  if (!(omega_s > 0.0)) throw domain_error("desired_envelope_cdf_m2: Omega_S must be positive");
  if (!(x >= 0.0)) throw domain_error("desired_envelope_cdf_m2: x must be >= 0");
  const double q = x * x / omega_s;
  const double v = 1.0 - std::exp(-q) -
                   std::sqrt(std::numbers::pi / (2.0 * omega_s)) * x * std::exp(-0.5 * q) *
                       specfun::erf_fn(x / std::sqrt(2.0 * omega_s));
  return std::clamp(v, 0.0, 1.0);
}

inline double desired_envelope_pdf_m2(double x, double omega_s) {
  if (!(omega_s > 0.0)) throw domain_error("desired_envelope_pdf_m2: Omega_S must be positive");
  if (!(x >= 0.0)) throw domain_error("desired_envelope_pdf_m2: x must be >= 0");
  const double q = x * x / omega_s;
  const double c = std::sqrt(std::numbers::pi / (2.0 * omega_s));
  const double e = std::exp(-0.5 * q) * specfun::erf_fn(x / std::sqrt(2.0 * omega_s));
  return std::max(0.0, x / omega_s * std::exp(-q) + c * (q - 1.0) * e);
}

// ---------------------------------------------------------------------------
// Closed forms in (alpha, t = z/beta)

namespace closed {

inline double op_m1(double alpha, double t) { return -std::expm1(-alpha * std::log1p(t)); }

inline double op_m2(double alpha, double t) {
  const double x = 0.5 * t / (1.0 + t);
  const double b = specfun::incomplete_beta(x, 0.5, alpha + 0.5);
  const double v = -std::expm1(-alpha * std::log1p(t)) -
                   alpha * std::sqrt(0.5 * t) * std::exp(-(alpha + 0.5) * std::log1p(0.5 * t)) * b;
  return std::clamp(v, 0.0, 1.0);
}

// Braced factor shared by both dual-branch crossing-rate forms.
inline double lcr_m2_brace(double alpha, double t) {
  const double x = 0.5 * t / (1.0 + t);
  const double b = specfun::incomplete_beta(x, 0.5, alpha);
  return std::sqrt(t) * std::exp(-(alpha - 0.5) * std::log1p(t)) +
         std::sqrt(0.5) * ((alpha - 0.5) * t - 1.0) * std::exp(-alpha * std::log1p(0.5 * t)) * b;
}

/// int_0^inf f_X'(u s) f_Y'(u) du for M = 2.
inline double density_overlap_m2(double alpha, double t) {
  return specfun::gamma_ratio_half(alpha) / (1.0 + 0.5 * t) * lcr_m2_brace(alpha, t);
}

/// Same for M = 1: 2 s Gamma(alpha+1/2)/Gamma(alpha) (1+t)^-(alpha+1/2).
inline double density_overlap_m1(double alpha, double t) {
  return 2.0 * std::sqrt(t) * specfun::gamma_ratio_half(alpha) * std::exp(-(alpha + 0.5) * std::log1p(t));
}

inline double lcr_prefactor(int m, double t, double rho) {
  return std::sqrt(0.5 * std::numbers::pi) * std::sqrt(m + rho * rho * t);
}

/// Dual branch, general Doppler ratio rho = f_mi/f_m0.
inline double lcr_m2(double alpha, double t, double rho) {
  return lcr_prefactor(2, t, rho) * density_overlap_m2(alpha, t);
}

/// Dual branch, f_m0 = f_mi.
inline double lcr_m2_equal_doppler(double alpha, double t) {
  return std::sqrt(std::numbers::pi) * specfun::gamma_ratio_half(alpha) / std::sqrt(1.0 + 0.5 * t) *
         lcr_m2_brace(alpha, t);
}

/// Single branch, general Doppler ratio.
inline double lcr_m1(double alpha, double t, double rho) {
  return lcr_prefactor(1, t, rho) * density_overlap_m1(alpha, t);
}

/// Single branch, f_m0 = f_mi.
inline double lcr_m1_equal_doppler(double alpha, double t) {
  return std::sqrt(2.0 * std::numbers::pi) * specfun::gamma_ratio_half(alpha) * std::sqrt(t) *
         std::exp(-alpha * std::log1p(t));
}

}  // namespace closed

namespace detail {

class NeumaierSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Unit-power envelope density of shape alpha.
inline double nakagami_pdf(double u, double alpha, double log_gamma_alpha) {
  if (u <= 0.0) return 0.0;
  return std::exp(std::log(2.0) + (2.0 * alpha - 1.0) * std::log(u) - u * u - log_gamma_alpha);
}

inline double desired_cdf_unit(int m, double x) {
  return m == 1 ? -std::expm1(-x * x) : desired_envelope_cdf_m2(x, 1.0);
}

inline double desired_pdf_unit(int m, double x) {
  return m == 1 ? 2.0 * x * std::exp(-x * x) : desired_envelope_pdf_m2(x, 1.0);
}

inline QuadratureSpec density_spec(const QuadratureSpec& base, double alpha) {
  QuadratureSpec spec = base;
  spec.tail_panel_width = 1.0;
  spec.min_extent = std::sqrt(alpha) + 1.0;
  return spec;
}

struct Normalized {
  int m;
  double alpha;
  double t;
  double rho;
};

inline Normalized normalize(double z, const SystemConfig& cfg) {
  const auto dp = derived_params(cfg);
  const double rho = cfg.f_m0 > 0.0 ? cfg.f_mi / cfg.f_m0 : 0.0;
  return {cfg.m_branches, dp.alpha, z / dp.beta, rho};
}

inline void require_m_le_2(Method method, int m) {
  if (m > 2) {
    if (method == Method::ClosedForm) throw domain_error("closed form requires M ≤ 2");
    throw domain_error("density integral requires M ≤ 2");
  }
}

inline void check_threshold(double z) {
  if (!(z >= 0.0) || !std::isfinite(z)) throw domain_error("threshold z must be finite and >= 0");
}

inline void require_doppler(const SystemConfig& cfg) {
  if (!(cfg.f_m0 > 0.0)) throw domain_error("normalized crossing rate requires f_m0 > 0");
}

// Beaulieu series sum_n term(n) over n = 1..L, then doubling blocks until the
// geometric remainder estimate drops below tail_tol.
template <typename Term>
StatValue beaulieu_sum(const BeaulieuParams& p, Term&& term) {
  p.validate();
  NeumaierSum sum;
  std::size_t n = 0;
  for (; n < p.l_terms; ++n) sum.add(term(n + 1));
  StatValue out{0.0, n, true};
  if (p.extend_tail) {
    double prev_block = std::numeric_limits<double>::infinity();
    bool done = false;
    while (!done) {
      const std::size_t block = n;
      if (n + block > p.max_terms) {
        out.converged = false;
        break;
      }
      double abs_block = 0.0;
      for (std::size_t k = 0; k < block; ++k) {
        const double v = term(n + k + 1);
        abs_block += std::abs(v);
        sum.add(v);
      }
      n += block;
      const double r = abs_block / prev_block;
      done = abs_block == 0.0 || (std::isfinite(prev_block) && r < 1.0 && abs_block * r / (1.0 - r) <= p.tail_tol);
      prev_block = abs_block;
    }
  }
  out.value = sum.value();
  out.evaluations = n;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Normalized entry points (M, alpha, t = z/beta, rho = f_mi/f_m0)

inline StatValue op_normalized(int m, double alpha, double t, Method method, const MethodParams& params = {}) {
  if (t == 0.0) return {};
  switch (method) {
    case Method::ClosedForm:
      detail::require_m_le_2(method, m);
      return {m == 1 ? closed::op_m1(alpha, t) : closed::op_m2(alpha, t), 1, true};
    case Method::DensityIntegral: {
      detail::require_m_le_2(method, m);
      const double s = std::sqrt(t);
      const double lg = specfun::log_gamma(alpha);
      const auto spec =
          detail::density_spec(params.quadrature.value_or(QuadratureSpec{}), alpha);
      const auto r = quadrature::adaptive_semi_infinite(
          [&](double u) { return detail::desired_cdf_unit(m, u * s) * detail::nakagami_pdf(u, alpha, lg); }, spec);
      return {std::clamp(r.value, 0.0, 1.0), r.evaluations, true};
    }
    case Method::Quadrature: {
      const auto cfs = charfun::normalized_cfs(m, alpha);
      const double s = std::sqrt(t);
      const double slope = cfs.phi_x.mean() - s * cfs.phi_y.mean();
      QuadratureSpec spec;
      if (params.quadrature) {
        spec = *params.quadrature;
      } else {
        spec.tail_panel_width = 2.0 * std::numbers::pi / std::sqrt(static_cast<double>(m));
      }
      const auto r = quadrature::adaptive_semi_infinite(
          [&](double w) {
            if (w < 1e-6) return slope;
            return (cfs.phi_x(w) * std::conj(cfs.phi_y(w * s))).imag() / w;
          },
          spec);
      return {std::clamp(0.5 - r.value / std::numbers::pi, 0.0, 1.0), r.evaluations, true};
    }
    case Method::Series: {
      const auto cfs = charfun::normalized_cfs(m, alpha);
      const double s = std::sqrt(t);
      const double w0 = params.series.omega0();
      auto r = detail::beaulieu_sum(params.series, [&](std::size_t n) {
        const double k = 2.0 * static_cast<double>(n) - 1.0;
        const double w = k * w0;
        return (cfs.phi_x(w) * std::conj(cfs.phi_y(w * s))).imag() / k;
      });
      r.value = std::clamp(0.5 - 2.0 / std::numbers::pi * r.value, 0.0, 1.0);
      return r;
    }
  }
  throw domain_error("unknown method");
}

/// I(s) = int_0^inf f_X'(u s) f_Y'(u) du by the chosen method.
inline StatValue density_overlap_normalized(int m, double alpha, double t, Method method,
                                            const MethodParams& params = {}) {
  if (t == 0.0) return {};
  switch (method) {
    case Method::ClosedForm:
      detail::require_m_le_2(method, m);
      return {m == 1 ? closed::density_overlap_m1(alpha, t) : closed::density_overlap_m2(alpha, t), 1, true};
    case Method::DensityIntegral: {
      detail::require_m_le_2(method, m);
      const double s = std::sqrt(t);
      const double lg = specfun::log_gamma(alpha);
      const auto spec =
          detail::density_spec(params.quadrature.value_or(QuadratureSpec{}), alpha);
      const auto r = quadrature::adaptive_semi_infinite(
          [&](double u) { return detail::desired_pdf_unit(m, u * s) * detail::nakagami_pdf(u, alpha, lg); }, spec);
      return {std::max(0.0, r.value), r.evaluations, true};
    }
    case Method::Quadrature: {
      const auto cfs = charfun::normalized_cfs(m, alpha);
      const double s = std::sqrt(t);
      QuadratureSpec spec;
      if (params.quadrature) {
        spec = *params.quadrature;
      } else {
        spec.tail_panel_width = 2.0 * std::numbers::pi / std::sqrt(static_cast<double>(m));
      }
      const auto r = quadrature::adaptive_semi_infinite(
          [&](double w) { return (cfs.phi_x(w) * std::conj(cfs.phi_y(w * s))).real(); }, spec);
      return {std::max(0.0, r.value / std::numbers::pi), r.evaluations, true};
    }
    case Method::Series: {
      const auto cfs = charfun::normalized_cfs(m, alpha);
      const double s = std::sqrt(t);
      const double w0 = params.series.omega0();
      auto r = detail::beaulieu_sum(params.series, [&](std::size_t n) {
        const double w = (2.0 * static_cast<double>(n) - 1.0) * w0;
        return (cfs.phi_x(w) * std::conj(cfs.phi_y(w * s))).real();
      });
      r.value = std::max(0.0, 4.0 / params.series.t_period * r.value);
      return r;
    }
  }
  throw domain_error("unknown method");
}

inline StatValue lcr_normalized(int m, double alpha, double t, double rho, Method method,
                                const MethodParams& params = {}) {
  if (t == 0.0) return {};
  if (method == Method::ClosedForm && rho == 1.0) {
    detail::require_m_le_2(method, m);
    return {m == 1 ? closed::lcr_m1_equal_doppler(alpha, t) : closed::lcr_m2_equal_doppler(alpha, t), 1, true};
  }
  auto r = density_overlap_normalized(m, alpha, t, method, params);
  r.value *= closed::lcr_prefactor(m, t, rho);
  return r;
}

// ---------------------------------------------------------------------------
// Configuration-level API

inline StatValue outage_probability(double z, const SystemConfig& cfg, Method method,
                                    const MethodParams& params = {}) {
  detail::check_threshold(z);
  const auto nz = detail::normalize(z, cfg);
  return op_normalized(nz.m, nz.alpha, nz.t, method, params);
}

/// N_Z(z) / f_m0.
inline StatValue level_crossing_rate(double z, const SystemConfig& cfg, Method method,
                                     const MethodParams& params = {}) {
  detail::check_threshold(z);
  detail::require_doppler(cfg);
  const auto nz = detail::normalize(z, cfg);
  return lcr_normalized(nz.m, nz.alpha, nz.t, nz.rho, method, params);
}

/// f_m0 T_Z(z). Throws undefined_statistic when the crossing rate underflows.
inline StatValue average_fade_duration(double z, const SystemConfig& cfg, Method method,
                                       const MethodParams& params = {}) {
  detail::check_threshold(z);
  if (z == 0.0) return {};
  const auto op = outage_probability(z, cfg, method, params);
  const auto lcr = level_crossing_rate(z, cfg, method, params);
  const double afd = op.value / lcr.value;
  if (!(lcr.value > std::numeric_limits<double>::min()) || !std::isfinite(afd)) {
    std::ostringstream os;
    os << "fade duration undefined at z = " << z << " (crossing rate " << lcr.value << ")";
    throw undefined_statistic(os.str());
  }
  return {afd, op.evaluations + lcr.evaluations, op.converged && lcr.converged};
}

/// OP, normalized LCR and normalized AFD at one threshold, all by one method.
inline StatPoint evaluate_point(double z, const SystemConfig& cfg, Method method, const MethodParams& params = {}) {
  detail::check_threshold(z);
  detail::require_doppler(cfg);
  StatPoint p;
  p.z = z;
  p.nsirth_db = z > 0.0 ? nsirth_db(cfg.gamma(), z) : std::numeric_limits<double>::infinity();
  p.method = method;
  const auto op = outage_probability(z, cfg, method, params);
  const auto lcr = level_crossing_rate(z, cfg, method, params);
  p.op = op.value;
  p.lcr_norm = lcr.value;
  p.evaluations = op.evaluations + lcr.evaluations;
  p.converged = op.converged && lcr.converged;
  if (z == 0.0) {
    p.afd_norm = 0.0;
  } else if (lcr.value > std::numeric_limits<double>::min() && std::isfinite(op.value / lcr.value)) {
    p.afd_norm = op.value / lcr.value;
  } else {
    p.afd_norm = std::numeric_limits<double>::quiet_NaN();
    p.afd_defined = false;
  }
  return p;
}

}  // namespace egc::analytic
