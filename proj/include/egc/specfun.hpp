#pragma once

// Real-argument special functions used by the fading-statistics formulas:
// gamma / log-gamma, the error function, Kummer's confluent hypergeometric
// function 1F1, the Gauss hypergeometric 2F1 (series region only) and the
// non-regularized incomplete beta function.
//
// Everything here is pure and re-entrant.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>

#include "egc/errors.hpp"

namespace egc::specfun {

/// Relative tolerance of the internal series and continued fractions.
inline constexpr double kTolerance = 1e-14;
/// Absolute floor added to the tolerance of 1F1. 1F1(a;b;0) = 1, so this is
/// a relative error against the function's natural scale.
inline constexpr double kAbsoluteFloor = 1e-15;
/// Maximum number of series terms / continued-fraction iterations.
inline constexpr std::size_t kTermBudget = 10000;

struct SpecFunResult {
  double value = 0.0;
  bool converged = false;
  std::size_t terms_used = 0;
};

namespace detail {

// Double-double arithmetic, just enough for ill-conditioned 1F1 sums.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;
};

inline DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DoubleDouble quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DoubleDouble two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
  DoubleDouble s = two_sum(a.hi, b.hi);
  const DoubleDouble t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator*(DoubleDouble a, double b) {
  DoubleDouble p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return quick_two_sum(p.hi, p.lo);
}

inline DoubleDouble operator/(DoubleDouble a, double b) {
  const double q1 = a.hi / b;
  const DoubleDouble p = two_prod(q1, b);
  DoubleDouble r = two_sum(a.hi, -p.hi);
  r.lo -= p.lo;
  r.lo += a.lo;
  const double q2 = (r.hi + r.lo) / b;
  return quick_two_sum(q1, q2);
}

inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
  DoubleDouble p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
  const double q1 = a.hi / b.hi;
  DoubleDouble r = a + (b * -q1);
  const double q2 = r.hi / b.hi;
  r = r + (b * -q2);
  const double q3 = r.hi / b.hi;
  return quick_two_sum(q1, q2) + DoubleDouble{q3, 0.0};
}

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// sin(pi x) with exact argument reduction.
inline double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0.0) r += 2.0;
  if (r == 0.0 || r == 1.0) return 0.0;
  if (r > 1.0) return -sin_pi(r - 1.0);
  if (r > 0.5) r = 1.0 - r;
  return std::sin(std::numbers::pi * r);
}

// Lanczos approximation, g = 7, nine coefficients.
inline constexpr double kLanczosG = 7.0;
inline constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// ln Gamma(x) for x >= 0.5.
inline double lanczos_log_gamma(double x) {
  const double xm1 = x - 1.0;
  double series = kLanczos[0];
  for (int i = 1; i < 9; ++i) series += kLanczos[i] / (xm1 + i);
  const double t = xm1 + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t + std::log(series);
}

// Partial sums of sum_k (c)_k / (b)_k * y^k / k!, carried with a running
// power-of-ten rescale so that very large intermediate sums do not overflow.
// The represented sum is `sum * exp(log_scale)`.
struct AscendingSum {
  double sum = 0.0;
  double abs_sum = 0.0;
  double tail = 0.0;
  double log_scale = 0.0;
  std::size_t terms = 0;
  bool converged = false;
};

template <typename Acc>
AscendingSum ascending_1f1(double c, double b, double y, double arith_eps) {
  constexpr double kRescaleAt = 1e200;
  const double kRescaleLog = 200.0 * std::numbers::ln10;

  AscendingSum out;
  Acc sum{};
  Acc term{};
  if constexpr (std::is_same_v<Acc, double>) {
    sum = 1.0;
    term = 1.0;
  } else {
    sum = DoubleDouble{1.0, 0.0};
    term = DoubleDouble{1.0, 0.0};
  }
  auto hi = [](const Acc& v) {
    if constexpr (std::is_same_v<Acc, double>) {
      return v;
    } else {
      return v.hi;
    }
  };

  double abs_sum = 1.0;
  const double settle = c < 0.0 ? -c : 0.0;
  for (std::size_t k = 0; k < kTermBudget; ++k) {
    const double kd = static_cast<double>(k);
    if (c + kd == 0.0) {
      out.converged = true;  // terminating polynomial
      out.terms = k + 1;
      break;
    }
    const double ratio = (c + kd) * y / ((b + kd) * (kd + 1.0));
    if constexpr (std::is_same_v<Acc, double>) {
      term = term * ((c + kd) * y) / ((b + kd) * (kd + 1.0));
    } else {
      term = term * (c + kd) * y / (b + kd) / (kd + 1.0);
    }
    sum = sum + term;
    abs_sum += std::abs(hi(term));
    out.terms = k + 2;

    if (std::abs(hi(term)) > kRescaleAt) {
      term = term * (1.0 / kRescaleAt);
      sum = sum * (1.0 / kRescaleAt);
      abs_sum /= kRescaleAt;
      out.log_scale += kRescaleLog;
    }

    const double next = std::abs((c + kd + 1.0) * y / ((b + kd + 1.0) * (kd + 2.0)));
    if (kd + 1.0 > settle && next < 1.0 && std::abs(ratio) >= next) {
      const double tail = std::abs(hi(term)) * next / (1.0 - next);
      if (tail <= arith_eps * std::abs(hi(sum))) {
        out.tail = tail;
        out.converged = true;
        break;
      }
    }
  }
  out.sum = hi(sum);
  out.abs_sum = abs_sum;
  return out;
}

}  // namespace detail

/// Natural log of Gamma(x) for x > 0.
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw domain_error("log_gamma: argument must be positive and finite, got " + std::to_string(x));
  }
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::log(std::numbers::pi / detail::sin_pi(x)) - detail::lanczos_log_gamma(1.0 - x);
  }
  return detail::lanczos_log_gamma(x);
}

/// Gamma(x) for x > 0.
inline double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw domain_error("gamma_fn: argument must be positive and finite, got " + std::to_string(x));
  }
  if (x == std::floor(x) && x <= 171.0) {
    double f = 1.0;
    for (double k = 2.0; k < x; k += 1.0) f *= k;
    return f;
  }
  if (x < 0.5) return std::numbers::pi / (detail::sin_pi(x) * std::exp(detail::lanczos_log_gamma(1.0 - x)));
  return std::exp(detail::lanczos_log_gamma(x));
}

/// 1/Gamma(x) for any real x; zero at the poles.
inline double reciprocal_gamma(double x) {
  if (!std::isfinite(x)) throw domain_error("reciprocal_gamma: non-finite argument");
  if (detail::is_nonpositive_integer(x)) return 0.0;
  if (x >= 0.5) return std::exp(-detail::lanczos_log_gamma(x));
  // 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi
  return std::exp(detail::lanczos_log_gamma(1.0 - x)) * detail::sin_pi(x) / std::numbers::pi;
}

/// Gamma(a + 1/2) / Gamma(a) without forming either gamma value.
inline double gamma_ratio_half(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw domain_error("gamma_ratio_half: argument must be positive, got " + std::to_string(a));
  }
  if (a >= 40.0) {
    const double u = 1.0 / a;
    const double poly =
        1.0 + u * (-1.0 / 8 + u * (1.0 / 128 + u * (5.0 / 1024 + u * (-21.0 / 32768 +
                                                                       u * (-399.0 / 262144 + u * (869.0 / 4194304))))));
    return std::sqrt(a) * poly;
  }
  return std::exp(log_gamma(a + 0.5) - log_gamma(a));
}

/// Error function.
inline double erf_fn(double x) { return std::erf(x); }

/// Kummer's confluent hypergeometric function 1F1(a; b; x).
///
/// Negative arguments go through Kummer's transformation
/// 1F1(a;b;x) = e^x 1F1(b-a;b;-x) followed by the ascending series, summed in
/// double-double when the plain double sum is too ill-conditioned. For large
/// |x| the algebraic asymptotic expansion is used once the recessive
/// exponential part is below tolerance.
///
/// `converged` means the error estimate satisfies
/// err <= kTolerance * |value| + kAbsoluteFloor.
inline SpecFunResult kummer_1f1(double a, double b, double x) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(x)) {
    throw domain_error("kummer_1f1: non-finite argument");
  }
  if (detail::is_nonpositive_integer(b)) {
    throw domain_error("kummer_1f1: b must not be a non-positive integer, got " + std::to_string(b));
  }
  if (x == 0.0 || a == 0.0) return {1.0, true, 1};

  constexpr double kDoubleEps = 1.1102230246251565e-16;
  constexpr double kDdEps = 4.9303806576313238e-32;
  auto acceptable = [](double err, double value) {
    return err <= kTolerance * std::abs(value) + kAbsoluteFloor;
  };

  if (x > 0.0) {
    auto finish = [&](const detail::AscendingSum& s, double eps) {
      const double scale = std::exp(s.log_scale);
      const double value = s.sum * scale;
      const double err = (s.abs_sum * eps * std::sqrt(static_cast<double>(s.terms)) + s.tail) * scale;
      return std::pair{SpecFunResult{value, s.converged && std::isfinite(value), s.terms}, err};
    };
    auto [r, err] = finish(detail::ascending_1f1<double>(a, b, x, kDoubleEps), kDoubleEps);
    if (r.converged && acceptable(err, r.value)) return r;
    auto [rd, errd] = finish(detail::ascending_1f1<detail::DoubleDouble>(a, b, x, kDdEps), kDdEps);
    rd.converged = rd.converged && acceptable(errd, rd.value);
    return rd;
  }

  const double y = -x;
  const double c = b - a;

  // b - a = -n: e^-y times a degree-n polynomial. The forward recurrence in a
  // starting from a = b, b + 1 is stable for this family.
  if (detail::is_nonpositive_integer(c) && c > -1e6) {
    using detail::DoubleDouble;
    const auto n = static_cast<std::size_t>(-c);
    DoubleDouble prev{1.0, 0.0};                   // a = b
    DoubleDouble cur = detail::two_sum(1.0, -y / b);  // a = b + 1
    cur = cur + DoubleDouble{-std::fma(-y / b, b, y) / b, 0.0};
    int scale_steps = 0;
    if (n == 0) cur = prev;
    for (std::size_t k = 1; k < n; ++k) {
      const double ak = b + static_cast<double>(k);
      const DoubleDouble coef = detail::two_sum(2.0 * ak - b, -y);
      const DoubleDouble next = (coef * cur + prev * (b - ak)) / ak;
      prev = cur;
      cur = next;
      if (std::abs(cur.hi) > 1e200) {
        cur = cur * 1e-200;
        prev = prev * 1e-200;
        ++scale_steps;
      }
    }
    // value = p 1e200^scale_steps e^-y, applied in range-safe chunks.
    double value = cur.hi + cur.lo;
    double y_left = y;
    while (value != 0.0 && std::isfinite(value) && (y_left > 0.0 || scale_steps > 0)) {
      if ((std::abs(value) >= 1.0 || scale_steps == 0) && y_left > 0.0) {
        const double chunk = std::min(y_left, 600.0);
        value *= std::exp(-chunk);
        y_left -= chunk;
      } else {
        value *= 1e200;
        --scale_steps;
      }
      if (std::abs(value) < std::numeric_limits<double>::min() && y_left > 0.0) value = 0.0;
    }
    return {value, std::isfinite(value), n + 1};
  }

  // Large |x|: algebraic asymptotic expansion
  //   1F1(a;b;-y) ~ Gamma(b)/Gamma(b-a) y^-a sum_k (a)_k (a-b+1)_k / (k! y^k)
  // valid when the exponentially small companion term is negligible.
  if (y >= 30.0 && !detail::is_nonpositive_integer(c)) {
    double sum = 1.0;
    double term = 1.0;
    double previous = 1.0;
    bool ok = false;
    std::size_t k = 0;
    for (; k < 500; ++k) {
      const double kd = static_cast<double>(k);
      term *= (a + kd) * (a - b + 1.0 + kd) / ((kd + 1.0) * y);
      if (std::abs(term) > std::abs(previous) && k > 0) break;  // diverging
      sum += term;
      previous = term;
      if (std::abs(term) <= 0.1 * kTolerance * std::abs(sum)) {
        ok = true;
        break;
      }
    }
    if (ok) {
      const double lead = std::exp(log_gamma(b) - a * std::log(y)) * reciprocal_gamma(c);
      const double value = lead * sum;
      const double truncation = std::abs(lead * term);
      const double recessive = std::exp(log_gamma(b) - log_gamma(a) - y + (a - b) * std::log(y));
      if (acceptable(truncation + recessive, value)) return {value, true, k + 2};
    }
  }

  auto finish = [&](const detail::AscendingSum& s, double eps) {
    const double scale = std::exp(s.log_scale - y);
    const double value = s.sum * scale;
    const double err = (s.abs_sum * eps * std::sqrt(static_cast<double>(s.terms)) + s.tail) * scale +
                       std::abs(value) * kDoubleEps * 4.0;
    return std::pair{SpecFunResult{value, s.converged, s.terms}, err};
  };
  auto [r, err] = finish(detail::ascending_1f1<double>(c, b, y, kDoubleEps), kDoubleEps);
  if (r.converged && acceptable(err, r.value)) return r;
  auto [rd, errd] = finish(detail::ascending_1f1<detail::DoubleDouble>(c, b, y, kDdEps), kDdEps);
  rd.converged = rd.converged && acceptable(errd, rd.value);
  return rd;
}

/// Gauss hypergeometric 2F1(a, b; c; z) by its power series, |z| < 1.
inline SpecFunResult gauss_2f1(double a, double b, double c, double z) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(z)) {
    throw domain_error("gauss_2f1: non-finite argument");
  }
  if (!(std::abs(z) < 1.0)) throw domain_error("gauss_2f1: requires |z| < 1, got z = " + std::to_string(z));
  if (detail::is_nonpositive_integer(c)) {
    throw domain_error("gauss_2f1: c must not be a non-positive integer, got " + std::to_string(c));
  }
  if (z == 0.0) return {1.0, true, 1};

  // Summed in double-double: for z near -1 the terms can exceed the result by
  // several orders of magnitude.
  using detail::DoubleDouble;
  DoubleDouble sum{1.0, 0.0};
  DoubleDouble term{1.0, 0.0};
  for (std::size_t k = 0; k < kTermBudget; ++k) {
    const double kd = static_cast<double>(k);
    if (a + kd == 0.0 || b + kd == 0.0) return {sum.hi + sum.lo, true, k + 1};
    term = term * detail::two_sum(a, kd) * detail::two_sum(b, kd) / (detail::two_sum(c, kd) * (kd + 1.0)) * z;
    sum = sum + term;
    // Term ratios tend to |z|; while still below it they are increasing, so
    // |z| bounds the remainder.
    const double next = std::max(
        std::abs((a + kd + 1.0) * (b + kd + 1.0) / ((c + kd + 1.0) * (kd + 2.0)) * z), std::abs(z));
    if (next < 1.0 && std::abs(term.hi) * next / (1.0 - next) <= 1e-17 * std::abs(sum.hi)) {
      return {sum.hi + sum.lo, true, k + 2};
    }
  }
  return {sum.hi + sum.lo, false, kTermBudget};
}

namespace detail {

// Continued fraction of the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (std::size_t m = 1; m <= kTermBudget; ++m) {
    const double md = static_cast<double>(m);
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= 1e-16) return h;
  }
  throw numerical_error("incomplete_beta: continued fraction did not converge (x=" + std::to_string(x) +
                        ", a=" + std::to_string(a) + ", b=" + std::to_string(b) + ")");
}

}  // namespace detail

/// Complete beta function B(a, b).
inline double beta_fn(double a, double b) { return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b)); }

/// Non-regularized incomplete beta B(z; a, b) = int_0^z t^(a-1) (1-t)^(b-1) dt.
inline double incomplete_beta(double z, double a, double b) {
  if (!(z >= 0.0 && z <= 1.0) || !(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw domain_error("incomplete_beta: requires 0 <= z <= 1, a > 0, b > 0");
  }
  if (z == 0.0) return 0.0;
  if (z == 1.0) return beta_fn(a, b);
  const double front = std::exp(a * std::log(z) + b * std::log1p(-z));
  if (z < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(z, a, b) / a;
  return beta_fn(a, b) - front * detail::beta_continued_fraction(1.0 - z, b, a) / b;
}

}  // namespace egc::specfun
