#pragma once

// Adaptive Gauss-Kronrod (G7/K15) quadrature on finite intervals and on
// [lower, inf) by appending fixed-width tail panels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <vector>

#include "egc/errors.hpp"

namespace egc::quadrature {

struct QuadratureSpec {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  std::size_t max_subdivisions = 2000;
  double tail_panel_width = 2.0 * std::numbers::pi;
  double tail_stop_threshold = 1e-13;
  /// The tail stop rule is only armed once the integrated range reaches this
  /// abscissa. Needed for integrands that are negligible near the origin.
  double min_extent = 0.0;
  /// Hard cap on appended tail panels.
  std::size_t max_tail_panels = 1'000'000;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw domain_error("QuadratureSpec: tolerances must be positive");
    if (max_subdivisions < 1) throw domain_error("QuadratureSpec: max_subdivisions must be >= 1");
    if (!(tail_panel_width > 0.0)) throw domain_error("QuadratureSpec: tail_panel_width must be positive");
    if (!(tail_stop_threshold >= 0.0)) throw domain_error("QuadratureSpec: tail_stop_threshold must be >= 0");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  std::size_t subdivisions = 0;
};

struct PanelEstimate {
  double value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

// Kronrod abscissae (positive half, descending); every odd index is also a
// 7-point Gauss node.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
};

inline bool by_error(const Panel& lhs, const Panel& rhs) { return lhs.error < rhs.error; }

// Neumaier-compensated sum of panel values.
inline double sum_values(const std::vector<Panel>& panels) {
  double s = 0.0, c = 0.0;
  for (const auto& p : panels) {
    const double t = s + p.value;
    c += std::abs(s) >= std::abs(p.value) ? (s - t) + p.value : (p.value - t) + s;
    s = t;
  }
  return s + c;
}

inline double sum_errors(const std::vector<Panel>& panels) {
  double s = 0.0;
  for (const auto& p : panels) s += p.error;
  return s;
}

template <typename F>
double checked_call(F& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "quadrature: non-finite integrand value " << v << " at x = " << x;
    throw numerical_error(os.str());
  }
  return v;
}

}  // namespace detail

/// One 7-point Gauss / 15-point Kronrod panel on [a, b]. The error estimate is
/// |K15 - G7|.
template <typename F>
PanelEstimate gk_panel(F&& f, double a, double b) {
  if (!(a < b)) throw domain_error("gk_panel: requires a < b");
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = detail::checked_call(f, center);
  double kronrod = fc * detail::kWgk[7];
  double gauss = fc * detail::kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * detail::kXgk[j];
    const double f1 = detail::checked_call(f, center - dx);
    const double f2 = detail::checked_call(f, center + dx);
    kronrod += detail::kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += detail::kWg[j / 2] * (f1 + f2);
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

namespace detail {

template <typename F>
Panel make_panel(F& f, double a, double b) {
  const auto est = gk_panel(f, a, b);
  return {a, b, est.value, est.error_estimate};
}

// Bisect the worst panel until the global error meets tolerance.
template <typename F>
void refine(F& f, std::vector<Panel>& heap, double& total_value, double& total_error, const QuadratureSpec& spec,
            QuadratureResult& out) {
  while (total_error > std::max(spec.abs_tol, spec.rel_tol * std::abs(total_value))) {
    if (out.subdivisions >= spec.max_subdivisions) {
      std::ostringstream os;
      os << "quadrature: subdivision budget (" << spec.max_subdivisions << ") exhausted with error estimate "
         << total_error;
      throw budget_exceeded(os.str(), sum_values(heap), total_error);
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = make_panel(f, worst.a, mid);
    const Panel right = make_panel(f, mid, worst.b);
    out.evaluations += 30;
    ++out.subdivisions;
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
}

}  // namespace detail

/// Adaptive integral over [a, b], bisecting the worst panel first.
template <typename F>
QuadratureResult adaptive_finite(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (a == b) return {};
  if (a > b) {
    auto r = adaptive_finite(f, b, a, spec);
    r.value = -r.value;
    return r;
  }
  QuadratureResult out;
  std::vector<detail::Panel> heap{detail::make_panel(f, a, b)};
  out.evaluations = 15;
  double total_value = heap.front().value;
  double total_error = heap.front().error;
  detail::refine(f, heap, total_value, total_error, spec, out);
  out.value = detail::sum_values(heap);
  out.error_estimate = detail::sum_errors(heap);
  return out;
}

/// Adaptive integral over [lower, inf). Tail panels of width
/// spec.tail_panel_width are appended (and the global panel set refined after
/// each) until two consecutive fresh panels contribute less than
/// spec.tail_stop_threshold.
template <typename F>
QuadratureResult adaptive_semi_infinite(F&& f, const QuadratureSpec& spec = {}, double lower = 0.0) {
  spec.validate();
  QuadratureResult out;
  std::vector<detail::Panel> heap;
  double total_value = 0.0;
  double total_error = 0.0;
  double left = lower;
  int negligible = 0;
  for (std::size_t n = 0;; ++n) {
    if (n >= spec.max_tail_panels) {
      throw budget_exceeded("quadrature: tail panel cap reached before the integrand became negligible",
                            detail::sum_values(heap), detail::sum_errors(heap));
    }
    const double right = lower + static_cast<double>(n + 1) * spec.tail_panel_width;
    const detail::Panel fresh = detail::make_panel(f, left, right);
    out.evaluations += 15;
    total_value += fresh.value;
    total_error += fresh.error;
    heap.push_back(fresh);
    std::push_heap(heap.begin(), heap.end(), detail::by_error);
    detail::refine(f, heap, total_value, total_error, spec, out);
    left = right;

    const bool small = std::abs(fresh.value) < spec.tail_stop_threshold && fresh.error < spec.tail_stop_threshold;
    negligible = small ? negligible + 1 : 0;
    if (negligible >= 2 && left >= spec.min_extent) break;
  }
  out.value = detail::sum_values(heap);
  out.error_estimate = detail::sum_errors(heap);
  return out;
}

}  // namespace egc::quadrature
