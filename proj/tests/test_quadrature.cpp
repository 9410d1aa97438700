#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "egc/charfun.hpp"
#include "egc/errors.hpp"
#include "egc/quadrature.hpp"

namespace q = egc::quadrature;

namespace {

const double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(std::numbers::pi);

}  // namespace

TEST(GkPanel, PolynomialIsExact) {
  const auto r = q::gk_panel([](double x) { return x * x; }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 1.0 / 3.0, 1e-16);
  EXPECT_LT(r.error_estimate, 1e-15);
}

TEST(GkPanel, Constant) {
  const auto r = q::gk_panel([](double) { return 5.0; }, 2.0, 4.0);
  EXPECT_NEAR(r.value, 10.0, 1e-14);
}

TEST(GkPanel, GaussianCosineOnFiniteRange) {
  // A single 15-point rule on [0, 8] is not good to 1e-10; the adaptive driver
  // built on it is.
  const double exact = 0.5 * kSqrtPi * std::exp(-0.25);
  auto f = [](double w) { return std::exp(-w * w) * std::cos(w); };
  const auto single = q::gk_panel(f, 0.0, 8.0);
  EXPECT_NEAR(single.value, exact, 1e-3);
  EXPECT_GE(single.error_estimate, std::abs(single.value - exact));
  const auto r = q::adaptive_finite(f, 0.0, 8.0, {1e-13, 1e-13});
  EXPECT_NEAR(r.value, exact, 1e-10);
}

TEST(GkPanel, RejectsEmptyInterval) {
  EXPECT_THROW(q::gk_panel([](double x) { return x; }, 1.0, 1.0), egc::domain_error);
  EXPECT_THROW(q::gk_panel([](double x) { return x; }, 2.0, 1.0), egc::domain_error);
}

TEST(GkPanel, NonFiniteIntegrandIsAnError) {
  EXPECT_THROW(q::gk_panel([](double x) { return 1.0 / (x - 0.5); }, 0.0, 1.0), egc::numerical_error);
  EXPECT_THROW(q::adaptive_semi_infinite([](double) { return std::nan(""); }), egc::numerical_error);
}

TEST(SemiInfinite, Exponential) {
  const auto r = q::adaptive_semi_infinite([](double w) { return std::exp(-w); });
  EXPECT_NEAR(r.value, 1.0, 1e-9);
  EXPECT_GE(r.evaluations, 15u);
}

TEST(SemiInfinite, GaussianCosine) {
  const auto r = q::adaptive_semi_infinite([](double w) { return std::exp(-w * w) * std::cos(5.0 * w); });
  EXPECT_NEAR(r.value, 0.5 * kSqrtPi * std::exp(-6.25), 1e-11);
  EXPECT_NEAR(r.value, 1.71e-3, 1e-5);
}

TEST(SemiInfinite, CfProductForDualBranch) {
  // Re{Phi_X(w) Phi_Y*(w)} for M = 2, alpha = 2 (one interferer, incoherent), z = 1.
  const auto cfs = egc::charfun::normalized_cfs(2, 2.0);
  q::QuadratureSpec spec;
  spec.tail_panel_width = 2.0 * kPi / std::sqrt(2.0);
  const auto r = q::adaptive_semi_infinite(
      [&](double w) { return (cfs.phi_x(w) * std::conj(cfs.phi_y(w))).real(); }, spec);
  EXPECT_NEAR(r.value, 1.3853823563366943, 1e-9);
}

TEST(SemiInfinite, LowerBoundAndMinExtent) {
  q::QuadratureSpec spec;
  spec.tail_panel_width = 1.0;
  spec.min_extent = 30.0;
  // Negligible until x ~ 20; without min_extent the stop rule would fire at once.
  const auto r = q::adaptive_semi_infinite([](double x) { return std::exp(-(x - 20.0) * (x - 20.0)); }, spec);
  EXPECT_NEAR(r.value, kSqrtPi, 1e-9);
  const auto shifted = q::adaptive_semi_infinite([](double x) { return std::exp(-x); }, {}, 2.0);
  EXPECT_NEAR(shifted.value, std::exp(-2.0), 1e-10);
}

TEST(Budget, ExhaustionReportsPartialValue) {
  q::QuadratureSpec spec;
  spec.max_subdivisions = 3;
  spec.abs_tol = 1e-14;
  spec.rel_tol = 1e-14;
  try {
    (void)q::adaptive_finite([](double x) { return std::sin(1.0 / x); }, 1e-3, 1.0, spec);
    FAIL() << "expected budget_exceeded";
  } catch (const egc::budget_exceeded& e) {
    EXPECT_TRUE(std::isfinite(e.partial_value()));
    EXPECT_GT(e.error_estimate(), 0.0);
  }
}

TEST(Spec, Validation) {
  EXPECT_THROW(q::adaptive_finite([](double x) { return x; }, 0, 1, {0.0, 1e-9}), egc::domain_error);
  EXPECT_THROW(q::adaptive_finite([](double x) { return x; }, 0, 1, {1e-9, -1.0}), egc::domain_error);
  q::QuadratureSpec bad;
  bad.max_subdivisions = 0;
  EXPECT_THROW(bad.validate(), egc::domain_error);
  bad = {};
  bad.tail_panel_width = 0.0;
  EXPECT_THROW(bad.validate(), egc::domain_error);
}

TEST(Finite, ReversedAndEmpty) {
  auto f = [](double x) { return std::cos(x); };
  EXPECT_NEAR(q::adaptive_finite(f, 1.0, 0.0).value, -std::sin(1.0), 1e-12);
  const auto e = q::adaptive_finite(f, 1.0, 1.0);
  EXPECT_EQ(e.value, 0.0);
  EXPECT_EQ(e.evaluations, 0u);
}

namespace {

struct ClosedCase {
  std::function<double(double)> f;
  double a;
  double b;  // inf for semi-infinite
  double exact;
};

q::QuadratureResult integrate(const ClosedCase& c, const q::QuadratureSpec& spec) {
  if (std::isinf(c.b)) return q::adaptive_semi_infinite(c.f, spec, c.a);
  return q::adaptive_finite(c.f, c.a, c.b, spec);
}

std::vector<ClosedCase> random_cases(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> ua(0.3, 3.0);
  std::uniform_real_distribution<double> ub(0.0, 8.0);
  std::uniform_real_distribution<double> ux(0.5, 6.0);
  std::vector<ClosedCase> cases;
  for (int i = 0; i < count; ++i) {
    const double a = ua(rng), b = ub(rng), x = ux(rng);
    switch (i % 4) {
      case 0:  // int_0^inf e^{-a w} cos(b w)
        cases.push_back({[=](double w) { return std::exp(-a * w) * std::cos(b * w); }, 0.0,
                         std::numeric_limits<double>::infinity(), a / (a * a + b * b)});
        break;
      case 1:  // int_0^inf e^{-a w^2} cos(b w)
        cases.push_back({[=](double w) { return std::exp(-a * w * w) * std::cos(b * w); }, 0.0,
                         std::numeric_limits<double>::infinity(),
                         0.5 * std::sqrt(kPi / a) * std::exp(-b * b / (4.0 * a))});
        break;
      case 2:  // int_0^x sin(b t) dt
        cases.push_back({[=](double t) { return std::sin(b * t); }, 0.0, x,
                         b == 0.0 ? 0.0 : (1.0 - std::cos(b * x)) / b});
        break;
      default:  // int_0^x t^a dt
        cases.push_back({[=](double t) { return std::pow(t, a); }, 0.0, x, std::pow(x, a + 1.0) / (a + 1.0)});
        break;
    }
  }
  return cases;
}

}  // namespace

TEST(QuadratureProperty, ErrorEstimateBoundsTrueError) {
  std::mt19937_64 rng(11);
  const auto cases = random_cases(rng, 400);
  int bounded = 0;
  for (const auto& c : cases) {
    const auto r = integrate(c, q::QuadratureSpec{1e-6, 1e-6});
    // A result exact to rounding counts as bounded.
    if (std::abs(r.value - c.exact) <= r.error_estimate + 1e-15 * (1.0 + std::abs(c.exact))) ++bounded;
  }
  EXPECT_GE(bounded, static_cast<int>(0.99 * cases.size()));
}

TEST(QuadratureProperty, TighterToleranceNeverWorse) {
  std::mt19937_64 rng(12);
  const auto cases = random_cases(rng, 60);
  for (const auto& c : cases) {
    double previous = std::numeric_limits<double>::infinity();
    for (double tol = 1e-3; tol >= 1e-11; tol *= 0.5) {
      const double err = std::abs(integrate(c, q::QuadratureSpec{tol, 1e-14}).value - c.exact);
      // Results already far inside tolerance may wobble by a sliver of it.
      EXPECT_LE(err, std::max(previous, 1e-11) + 0.01 * tol) << "tol " << tol << " exact " << c.exact;
      previous = err;
    }
  }
}

TEST(QuadratureProperty, EvaluationCountIsFifteenPerPanel) {
  std::mt19937_64 rng(13);
  const auto cases = random_cases(rng, 40);
  for (const auto& c : cases) {
    std::size_t calls = 0;
    ClosedCase counted = c;
    counted.f = [&calls, f = c.f](double x) {
      ++calls;
      return f(x);
    };
    const auto r = integrate(counted, {});
    EXPECT_EQ(r.evaluations, calls);
    EXPECT_EQ(r.evaluations % 15, 0u);
    EXPECT_GE(r.error_estimate, 0.0);
  }
}
