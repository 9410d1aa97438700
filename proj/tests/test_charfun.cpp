#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "egc/analytic.hpp"
#include "egc/charfun.hpp"
#include "egc/quadrature.hpp"

namespace cf = egc::charfun;

TEST(BranchCf, UnitAtOrigin) {
  const auto v = cf::branch_cf(0.0, 2.0, 7.0);
  EXPECT_EQ(v.real(), 1.0);
  EXPECT_EQ(v.imag(), 0.0);
}

TEST(BranchCf, RayleighValues) {
  const auto v = cf::branch_cf(2.0, 1.0, 1.0);
  EXPECT_NEAR(v.imag(), std::sqrt(std::numbers::pi) / std::exp(1.0), 1e-15);
  EXPECT_NEAR(v.imag(), 0.652049, 1e-6);
  // 1F1(1; 1/2; -1), arbitrary-precision reference
  EXPECT_NEAR(v.real(), -0.076159013825536838, 1e-15);
}

TEST(BranchCf, LargeShapeValues) {
  // Arbitrary-precision references in the range where the real part's 1F1
  // series gives out.
  auto v = cf::branch_cf(3.33, 4.2, 90.0);
  EXPECT_NEAR(v.real(), 0.00030148359147050676378, 1e-13);
  EXPECT_NEAR(v.imag(), 0.0029719135253688997083, 1e-13);
  v = cf::branch_cf(1.0, 4.2, 400.0);
  EXPECT_NEAR(v.real(), -0.58667488176353667229, 1e-13);
  EXPECT_NEAR(v.imag(), -0.076585141295692434953, 1e-13);
}

TEST(BranchCf, RejectsBadParameters) {
  EXPECT_THROW(cf::branch_cf(1.0, 0.0, 1.0), egc::domain_error);
  EXPECT_THROW(cf::branch_cf(1.0, 1.0, -2.0), egc::domain_error);
  EXPECT_THROW(cf::branch_cf(std::nan(""), 1.0, 1.0), egc::domain_error);
}

TEST(SystemCfs, SingleBranchIsTheBranchCf) {
  egc::SystemConfig c;
  c.omega_s = 2.5;
  const auto cfs = cf::system_cfs(c);
  for (double w : {0.1, 0.7, 3.0, 11.0}) {
    const auto a = cfs.phi_x(w);
    const auto b = cf::branch_cf(w, 2.5, 1.0);
    EXPECT_EQ(a, b);
  }
}

TEST(SystemCfs, InterferenceShapeFollowsScenario) {
  egc::SystemConfig c;
  c.m_branches = 3;
  c.n_interferers = 5;
  c.omega_i = 0.4;
  c.scenario = egc::Scenario::Incoherent;
  auto cfs = cf::system_cfs(c);
  EXPECT_EQ(cfs.phi_y.alpha(), 15.0);
  EXPECT_EQ(cfs.phi_y.omega_avg(), 0.4);
  c.scenario = egc::Scenario::Coherent;
  cfs = cf::system_cfs(c);
  EXPECT_EQ(cfs.phi_y.alpha(), 5.0);
  EXPECT_NEAR(cfs.phi_y.omega_avg(), 1.2, 1e-15);
  EXPECT_EQ(cfs.phi_x.m(), 3);
}

TEST(IntegerPower, PolarAgreesWithRepeatedProduct) {
  const std::complex<double> z(0.3, -0.8);
  std::complex<double> r = 1.0;
  for (int k = 0; k < 11; ++k) r *= z;
  const auto p = cf::integer_power(z, 11);
  EXPECT_NEAR(std::abs(p - r), 0.0, 1e-14);
  EXPECT_EQ(cf::integer_power(z, 1), z);
  EXPECT_THROW(cf::integer_power(z, 0), egc::domain_error);
}

TEST(CfProperty, MagnitudeBoundedAndHermitian) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uw(-40.0, 40.0);
  std::uniform_real_distribution<double> uo(0.1, 5.0);
  for (int m : {1, 2, 3, 5, 9}) {
    for (int n : {1, 2, 5, 10}) {
      for (auto sc : {egc::Scenario::Incoherent, egc::Scenario::Coherent}) {
        egc::SystemConfig c;
        c.m_branches = m;
        c.n_interferers = n;
        c.omega_s = uo(rng);
        c.omega_i = uo(rng);
        c.scenario = sc;
        const auto cfs = cf::system_cfs(c);
        for (int i = 0; i < 20; ++i) {
          const double w = uw(rng);
          const auto x = cfs.phi_x(w);
          const auto y = cfs.phi_y(w);
          EXPECT_LE(std::abs(x), 1.0 + 1e-12);
          EXPECT_LE(std::abs(y), 1.0 + 1e-12);
          EXPECT_LE(std::abs(cfs.phi_x(-w) - std::conj(x)), 1e-12);
          EXPECT_LE(std::abs(cfs.phi_y(-w) - std::conj(y)), 1e-12);
        }
      }
    }
  }
}

TEST(CfProperty, RayleighImaginaryPart) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> uw(0.0, 12.0);
  std::uniform_real_distribution<double> uo(0.05, 4.0);
  for (int i = 0; i < 500; ++i) {
    const double w = uw(rng), o = uo(rng);
    const double expected = w * std::sqrt(std::numbers::pi * o) / 2.0 * std::exp(-w * w * o / 4.0);
    EXPECT_NEAR(cf::branch_cf(w, o, 1.0).imag(), expected, 1e-12);
  }
}

TEST(CfProperty, InversionRecoversDualBranchDensity) {
  const double omega_s = 1.7;
  egc::SystemConfig c;
  c.m_branches = 2;
  c.omega_s = omega_s;
  const auto cfs = cf::system_cfs(c);
  egc::quadrature::QuadratureSpec spec{1e-10, 1e-10};
  spec.tail_panel_width = std::numbers::pi / std::sqrt(omega_s);
  for (double k : {0.5, 1.0, 2.0}) {
    const double x = k * std::sqrt(omega_s);
    const auto r = egc::quadrature::adaptive_semi_infinite(
        [&](double w) { return (cfs.phi_x(w) * std::polar(1.0, -w * x)).real(); }, spec);
    EXPECT_NEAR(r.value / std::numbers::pi, egc::analytic::desired_envelope_pdf_m2(x, omega_s), 1e-6) << k;
  }
}
