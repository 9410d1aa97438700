#pragma once

// Monte Carlo path: sum-of-sinusoids Clarke fading per (signal, branch),
// EGC output SIR traces under both interference combining rules, and
// empirical OP / LCR / AFD counters.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "egc/analytic.hpp"
#include "egc/errors.hpp"
#include "egc/system.hpp"

namespace egc::simulator {

struct SimParams {
  /// Samples per second. Zero selects 64 f_m0.
  double sample_rate = 0.0;
  /// Seconds. Zero selects 5000 / f_m0.
  double duration = 0.0;
  int n_sinusoids = 256;
  std::uint64_t seed = 1;
  int trials = 1;

  /// Copy with the zero defaults filled in from the configuration.
  SimParams resolved(const SystemConfig& cfg) const {
    SimParams p = *this;
    if (p.sample_rate == 0.0) p.sample_rate = 64.0 * cfg.f_m0;
    if (p.duration == 0.0 && cfg.f_m0 > 0.0) p.duration = 5000.0 / cfg.f_m0;
    return p;
  }

  void validate() const {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw domain_error("SimParams: sample rate must be positive");
    if (!(duration > 0.0) || !std::isfinite(duration)) throw domain_error("SimParams: duration must be positive");
    if (n_sinusoids < 1) throw domain_error("SimParams: n_sinusoids must be >= 1");
    if (trials < 1) throw domain_error("SimParams: trials must be >= 1");
    if (duration * sample_rate < 2.0) throw domain_error("SimParams: fewer than two samples");
  }

  std::size_t samples() const { return static_cast<std::size_t>(std::floor(duration * sample_rate)); }
  double dt() const { return 1.0 / sample_rate; }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based split: a fixed function of (seed, trial, signal, branch).
inline std::uint64_t stream_seed(std::uint64_t seed, int trial, int signal, int branch) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(trial));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(signal) << 20));
  return splitmix64(h ^ (static_cast<std::uint64_t>(branch) << 40));
}

inline std::uint64_t stream_id(int trial, int signal, int branch) {
  return (static_cast<std::uint64_t>(trial) << 40) | (static_cast<std::uint64_t>(signal) << 20) |
         static_cast<std::uint64_t>(branch);
}

}  // namespace detail

/// Sum of n_sinusoids unit phasors with random arrival angles and phases,
/// scaled to average power omega_avg. The rotation recurrence is re-seeded
/// from the exact phase every kResync samples.
inline std::vector<std::complex<double>> generate_clarke_process(double omega_avg, double f_max, const SimParams& sim,
                                                                 std::uint64_t stream_id) {
  if (!(omega_avg > 0.0) || !std::isfinite(omega_avg)) throw domain_error("clarke: Omega must be positive");
  if (!(f_max > 0.0) || !std::isfinite(f_max)) throw domain_error("clarke: f_max must be positive");
  sim.validate();
  constexpr std::size_t kResync = 1024;
  const auto k = static_cast<std::size_t>(sim.n_sinusoids);
  const std::size_t n = sim.samples();
  const double dt = sim.dt();

  std::mt19937_64 rng(detail::splitmix64(sim.seed ^ detail::splitmix64(stream_id)));
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<double> freq(k), phase(k);
  for (std::size_t j = 0; j < k; ++j) {
    freq[j] = 2.0 * std::numbers::pi * f_max * std::cos(uniform(rng));
    phase[j] = uniform(rng);
  }

  std::vector<double> re(k), im(k), rot_re(k), rot_im(k);
  for (std::size_t j = 0; j < k; ++j) {
    rot_re[j] = std::cos(freq[j] * dt);
    rot_im[j] = std::sin(freq[j] * dt);
  }
  const double scale = std::sqrt(omega_avg / static_cast<double>(k));
  std::vector<std::complex<double>> out(n);
  for (std::size_t start = 0; start < n; start += kResync) {
    const double t0 = static_cast<double>(start) * dt;
    for (std::size_t j = 0; j < k; ++j) {
      const double arg = std::fmod(freq[j] * t0, 2.0 * std::numbers::pi) + phase[j];
      re[j] = std::cos(arg);
      im[j] = std::sin(arg);
    }
    const std::size_t stop = std::min(n, start + kResync);
    for (std::size_t s = start; s < stop; ++s) {
      double sr = 0.0, si = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        sr += re[j];
        si += im[j];
        const double nr = re[j] * rot_re[j] - im[j] * rot_im[j];
        im[j] = re[j] * rot_im[j] + im[j] * rot_re[j];
        re[j] = nr;
      }
      out[s] = {scale * sr, scale * si};
    }
  }
  return out;
}

struct FadingTrace {
  std::vector<double> sir;
  double dt = 0.0;
  SystemConfig config;
  std::uint64_t seed = 0;
  int trial = 0;
  /// Samples dropped because the interference power was exactly zero.
  std::size_t excluded = 0;

  double duration() const { return dt * static_cast<double>(sir.size()); }
};

/// Z(t) = (sum_k |W_0k|)^2 over sum_i sum_k |W_ik|^2 (incoherent) or
/// sum_i |sum_k W_ik|^2 (coherent).
inline FadingTrace egc_sir_trace(const SystemConfig& cfg, const SimParams& sim_in, int trial = 0) {
  cfg.validate();
  const SimParams sim = sim_in.resolved(cfg);
  sim.validate();
  const double f_top = std::max(cfg.f_m0, cfg.f_mi);
  if (sim.sample_rate < 16.0 * f_top) throw domain_error("SimParams: sample rate must be >= 16 max(f_m0, f_mi)");
  if (trial < 0 || trial >= sim.trials) throw domain_error("egc_sir_trace: trial index out of range");
  const std::size_t n = sim.samples();
  const int m = cfg.m_branches;

  std::vector<double> numerator(n, 0.0), denominator(n, 0.0);
  for (int k = 0; k < m; ++k) {
    const auto w = generate_clarke_process(cfg.omega_s, cfg.f_m0, sim, detail::stream_id(trial, 0, k));
    for (std::size_t s = 0; s < n; ++s) numerator[s] += std::abs(w[s]);
  }
  std::vector<std::complex<double>> branch_sum;
  for (int i = 1; i <= cfg.n_interferers; ++i) {
    if (cfg.scenario == Scenario::Coherent) branch_sum.assign(n, {0.0, 0.0});
    for (int k = 0; k < m; ++k) {
      const auto w = generate_clarke_process(cfg.omega_i, cfg.f_mi, sim, detail::stream_id(trial, i, k));
      if (cfg.scenario == Scenario::Coherent) {
        for (std::size_t s = 0; s < n; ++s) branch_sum[s] += w[s];
      } else {
        for (std::size_t s = 0; s < n; ++s) denominator[s] += std::norm(w[s]);
      }
    }
    if (cfg.scenario == Scenario::Coherent)
      for (std::size_t s = 0; s < n; ++s) denominator[s] += std::norm(branch_sum[s]);
  }

  FadingTrace trace;
  trace.dt = sim.dt();
  trace.config = cfg;
  trace.seed = sim.seed;
  trace.trial = trial;
  trace.sir.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (denominator[s] == 0.0) {
      ++trace.excluded;
      continue;
    }
    trace.sir.push_back(numerator[s] * numerator[s] / denominator[s]);
  }
  return trace;
}

struct EmpiricalStats {
  double op = 0.0;
  /// Downward crossings per second.
  double lcr = 0.0;
  /// Seconds; meaningful only when afd_defined.
  double afd = 0.0;
  bool afd_defined = false;
  std::size_t down_crossings = 0;
  std::size_t up_crossings = 0;
  std::size_t samples = 0;
};

/// Counts over samples [first, last) of a trace with sample interval dt.
inline EmpiricalStats empirical_stats(const std::vector<double>& sir, double dt, double z, std::size_t first = 0,
                                      std::size_t last = std::numeric_limits<std::size_t>::max()) {
  if (!(z > 0.0) || !std::isfinite(z)) throw domain_error("empirical_stats: threshold must be positive");
  if (!(dt > 0.0)) throw domain_error("empirical_stats: dt must be positive");
  last = std::min(last, sir.size());
  if (first >= last) throw domain_error("empirical_stats: empty trace");
  EmpiricalStats st;
  st.samples = last - first;
  std::size_t below = 0;
  for (std::size_t s = first; s < last; ++s) {
    if (sir[s] < z) ++below;
    if (s + 1 < last) {
      if (sir[s] >= z && sir[s + 1] < z) ++st.down_crossings;
      if (sir[s] < z && sir[s + 1] >= z) ++st.up_crossings;
    }
  }
  const double duration = dt * static_cast<double>(st.samples);
  st.op = static_cast<double>(below) / static_cast<double>(st.samples);
  st.lcr = static_cast<double>(st.down_crossings) / duration;
  if (st.down_crossings > 0) {
    st.afd = st.op * duration / static_cast<double>(st.down_crossings);
    st.afd_defined = true;
  }
  return st;
}

inline EmpiricalStats empirical_stats(const FadingTrace& trace, double z) {
  return empirical_stats(trace.sir, trace.dt, z);
}

struct ValidationTolerances {
  /// OP must lie within this many standard errors of the analytic value.
  double op_sigmas = 3.0;
  /// OP is compared only where the analytic value is at least this.
  double op_floor = 1e-3;
  /// Relative tolerance for the normalized LCR and AFD.
  double rate_rel_tol = 0.05;
  /// Batches per trial for the batch-means standard error.
  int batches_per_trial = 10;
};

struct ValidationRow {
  double z = 0.0;
  double nsirth_db = 0.0;
  double op_analytic = 0.0, lcr_analytic = 0.0, afd_analytic = 0.0;
  double op_empirical = 0.0, lcr_empirical = 0.0, afd_empirical = 0.0;
  double op_se = 0.0, lcr_se = 0.0;
  double lcr_rel_err = 0.0, afd_rel_err = 0.0;
  std::size_t crossings = 0;
  /// Analytic OP below 10 / total samples: too rare to measure.
  bool rare_event = false;
  bool op_checked = false, op_pass = true;
  bool rate_pass = true;
};

struct ValidationReport {
  SystemConfig config;
  SimParams sim;
  std::size_t total_samples = 0;
  std::size_t excluded_samples = 0;
  std::vector<ValidationRow> rows;

  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.op_pass || !r.rate_pass) return false;
    return true;
  }
};

namespace detail {

inline double mean_and_se(const std::vector<double>& v, double& se) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double k = static_cast<double>(v.size());
  se = v.size() > 1 ? std::sqrt(ss / (k - 1.0) / k) : std::numeric_limits<double>::infinity();
  return mean;
}

}  // namespace detail

/// Simulates sim.trials traces and compares empirical statistics on the
/// threshold grid with the analytic values from the chosen method. Standard
/// errors come from equal-length batches across all trials.
inline ValidationReport validate_against_analytic(const SystemConfig& cfg, const std::vector<double>& grid,
                                                  const SimParams& sim_in, Method method = Method::Quadrature,
                                                  const ValidationTolerances& tol = {}) {
  cfg.validate();
  if (!(cfg.f_m0 > 0.0)) throw domain_error("validate: f_m0 must be positive");
  const SimParams sim = sim_in.resolved(cfg);
  sim.validate();
  if (tol.batches_per_trial < 2) throw domain_error("validate: need at least two batches per trial");
  for (double z : grid)
    if (!(z > 0.0) || !std::isfinite(z)) throw domain_error("validate: thresholds must be positive");

  ValidationReport report;
  report.config = cfg;
  report.sim = sim;
  std::vector<FadingTrace> traces;
  for (int t = 0; t < sim.trials; ++t) {
    traces.push_back(egc_sir_trace(cfg, sim, t));
    report.total_samples += traces.back().sir.size();
    report.excluded_samples += traces.back().excluded;
  }

  for (double z : grid) {
    ValidationRow row;
    row.z = z;
    row.nsirth_db = nsirth_db(cfg.gamma(), z);
    const auto pt = analytic::evaluate_point(z, cfg, method);
    row.op_analytic = pt.op;
    row.lcr_analytic = pt.lcr_norm;
    row.afd_analytic = pt.afd_norm;

    std::vector<double> batch_op, batch_lcr;
    std::size_t below = 0, crossings = 0, samples = 0;
    for (const auto& tr : traces) {
      const auto whole = empirical_stats(tr, z);
      below += static_cast<std::size_t>(std::llround(whole.op * static_cast<double>(whole.samples)));
      crossings += whole.down_crossings;
      samples += whole.samples;
      const std::size_t len = tr.sir.size() / static_cast<std::size_t>(tol.batches_per_trial);
      for (int b = 0; b < tol.batches_per_trial; ++b) {
        const auto st = empirical_stats(tr.sir, tr.dt, z, b * len, (b + 1) * len);
        batch_op.push_back(st.op);
        batch_lcr.push_back(st.lcr / cfg.f_m0);
      }
    }
    const double seconds = traces.front().dt * static_cast<double>(samples);
    row.op_empirical = static_cast<double>(below) / static_cast<double>(samples);
    row.lcr_empirical = static_cast<double>(crossings) / seconds / cfg.f_m0;
    row.afd_empirical = crossings > 0 ? row.op_empirical * seconds * cfg.f_m0 / static_cast<double>(crossings)
                                      : std::numeric_limits<double>::quiet_NaN();
    row.crossings = crossings;
    (void)detail::mean_and_se(batch_op, row.op_se);
    (void)detail::mean_and_se(batch_lcr, row.lcr_se);
    row.lcr_rel_err = std::abs(row.lcr_empirical - row.lcr_analytic) / row.lcr_analytic;
    row.afd_rel_err = std::abs(row.afd_empirical - row.afd_analytic) / row.afd_analytic;

    row.rare_event = row.op_analytic < 10.0 / static_cast<double>(report.total_samples);
    if (!row.rare_event) {
      row.op_checked = row.op_analytic >= tol.op_floor;
      if (row.op_checked) row.op_pass = std::abs(row.op_empirical - row.op_analytic) <= tol.op_sigmas * row.op_se;
      row.rate_pass = crossings > 0 && row.lcr_rel_err <= tol.rate_rel_tol && row.afd_rel_err <= tol.rate_rel_tol;
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace egc::simulator
