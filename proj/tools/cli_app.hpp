#pragma once

// The egc command line: compute, sweep, validate, bench. run() is the whole
// program minus process setup so tests can drive it in-process.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "egc/analytic.hpp"
#include "egc/errors.hpp"
#include "egc/simulator.hpp"
#include "egc/system.hpp"

namespace egc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

inline constexpr const char* kCsvHeader = "nsirth_db,z,scenario,m,n,method,op,lcr_norm,afd_norm,evals";

struct Row {
  double nsirth_db = 0.0;
  double z = 0.0;
  Scenario scenario = Scenario::Incoherent;
  int m = 1;
  int n = 1;
  std::string method;
  double op = 0.0;
  double lcr_norm = 0.0;
  double afd_norm = 0.0;
  std::size_t evals = 0;
  bool converged = true;
};

inline std::string format_g10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string csv_line(const Row& r) {
  std::ostringstream os;
  os << format_g10(r.nsirth_db) << ',' << format_g10(r.z) << ',' << to_string(r.scenario) << ',' << r.m << ','
     << r.n << ',' << r.method << ',' << format_g10(r.op) << ',' << format_g10(r.lcr_norm) << ','
     << format_g10(r.afd_norm) << ',' << r.evals;
  return os.str();
}

inline std::string json_line(const Row& r) {
  nlohmann::ordered_json j;
  j["nsirth_db"] = r.nsirth_db;
  j["z"] = r.z;
  j["scenario"] = std::string(to_string(r.scenario));
  j["m"] = r.m;
  j["n"] = r.n;
  j["method"] = r.method;
  j["op"] = r.op;
  j["lcr_norm"] = r.lcr_norm;
  if (std::isfinite(r.afd_norm))
    j["afd_norm"] = r.afd_norm;
  else
    j["afd_norm"] = nullptr;
  j["evals"] = r.evals;
  return j.dump();
}

inline void write_rows(std::ostream& out, const std::vector<Row>& rows, bool json) {
  if (!json) out << kCsvHeader << '\n';
  for (const auto& r : rows) out << (json ? json_line(r) : csv_line(r)) << '\n';
}

/// "start:stop:step" in dB, inclusive of stop up to rounding.
inline std::vector<double> parse_range(const std::string& text) {
  double start = 0.0, stop = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || !is.eof())
    throw domain_error("range must look like start:stop:step, got '" + text + "'");
  if (!(step > 0.0)) throw domain_error("range step must be positive");
  if (!(start < stop)) throw domain_error("range start must be below stop");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
  return grid;
}

inline std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& joined : names) {
    std::istringstream is(joined);
    std::string name;
    while (std::getline(is, name, ',')) {
      const auto m = parse_method(name);
      if (!m) throw domain_error("unknown method '" + name + "' (density, quadrature, series, closed)");
      if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
    }
  }
  if (out.empty()) throw domain_error("at least one method is required");
  return out;
}

/// Relative paths land under $EGC_OUTPUT_DIR when it is set.
inline std::filesystem::path output_path(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("EGC_OUTPUT_DIR"); dir != nullptr && *dir != '\0')
      return std::filesystem::path(dir) / p;
  }
  return p;
}

struct SystemOptions {
  int m = 1;
  int n = 1;
  std::string scenario;
  std::optional<double> gamma_db;
  std::optional<double> gamma;
  std::optional<double> omega_s;
  std::optional<double> omega_i;
  double f_m0 = 1.0;
  double f_mi = 1.0;

  void attach(CLI::App& app) {
    app.add_option("--m", m, "diversity branches M")->check(CLI::PositiveNumber);
    app.add_option("--n", n, "interferers N")->check(CLI::PositiveNumber);
    app.add_option("--scenario", scenario, "interference combining: incoherent or coherent (required for M > 1)");
    app.add_option("--gamma-db", gamma_db, "Omega_S / Omega_I in dB");
    app.add_option("--gamma", gamma, "Omega_S / Omega_I, linear");
    app.add_option("--omega-s", omega_s, "desired per-branch power");
    app.add_option("--omega-i", omega_i, "interferer per-branch power");
    app.add_option("--f-m0", f_m0, "desired-signal maximum Doppler (Hz)");
    app.add_option("--f-mi", f_mi, "interference maximum Doppler (Hz)");
  }

  SystemConfig build() const {
    SystemConfig c;
    c.m_branches = m;
    c.n_interferers = n;
    c.f_m0 = f_m0;
    c.f_mi = f_mi;
    if (scenario.empty()) {
      if (m > 1) throw domain_error("--scenario is required when M > 1");
    } else {
      const auto s = parse_scenario(scenario);
      if (!s) throw domain_error("unknown scenario '" + scenario + "'");
      c.scenario = *s;
    }
    const int power_forms = (gamma_db ? 1 : 0) + (gamma ? 1 : 0) + ((omega_s || omega_i) ? 1 : 0);
    if (power_forms > 1) throw domain_error("give only one of --gamma-db, --gamma, --omega-s/--omega-i");
    if (gamma_db) c.omega_s = std::pow(10.0, *gamma_db / 10.0);
    if (gamma) c.omega_s = *gamma;
    if (omega_s) c.omega_s = *omega_s;
    if (omega_i) c.omega_i = *omega_i;
    c.validate();
    return c;
  }
};

struct MethodOptions {
  std::vector<std::string> methods;
  double t_period = 80.0;
  std::size_t l_terms = 200;
  std::optional<double> abs_tol;
  std::optional<double> rel_tol;

  void attach(CLI::App& app, const std::string& default_method) {
    methods = {default_method};
    app.add_option("--method", methods, "density, quadrature, series, closed (repeatable or comma-separated)")
        ->capture_default_str();
    app.add_option("-T,--period", t_period, "series sampling period T")->capture_default_str();
    app.add_option("-L,--terms", l_terms, "minimum series terms L (the tail is extended until converged)")->capture_default_str();
    app.add_option("--abs-tol", abs_tol, "quadrature absolute tolerance (default 1e-9)");
    app.add_option("--rel-tol", rel_tol, "quadrature relative tolerance (default 1e-9)");
  }

  analytic::MethodParams build(const SystemConfig& cfg) const {
    analytic::MethodParams p;
    p.series.t_period = t_period;
    p.series.l_terms = l_terms;
    p.series.validate();
    if (abs_tol || rel_tol) {
      auto q = analytic::default_quadrature_spec(cfg);
      if (abs_tol) q.abs_tol = *abs_tol;
      if (rel_tol) q.rel_tol = *rel_tol;
      q.validate();
      p.quadrature = q;
    }
    return p;
  }
};

inline Row make_row(const analytic::StatPoint& pt, const SystemConfig& cfg) {
  Row r;
  r.nsirth_db = pt.nsirth_db;
  r.z = pt.z;
  r.scenario = cfg.scenario;
  r.m = cfg.m_branches;
  r.n = cfg.n_interferers;
  r.method = std::string(to_string(pt.method));
  r.op = pt.op;
  r.lcr_norm = pt.lcr_norm;
  r.afd_norm = pt.afd_norm;
  r.evals = pt.evaluations;
  r.converged = pt.converged;
  return r;
}

/// Evaluates jobs [0, count) on up to `threads` workers; results keep job order.
template <class Result, class Job>
std::vector<Result> parallel_map(std::size_t count, unsigned threads, Job job) {
  std::vector<Result> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      const auto p = output_path(path);
      file_.open(p);
      if (!file_) throw domain_error("cannot open output file " + p.string());
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

struct Threshold {
  std::optional<double> z;
  std::optional<double> z_db;
  std::optional<double> nsirth_db;

  double resolve(const SystemConfig& cfg) const {
    const int given = (z ? 1 : 0) + (z_db ? 1 : 0) + (nsirth_db ? 1 : 0);
    if (given != 1) throw domain_error("give exactly one of --z, --z-db, --nsirth-db");
    if (z) return *z;
    if (z_db) return std::pow(10.0, *z_db / 10.0);
    return threshold_from_nsirth_db(cfg.gamma(), *nsirth_db);
  }
};

/// Expands `--config FILE` into flags placed right after the subcommand.
/// Keys already given on the command line are skipped, so flags win.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return a == "--config" || a.rfind("--config=", 0) == 0;
  });
  if (it == args.end()) return args;
  std::string path;
  if (*it == "--config") {
    if (std::next(it) == args.end()) throw domain_error("--config needs a file name");
    path = *std::next(it);
    it = args.erase(it, std::next(it, 2));
  } else {
    path = it->substr(9);
    it = args.erase(it);
  }
  std::ifstream in(path);
  if (!in) throw domain_error("cannot read config file " + path);
  auto given = [&](const std::string& key) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
    });
  };
  std::vector<std::string> injected;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t\r");
      const auto e = t.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw domain_error("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw domain_error("config line without a key: " + line);
    if (given(key)) continue;
    if (value == "true") {
      injected.push_back("--" + key);
    } else if (value != "false") {
      injected.push_back("--" + key);
      injected.push_back(value);
    }
  }
  const auto sub = args.empty() ? args.end() : std::next(args.begin());
  args.insert(sub, injected.begin(), injected.end());
  return args;
}

/// Names the first row whose series stopped at its term budget.
inline bool report_unconverged(const std::vector<Row>& rows, std::ostream& err) {
  for (const auto& r : rows) {
    if (!r.converged) {
      err << "egc: " << r.method << " did not converge at NSIRth " << format_g10(r.nsirth_db) << " dB (M=" << r.m
          << ", N=" << r.n << ")\n";
      return true;
    }
  }
  return false;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Outage, level crossing rate and fade duration of EGC receivers with co-channel interference", "egc"};
  app.require_subcommand(1);

  SystemOptions sys;
  MethodOptions meth;
  Threshold threshold;
  bool json = false;
  std::string output;
  std::string range = "-10:30:1";
  std::optional<double> check_tol;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());

  auto* compute = app.add_subcommand("compute", "one threshold, every requested method");
  sys.attach(*compute);
  meth.attach(*compute, "quadrature");
  compute->add_option("--z", threshold.z, "linear SIR threshold z");
  compute->add_option("--z-db", threshold.z_db, "SIR threshold z in dB");
  compute->add_option("--nsirth-db", threshold.nsirth_db, "normalized threshold gamma / z in dB");
  compute->add_flag("--json", json, "JSON lines instead of text and CSV");

  auto* sweep = app.add_subcommand("sweep", "CSV over an NSIRth grid");
  SystemOptions sweep_sys;
  MethodOptions sweep_meth;
  sweep_sys.attach(*sweep);
  sweep_meth.attach(*sweep, "quadrature");
  sweep->add_option("--nsirth-db", range, "start:stop:step in dB")->capture_default_str();
  sweep->add_option("-o,--output", output, "output file (default stdout)");
  sweep->add_option("--check", check_tol, "exit 2 if methods disagree by more than this on OP or LCR");
  sweep->add_option("--threads", threads, "worker threads");
  sweep->add_flag("--json", json, "JSON lines instead of CSV");

  auto* validate = app.add_subcommand("validate", "Monte Carlo against the analytic values");
  SystemOptions val_sys;
  std::string val_method = "quadrature";
  std::string val_range = "-5:15:1";
  double periods = 5000.0, rate = 64.0;
  simulator::SimParams sim;
  val_sys.attach(*validate);
  validate->add_option("--method", val_method, "analytic reference method")->capture_default_str();
  validate->add_option("--nsirth-db", val_range, "start:stop:step in dB")->capture_default_str();
  validate->add_option("--duration", periods, "trace length in Doppler periods 1/f_m0")->capture_default_str();
  validate->add_option("--rate", rate, "samples per Doppler period")->capture_default_str();
  validate->add_option("--sinusoids", sim.n_sinusoids, "sinusoids per fading process")->capture_default_str();
  validate->add_option("--trials", sim.trials, "independent traces")->capture_default_str();
  validate->add_option("--seed", sim.seed, "master seed")->capture_default_str();
  validate->add_option("-o,--output", output, "output file (default stdout)");
  validate->add_flag("--json", json, "JSON lines instead of CSV");

  auto* bench = app.add_subcommand("bench", "evaluation counts and wall time, quadrature against series");
  SystemOptions bench_sys;
  MethodOptions bench_meth;
  std::string bench_range = "-10:30:5";
  bench_sys.attach(*bench);
  bench_meth.attach(*bench, "quadrature");
  bench->add_option("--nsirth-db", bench_range, "start:stop:step in dB")->capture_default_str();
  bench->add_option("-o,--output", output, "output file (default stdout)");

  try {
    args = expand_config(std::move(args));
  } catch (const domain_error& e) {
    err << "egc: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "egc: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (compute->parsed()) {
      const auto cfg = sys.build();
      const auto params = meth.build(cfg);
      const double z = threshold.resolve(cfg);
      std::vector<Row> rows;
      for (Method m : parse_methods(meth.methods)) rows.push_back(make_row(analytic::evaluate_point(z, cfg, m, params), cfg));
      if (json) {
        write_rows(out, rows, true);
      } else {
        for (const auto& r : rows) {
          out << r.method << ": OP = " << format_g10(r.op) << ", LCR/f_m0 = " << format_g10(r.lcr_norm)
              << ", f_m0 AFD = " << format_g10(r.afd_norm) << " (" << r.evals << " evaluations)\n";
        }
        write_rows(out, rows, false);
      }
      return report_unconverged(rows, err) ? kExitNumerical : kExitOk;
    }

    if (sweep->parsed()) {
      const auto cfg = sweep_sys.build();
      const auto params = sweep_meth.build(cfg);
      const auto methods = parse_methods(sweep_meth.methods);
      const auto grid = parse_range(range);
      const auto points = parallel_map<std::vector<Row>>(grid.size(), threads, [&](std::size_t i) {
        std::vector<Row> rs;
        const double z = threshold_from_nsirth_db(cfg.gamma(), grid[i]);
        for (Method m : methods) {
          auto r = make_row(analytic::evaluate_point(z, cfg, m, params), cfg);
          r.nsirth_db = grid[i];
          rs.push_back(r);
        }
        return rs;
      });
      std::vector<Row> rows;
      double worst = 0.0, worst_db = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        for (const auto& a : points[i]) {
          for (const auto& b : points[i]) {
            const double d = std::max(std::abs(a.op - b.op), std::abs(a.lcr_norm - b.lcr_norm));
            if (d > worst) {
              worst = d;
              worst_db = grid[i];
            }
          }
          rows.push_back(a);
        }
      }
      Output sink(output, out);
      write_rows(sink.stream(), rows, json);
      if (report_unconverged(rows, err)) return kExitNumerical;
      if (check_tol && worst > *check_tol) {
        err << "egc: methods disagree by " << worst << " at NSIRth " << worst_db << " dB (tolerance " << *check_tol
            << ")\n";
        return kExitNumerical;
      }
      return kExitOk;
    }

    if (validate->parsed()) {
      const auto cfg = val_sys.build();
      const auto method = parse_methods({val_method}).front();
      if (!(cfg.f_m0 > 0.0)) throw domain_error("validate needs f_m0 > 0");
      if (!(periods > 0.0) || !(rate > 0.0)) throw domain_error("--duration and --rate must be positive");
      sim.duration = periods / cfg.f_m0;
      sim.sample_rate = rate * cfg.f_m0;
      std::vector<double> zs;
      const auto grid = parse_range(val_range);
      for (double db : grid) zs.push_back(threshold_from_nsirth_db(cfg.gamma(), db));
      const auto report = simulator::validate_against_analytic(cfg, zs, sim, method);
      std::vector<Row> rows;
      int failures = 0;
      for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& vr = report.rows[i];
        Row a;
        a.nsirth_db = grid[i];
        a.z = vr.z;
        a.scenario = cfg.scenario;
        a.m = cfg.m_branches;
        a.n = cfg.n_interferers;
        a.method = std::string(to_string(method));
        a.op = vr.op_analytic;
        a.lcr_norm = vr.lcr_analytic;
        a.afd_norm = vr.afd_analytic;
        Row s = a;
        s.method = "simulation";
        s.op = vr.op_empirical;
        s.lcr_norm = vr.lcr_empirical;
        s.afd_norm = vr.afd_empirical;
        s.evals = report.total_samples;
        rows.push_back(a);
        rows.push_back(s);
        if (!vr.op_pass || !vr.rate_pass) ++failures;
        err << "NSIRth " << format_g10(grid[i]) << " dB: OP " << format_g10(vr.op_empirical) << " vs "
            << format_g10(vr.op_analytic) << " (se " << format_g10(vr.op_se) << "), LCR rel err "
            << format_g10(vr.lcr_rel_err) << ", AFD rel err " << format_g10(vr.afd_rel_err)
            << (vr.rare_event ? " [rare event, not checked]" : (vr.op_pass && vr.rate_pass ? " ok" : " FAIL"))
            << '\n';
      }
      Output sink(output, out);
      write_rows(sink.stream(), rows, json);
      err << failures << " of " << report.rows.size() << " thresholds outside tolerance; " << report.excluded_samples
          << " samples excluded\n";
      return kExitOk;
    }

    if (bench->parsed()) {
      const auto cfg = bench_sys.build();
      const auto params = bench_meth.build(cfg);
      const auto grid = parse_range(bench_range);
      Output sink(output, out);
      auto& os = sink.stream();
      os << "nsirth_db,z,scenario,m,n,method,op,lcr_norm,evals,seconds\n";
      std::size_t totals[2] = {0, 0};
      double seconds[2] = {0.0, 0.0};
      for (double db : grid) {
        const double z = threshold_from_nsirth_db(cfg.gamma(), db);
        int k = 0;
        for (Method m : {Method::Quadrature, Method::Series}) {
          const auto t0 = std::chrono::steady_clock::now();
          const auto pt = analytic::evaluate_point(z, cfg, m, params);
          const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          os << format_g10(db) << ',' << format_g10(z) << ',' << to_string(cfg.scenario) << ',' << cfg.m_branches
             << ',' << cfg.n_interferers << ',' << to_string(m) << ',' << format_g10(pt.op) << ','
             << format_g10(pt.lcr_norm) << ',' << pt.evaluations << ',' << format_g10(s) << '\n';
          totals[k] += pt.evaluations;
          seconds[k] += s;
          ++k;
        }
      }
      err << "quadrature: " << totals[0] << " evaluations, " << format_g10(seconds[0]) << " s\n"
          << "series: " << totals[1] << " evaluations, " << format_g10(seconds[1]) << " s\n";
      return kExitOk;
    }
  } catch (const domain_error& e) {
    err << "egc: " << e.what() << '\n';
    return kExitUsage;
  } catch (const budget_exceeded& e) {
    err << "egc: quadrature budget exceeded: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const numerical_error& e) {
    err << "egc: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "egc: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace egc::cli
