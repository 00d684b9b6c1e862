#pragma once

// Command implementations behind the `ksgas` executable.  Every command takes
// a parsed RunConfig plus output streams and returns the process exit code:
//
//   0  completed, all certified checks passed
//   1  completed, at least one certification failed
//   2  usage / configuration error (raised as ConfigError before any output)
//   3  completed, but results are flagged (e.g. activity outside the proven
//      convergence radius, so tail budgets are not finite)
//
// CSV output is comma-separated with `#`-prefixed header comments, numbers
// formatted with 17 significant digits; JSON output uses ordered keys.  All
// results are in reduced units: lengths in units of the core diameter
// (d = 1 unless overridden) and energies in units of 1/beta.  Identical
// configs produce byte-identical output; the only environment input is
// KSGAS_THREADS, which parallelizes the sharpness sweep across worker
// threads without changing the emitted bytes.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ksgas/config.hpp"
#include "ksgas/evaluator.hpp"
#include "ksgas/hardrod.hpp"
#include "ksgas/hclimit.hpp"
#include "ksgas/mayer.hpp"
#include "ksgas/potential.hpp"
#include "ksgas/report.hpp"
#include "ksgas/residuals.hpp"

namespace ksgas::cli {

namespace detail_cli {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string potential_desc(const RunConfig& cfg) {
  switch (cfg.kind) {
    case PotentialKind::ideal: return "ideal";
    case PotentialKind::gaussian_bump:
      return "gaussian_bump amplitude=" + fmt17(cfg.amplitude) + " width=" + fmt17(cfg.width);
    case PotentialKind::soft_core:
      return "soft_core diameter=" + fmt17(cfg.diameter) + " sharpness=" + fmt17(cfg.sharpness);
    case PotentialKind::hard_rod: return "hard_rod diameter=" + fmt17(cfg.diameter);
  }
  return "unknown";
}

inline std::string kind_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::ideal: return "ideal";
    case PotentialKind::gaussian_bump: return "gaussian_bump";
    case PotentialKind::soft_core: return "soft_core";
    case PotentialKind::hard_rod: return "hard_rod";
  }
  return "unknown";
}

inline void unit_header(std::ostream& out) {
  out << "# units: reduced; lengths in units of the core diameter (d = 1 unless overridden),"
         " energies in units of 1/beta\n";
}

// Equally spaced collinear configuration 0, gap, 2*gap, ... along the x axis.
inline Config collinear(int n, double gap) {
  Config q;
  for (int i = 0; i < n; ++i) q.push_back({gap * i, 0.0, 0.0});
  return q;
}

inline hardrod::TonksParams tonks_params(const RunConfig& cfg) {
  return cfg.drive.is_density ? hardrod::tonks_constants(cfg.drive.value, cfg.diameter)
                              : hardrod::tonks_from_activity(cfg.drive.value, cfg.diameter);
}

// Resolves the drive to an activity for series-based commands; a density
// drive goes through Newton inversion of the truncated one-point series.
inline double resolve_activity(MayerCoefficients& eng, const RunConfig& cfg) {
  if (!cfg.drive.is_density) return cfg.drive.value;
  return eng.invert_activity(cfg.drive.value, cfg.mayer.order);
}

// Deliberate-corruption view used by `certify` self-tests: it reports the
// wrapped state's correlations together with a scaled activity, so equations
// that involve z must fail while activity-free identities stay green.
class ScaledActivityEvaluator : public CorrelationEvaluator {
 public:
  ScaledActivityEvaluator(CorrelationEvaluator& inner, double scale)
      : inner_(inner), scale_(scale) {}

  SeriesValue rho(int n, const Config& q) override { return inner_.rho(n, q); }
  SeriesValue rho_at(int n, const Config& q, int max_excess) override {
    return inner_.rho_at(n, q, max_excess);
  }
  double activity() const override { return scale_ * inner_.activity(); }
  double xi_bound() const override { return inner_.xi_bound(); }
  double i_upper() const override { return inner_.i_upper(); }
  const PairPotential& potential() const override { return inner_.potential(); }
  const ThermoState& state() const override { return inner_.state(); }
  std::string name() const override { return inner_.name(); }

 private:
  CorrelationEvaluator& inner_;
  double scale_;
};

}  // namespace detail_cli

// Worker-thread count for the sharpness sweep, from KSGAS_THREADS (default 1).
inline int thread_count_from_env() {
  const char* s = std::getenv("KSGAS_THREADS");
  if (s == nullptr || *s == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || v < 1 || v > 64)
    throw ConfigError("KSGAS_THREADS must be an integer in [1, 64]");
  return static_cast<int>(v);
}

// ---------------------------------------------------------------------------
// tabulate: correlation function over a separation grid
// ---------------------------------------------------------------------------

inline int cmd_tabulate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  using namespace detail_cli;
  const int n = cfg.mayer.n;
  const std::vector<double> xs = cfg.mayer.grid.values();

  out << "# ksgas tabulate\n";
  unit_header(out);
  out << "# potential: " << potential_desc(cfg) << "; beta=" << fmt17(cfg.thermo.beta)
      << "; nu=" << cfg.thermo.nu << "\n";

  bool all_ok = true;
  std::vector<std::string> rows;
  rows.reserve(xs.size());

  if (cfg.kind == PotentialKind::hard_rod) {
    // Closed-form hard-rod correlations: zero budgets, always inside radius.
    const hardrod::TonksParams p = tonks_params(cfg);
    out << "# evaluator: tonks_hard_rod; z=" << fmt17(p.z) << "; rho=" << fmt17(p.rho)
        << "; R=" << fmt17(p.R) << "; n=" << n << "\n";
    for (double x : xs) {
      std::vector<double> q;
      if (n == 1)
        q.push_back(x);
      else
        for (int i = 0; i < n; ++i) q.push_back(i * x);
      const double v = hardrod::tonks_rhon(p, q);
      rows.push_back(fmt17(x) + "," + fmt17(v) + ",0,0,1");
    }
  } else {
    MayerCoefficients eng(cfg.make_potential(), cfg.thermo, cfg.quad);
    const double z = resolve_activity(eng, cfg);
    const bool radius_ok = std::abs(z) < eng.z_radius();
    all_ok = radius_ok;
    out << "# evaluator: mayer_series; z=" << fmt17(z) << "; order=" << cfg.mayer.order
        << "; n=" << n << "; z_radius=" << fmt17(eng.z_radius()) << "\n";
    for (double x : xs) {
      Config q;
      if (n == 1)
        q.push_back({x, 0.0, 0.0});
      else
        for (int i = 0; i < n; ++i) q.push_back({i * x, 0.0, 0.0});
      const SeriesValue s = eng.rho(n, q, z, cfg.mayer.order);
      rows.push_back(fmt17(x) + "," + fmt17(s.value) + "," + fmt17(s.tail) + "," +
                     fmt17(s.quad) + "," + (radius_ok ? "1" : "0"));
    }
  }

  out << "# columns: x,rho_n,tail,quad,radius_ok\n";
  for (const auto& r : rows) out << r << "\n";
  return all_ok ? 0 : 3;
}

// ---------------------------------------------------------------------------
// certify: residual suites, aggregated into a JSON report
// ---------------------------------------------------------------------------

namespace detail_cli {

inline std::vector<std::string> resolve_suite(const RunConfig& cfg) {
  static const std::vector<std::string> known{"hardrod", "ks",         "symmetric",
                                              "bbgky",   "bogolyubov", "activity"};
  std::vector<std::string> suite = cfg.residuals.suite;
  if (!cfg.residuals.suite_given) {
    if (cfg.kind == PotentialKind::hard_rod)
      suite = {"hardrod", "ks", "activity"};
    else if (cfg.kind == PotentialKind::ideal)
      suite = {"ks", "bbgky", "activity"};
    else
      suite = {"ks", "symmetric", "bbgky", "bogolyubov", "activity"};
  }
  if (suite.empty()) throw ConfigError("config: residuals.suite: empty suite selection");
  for (const auto& s : suite) {
    bool ok = false;
    for (const auto& k : known) ok = ok || (s == k);
    if (!ok) throw ConfigError("config: residuals.suite: unknown suite '" + s + "'");
    if (s == "hardrod" && cfg.kind != PotentialKind::hard_rod)
      throw ConfigError("config: residuals.suite: 'hardrod' requires the hard_rod potential");
    if ((s == "symmetric" || s == "bogolyubov" || s == "bbgky") &&
        cfg.kind == PotentialKind::hard_rod)
      throw ConfigError("config: residuals.suite: '" + s +
                        "' needs a differentiable potential, not hard_rod");
  }
  return suite;
}

}  // namespace detail_cli

inline int cmd_certify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  using namespace detail_cli;
  const std::vector<std::string> suite = resolve_suite(cfg);
  const double gap = 1.5 * cfg.diameter;

  // Closed-form oracle or truncated series, by potential kind.
  std::unique_ptr<TonksEvaluator> tonks;
  std::unique_ptr<MayerEvaluator> mayer;
  CorrelationEvaluator* base = nullptr;
  if (cfg.kind == PotentialKind::hard_rod) {
    const hardrod::TonksParams p = tonks_params(cfg);
    tonks = std::make_unique<TonksEvaluator>(p.rho, p.d);
    base = tonks.get();
  } else {
    const PairPotential pot = cfg.make_potential();
    double z = cfg.drive.value;
    if (cfg.drive.is_density) {
      MayerCoefficients scratch(pot, cfg.thermo, cfg.quad);
      z = scratch.invert_activity(cfg.drive.value, cfg.mayer.order);
    }
    mayer = std::make_unique<MayerEvaluator>(pot, cfg.thermo, z, cfg.mayer.order, cfg.quad);
    base = mayer.get();
  }
  ScaledActivityEvaluator view(*base, cfg.residuals.z_scale);

  std::mt19937_64 rng(cfg.quad.seed);
  std::uniform_real_distribution<double> anchor_dist(-5.0, 5.0);
  std::uniform_real_distribution<double> momentum_dist(-2.0, 2.0);

  std::vector<ResidualReport> reports;
  for (const auto& s : suite) {
    if (s == "hardrod") {
      const hardrod::TonksParams& p = tonks->params();
      // Keep every pairwise separation off the lattice of integer multiples
      // of d, where the closed-form correlations have derivative knots.
      const std::vector<double> q2{0.0, gap};
      const std::vector<double> q3{0.0, gap, 3.2 * cfg.diameter};
      reports.push_back(hardrod::hierarchy_residual(p, q2, cfg.residuals.fd_step));
      reports.push_back(hardrod::hierarchy_residual(p, q3, cfg.residuals.fd_step));
      reports.push_back(hardrod::extracted_constant_residual(p, q2, cfg.quad));
      reports.push_back(hardrod::hc_ks_residual(p, {0.0}, cfg.quad));
      reports.push_back(hardrod::hc_ks_residual(p, q2, cfg.quad));
      reports.push_back(hardrod::hc_ks_residual(p, q3, cfg.quad));
    } else if (s == "ks") {
      reports.push_back(ks_residual(view, collinear(1, gap), cfg.residuals.m_max, cfg.quad));
      reports.push_back(ks_residual(view, collinear(2, gap), cfg.residuals.m_max, cfg.quad));
    } else if (s == "symmetric") {
      for (int i = 0; i < cfg.residuals.draws; ++i) {
        Vec q0{0.0, 0.0, 0.0};
        for (int c = 0; c < cfg.thermo.nu; ++c) q0[c] = anchor_dist(rng);
        reports.push_back(ks_symmetric_residual(*mayer, collinear(2, gap), q0, 1, cfg.quad));
      }
    } else if (s == "bbgky") {
      reports.push_back(bbgky_residual(view, collinear(2, gap), cfg.residuals.fd_step, cfg.quad));
    } else if (s == "bogolyubov") {
      for (int i = 0; i < cfg.residuals.draws; ++i) {
        Config momenta = collinear(2, 0.0);
        for (auto& pm : momenta)
          for (int c = 0; c < cfg.thermo.nu; ++c) pm[c] = momentum_dist(rng);
        reports.push_back(
            bogolyubov_residual(view, collinear(2, gap), momenta, cfg.residuals.fd_step, cfg.quad));
      }
    } else if (s == "activity") {
      const int k_max = std::max(2, cfg.residuals.m_max);
      const ActivityEstimate est = activity_from_state(view, k_max, cfg.quad);
      ErrorBudget parts;
      parts.quad = est.budget;
      reports.push_back(
          make_report("activity_inversion", 1, {}, est.z - view.activity(), parts));
    }
  }

  bool all_pass = true;
  for (const auto& r : reports) all_pass = all_pass && r.pass;

  nlohmann::ordered_json j;
  j["command"] = "certify";
  j["units"] = "reduced (lengths in core diameters, energies in 1/beta)";
  j["potential"] = kind_name(cfg.kind);
  j["evaluator"] = base->name();
  j["activity"] = view.activity();
  j["suite"] = suite;
  j["reports"] = reports;
  j["all_pass"] = all_pass;
  out << j.dump(2) << "\n";
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// invert: recover the activity from the state's own correlations
// ---------------------------------------------------------------------------

inline int cmd_invert(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  using namespace detail_cli;

  std::unique_ptr<TonksEvaluator> tonks;
  std::unique_ptr<MayerEvaluator> mayer;
  CorrelationEvaluator* ev = nullptr;
  if (cfg.kind == PotentialKind::hard_rod) {
    const hardrod::TonksParams p = tonks_params(cfg);
    tonks = std::make_unique<TonksEvaluator>(p.rho, p.d);
    ev = tonks.get();
  } else {
    const PairPotential pot = cfg.make_potential();
    double z = cfg.drive.value;
    if (cfg.drive.is_density) {
      MayerCoefficients scratch(pot, cfg.thermo, cfg.quad);
      z = scratch.invert_activity(cfg.drive.value, cfg.mayer.order);
    }
    mayer = std::make_unique<MayerEvaluator>(pot, cfg.thermo, z, cfg.mayer.order, cfg.quad);
    ev = mayer.get();
  }

  const int k_max = std::max(2, cfg.residuals.m_max);
  const ActivityEstimate est = activity_from_state(*ev, k_max, cfg.quad);
  const double z_ref = ev->activity();
  const double abs_error = std::abs(est.z - z_ref);
  const bool pass = abs_error <= est.budget;

  nlohmann::ordered_json j;
  j["command"] = "invert";
  j["units"] = "reduced (lengths in core diameters, energies in 1/beta)";
  j["potential"] = kind_name(cfg.kind);
  j["evaluator"] = ev->name();
  j["k_max"] = k_max;
  j["z_reference"] = z_ref;
  j["z_recovered"] = est.z;
  j["denominator"] = est.denominator;
  j["budget"] = est.budget;
  j["abs_error"] = abs_error;
  if (mayer) {
    // Independent Newton route through the truncated one-point series.
    const SeriesValue rho1 = mayer->rho(1, collinear(1, 0.0));
    const double z_newton = mayer->engine().invert_activity(rho1.value, mayer->order());
    j["rho1"] = rho1.value;
    j["z_newton"] = z_newton;
    j["newton_abs_error"] = std::abs(z_newton - z_ref);
  }
  j["pass"] = pass;
  out << j.dump(2) << "\n";
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// hardrod: closed-form hard-rod table with clustering gap
// ---------------------------------------------------------------------------

inline int cmd_hardrod(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  using namespace detail_cli;
  if (cfg.kind != PotentialKind::hard_rod)
    throw ConfigError("config: hardrod requires potential.kind = hard_rod");
  const hardrod::TonksParams p = tonks_params(cfg);

  out << "# ksgas hardrod\n";
  unit_header(out);
  out << "# R=" << fmt17(p.R) << "; z=" << fmt17(p.z) << "; rho=" << fmt17(p.rho)
      << "; d=" << fmt17(p.d) << "\n";
  out << "# columns: s,rho2,clustering_gap\n";
  for (double s : cfg.mayer.grid.values()) {
    const double v = hardrod::tonks_rho2(p, s);
    out << fmt17(s) << "," << fmt17(v) << "," << fmt17(std::abs(v - p.rho * p.rho)) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bounds: closed-form envelopes and tail bounds for the configured run
// ---------------------------------------------------------------------------

inline int cmd_bounds(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  using namespace detail_cli;
  MayerCoefficients eng(cfg.make_potential(), cfg.thermo, cfg.quad);
  // The hard rod resolves a density drive in closed form; series inversion
  // would be asked to leave its own convergence disk.
  const double z = cfg.kind == PotentialKind::hard_rod ? tonks_params(cfg).z
                                                       : resolve_activity(eng, cfg);
  const bool radius_ok = std::abs(z) < eng.z_radius();
  const double xi = std::abs(z) * M_E;

  nlohmann::ordered_json j;
  j["command"] = "bounds";
  j["units"] = "reduced (lengths in core diameters, energies in 1/beta)";
  j["potential"] = kind_name(cfg.kind);
  j["beta"] = cfg.thermo.beta;
  j["nu"] = cfg.thermo.nu;
  j["z"] = z;
  j["i_beta"] = {{"value", eng.i_value()}, {"error", eng.i_error()}, {"upper", eng.i_upper()}};
  j["z_radius"] = eng.z_radius();
  j["xi_admissible"] = eng.xi_admissible();
  j["xi"] = xi;
  j["radius_ok"] = radius_ok;

  nlohmann::ordered_json tails = nlohmann::ordered_json::array();
  nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
  for (int n = 1; n <= 3; ++n)
    for (int P = 0; P <= cfg.mayer.order; ++P) {
      tails.push_back({{"n", n}, {"P", P}, {"tail", eng.series_tail(n, z, P)}});
      coeffs.push_back({{"n", n}, {"p", P}, {"bound", eng.coeff_bound(n, P)}});
    }
  j["series_tail"] = tails;
  j["coeff_bound"] = coeffs;

  if (cfg.kind == PotentialKind::hard_rod) {
    // The hard rod has no classical gradient, so the iteration remainder of
    // the differentiated hierarchy is not defined for it.
    j["j_beta"] = nullptr;
    j["iteration_tail"] = nullptr;
  } else {
    const QuadResult jb = grad_phi_l1(eng.potential(), cfg.thermo, cfg.quad);
    const double j_beta = jb.value + jb.error;
    j["j_beta"] = {{"value", jb.value}, {"error", jb.error}};
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int N = 1; N <= 8; ++N)
      rows.push_back(
          {{"N", N}, {"value", iteration_tail(N, 2, 1.0, eng.i_upper(), j_beta, xi)}});
    j["iteration_tail"] = rows;
  }

  out << j.dump(2) << "\n";
  return radius_ok ? 0 : 3;
}

// ---------------------------------------------------------------------------
// hclimit: sharpness sweep against the exact hard-rod limit
// ---------------------------------------------------------------------------

inline int cmd_hclimit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  using namespace detail_cli;
  if (cfg.kind != PotentialKind::soft_core)
    throw ConfigError("config: hclimit requires potential.kind = soft_core (sharpness family)");
  if (cfg.thermo.nu != 1)
    throw ConfigError("config: hclimit is defined on the line (thermo.nu = 1)");

  hclimit::SweepPlan plan;
  plan.epsilons = cfg.hclimit.epsilons;
  plan.x_grid = cfg.hclimit.grid.values();
  plan.drive_value = cfg.drive.value;
  plan.fix_density = cfg.drive.is_density;
  plan.order = cfg.mayer.order;
  plan.beta = cfg.thermo.beta;
  plan.diameter = cfg.diameter;

  // The per-sharpness engines are independent, so the sweep can fan out
  // across worker threads; results are spliced back in plan order, keeping
  // the output bytes independent of KSGAS_THREADS.
  for (std::size_t i = 0; i + 1 < plan.epsilons.size(); ++i)
    if (!(plan.epsilons[i] > plan.epsilons[i + 1]))
      throw ConfigError("config: hclimit.epsilons must decrease strictly");
  const int workers =
      std::min<int>(thread_count_from_env(), static_cast<int>(plan.epsilons.size()));

  hclimit::SweepTable table;
  if (workers > 1) {
    std::vector<hclimit::SweepTable> parts(plan.epsilons.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= plan.epsilons.size()) return;
        try {
          hclimit::SweepPlan sub = plan;
          sub.epsilons = {plan.epsilons[i]};
          parts[i] = hclimit::limit_sweep(sub, cfg.quad);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    for (auto& part : parts) {
      table.points.insert(table.points.end(), part.points.begin(), part.points.end());
      table.summary.insert(table.summary.end(), part.summary.begin(), part.summary.end());
    }
  } else {
    table = hclimit::limit_sweep(plan, cfg.quad);
  }

  out << "# ksgas hclimit\n";
  unit_header(out);
  out << "# soft-core family: phi(r) = (1/eps) (1 - r^2/d^2)^2 on r <= d; d="
      << fmt17(plan.diameter) << "; beta=" << fmt17(plan.beta) << "; order=" << plan.order
      << "\n";
  if (plan.fix_density)
    out << "# drive: density rho=" << fmt17(plan.drive_value)
        << " (activity inverted per sharpness)\n";
  else
    out << "# drive: activity z=" << fmt17(plan.drive_value) << "\n";
  out << "# columns: epsilon,x,rho2_eps,rho2_hard,abs_error,budget"
      << (plan.fix_density ? ",z_eps" : "") << "\n";

  const std::size_t per_eps = plan.x_grid.size();
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    const auto& pt = table.points[i];
    out << fmt17(pt.epsilon) << "," << fmt17(pt.x) << "," << fmt17(pt.rho2_eps) << ","
        << fmt17(pt.rho2_hard) << "," << fmt17(pt.abs_error) << "," << fmt17(pt.budget);
    if (plan.fix_density) out << "," << fmt17(table.summary[i / per_eps].z_used);
    out << "\n";
  }

  bool all_radius_ok = true;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.summary) {
    all_radius_ok = all_radius_ok && row.radius_ok;
    rows.push_back({{"epsilon", row.epsilon},
                    {"sup_error", row.sup_error},
                    {"tail_budget", row.tail_budget},
                    {"z_used", row.z_used},
                    {"rho_used", row.rho_used},
                    {"radius_ok", row.radius_ok}});
  }

  // Empirical convergence rate: least-squares slope of log sup_error against
  // log epsilon over the unflagged rows (null when fewer than two qualify).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& row : table.summary) {
    if (!row.radius_ok || !std::isfinite(row.sup_error) || !(row.sup_error > 0)) continue;
    const double lx = std::log(row.epsilon), ly = std::log(row.sup_error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  nlohmann::ordered_json j;
  j["command"] = "hclimit";
  j["units"] = "reduced (lengths in core diameters, energies in 1/beta)";
  j["drive"] = plan.fix_density ? "density" : "activity";
  j["drive_value"] = plan.drive_value;
  j["order"] = plan.order;
  j["beta"] = plan.beta;
  j["rows"] = rows;
  if (m >= 2)
    j["empirical_rate"] = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  else
    j["empirical_rate"] = nullptr;
  j["rate_points"] = m;
  j["all_radius_ok"] = all_radius_ok;

  if (cfg.output.summary.empty()) {
    err << j.dump(2) << "\n";
  } else {
    std::ofstream f(cfg.output.summary);
    if (!f) throw ConfigError("config: output.summary: cannot write '" + cfg.output.summary + "'");
    f << j.dump(2) << "\n";
  }
  return all_radius_ok ? 0 : 3;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out,
                       std::ostream& err) {
  if (name == "tabulate") return cmd_tabulate(cfg, out, err);
  if (name == "certify") return cmd_certify(cfg, out, err);
  if (name == "invert") return cmd_invert(cfg, out, err);
  if (name == "hardrod") return cmd_hardrod(cfg, out, err);
  if (name == "hclimit") return cmd_hclimit(cfg, out, err);
  if (name == "bounds") return cmd_bounds(cfg, out, err);
  throw ConfigError("unknown subcommand '" + name + "'");
}

}  // namespace ksgas::cli
