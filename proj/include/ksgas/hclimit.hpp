#pragma once

// Hard-core limit studies on the line.  A family of smooth repulsive cores
// phi^(eps) sharpens toward the hard rod as eps -> 0; this module provides
//   - the exact limit coefficients c0_{n,p} from the hard-core insertion
//     recursion, evaluated by interval-intersection integrals that are exact
//     on the piecewise-polynomial integrands,
//   - per-sharpness coefficient gaps against those limits,
//   - the leading-order (alternating-bound) inequality with certified margin,
//   - a sweep comparing the smooth pair function against the exact hard-rod
//     gas at matched drive across the sharpness sequence.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/lambert_w.hpp>

#include "ksgas/geometry.hpp"
#include "ksgas/hardrod.hpp"
#include "ksgas/mayer.hpp"
#include "ksgas/potential.hpp"
#include "ksgas/quadrature.hpp"
#include "ksgas/report.hpp"

namespace ksgas::hclimit {

namespace detail_hc {

inline std::vector<double> line_coords(const Config& q) {
  std::vector<double> xs;
  xs.reserve(q.size());
  for (const auto& pt : q) xs.push_back(pt[0]);
  return xs;
}

inline void require_clear_of_boundary(const std::vector<double>& xs, double d) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (std::abs(std::abs(xs[i] - xs[j]) - d) < kPositionQuantum)
        throw std::domain_error("hard-core limit: configuration touches a core boundary");
}

}  // namespace detail_hc

// Exact activity-series coefficient of the hard-rod gas on the line, by the
// insertion recursion restricted to the exclusion domain.  Integrands are
// piecewise polynomial with breakpoints on the lattice of existing points
// shifted by multiples of the rod length, so segmenting there makes the
// fixed-order rule exact; three mutually excluding insertions never fit in
// the open insertion ball, hence the recursion depth in k is at most two.
inline double hard_core_coeff(int n, int p, const Config& q, double d = 1.0,
                              const QuadSpec& spec = {}) {
  if (!(d > 0)) throw std::invalid_argument("hard_core_coeff: rod length must be positive");
  if (n < 1 || static_cast<int>(q.size()) != n)
    throw std::invalid_argument("hard_core_coeff: configuration size must equal n");
  if (p < 0) throw std::invalid_argument("hard_core_coeff: order must be nonnegative");
  const std::vector<double> xs = detail_hc::line_coords(q);
  detail_hc::require_clear_of_boundary(xs, d);

  // value = 0 on any overlap: the limit of the smooth Boltzmann weight.
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (std::abs(xs[i] - xs[j]) < d) return 0.0;

  if (p < n - 1) return 0.0;   // below leading order
  if (p == n - 1) return 1.0;  // Boltzmann factor on the allowed domain

  const double anchor = xs[0];
  const std::vector<double> rest(xs.begin() + 1, xs.end());

  auto sub_config = [&](const std::vector<double>& base,
                        std::initializer_list<double> extra) {
    Config c;
    c.reserve(base.size() + extra.size());
    for (double x : base) c.push_back(vec1(x));
    for (double x : extra) c.push_back(vec1(x));
    return c;
  };

  double value = 0.0;
  if (n > 1) {
    Config tail_cfg = sub_config(rest, {});
    value += hard_core_coeff(n - 1, p - 1, tail_cfg, d, spec);
  }

  const auto segs = hardrod::detail::free_intervals(anchor, d, rest);
  const int kmax = std::min(p + 1 - n, 2);

  if (kmax >= 1) {
    double acc = 0.0;
    for (const auto& [lo, hi] : segs) {
      if (!(hi > lo)) continue;
      auto g = [&](double y) {
        return hard_core_coeff(n, p - 1, sub_config(rest, {y}), d, spec);
      };
      acc += integrate_radial(g, lo, hi, hardrod::detail::lattice_knots(xs, d, lo, hi), spec)
                 .value;
    }
    value -= acc;  // (-1)^1 / 1!
  }

  if (kmax >= 2) {
    // (+1/2!) over the unordered pairs = ordered integral y2 >= y1 + d.
    double acc = 0.0;
    for (const auto& [lo1, hi1] : segs) {
      if (!(hi1 > lo1)) continue;
      auto outer = [&](double y1) {
        double inner_acc = 0.0;
        for (const auto& [lo2, hi2] : segs) {
          const double lo = std::max(lo2, y1 + d);
          if (!(hi2 > lo)) continue;
          std::vector<double> kx = xs;
          kx.push_back(y1);
          auto g = [&](double y2) {
            return hard_core_coeff(n + 1, p - 1, sub_config(rest, {y1, y2}), d, spec);
          };
          inner_acc +=
              integrate_radial(g, lo, hi2, hardrod::detail::lattice_knots(kx, d, lo, hi2), spec)
                  .value;
        }
        return inner_acc;
      };
      acc += integrate_radial(outer, lo1, hi1, hardrod::detail::lattice_knots(xs, d, lo1, hi1),
                              spec)
                 .value;
    }
    value += acc;
  }

  return value;
}

// ---------------------------------------------------------------------------
// Coefficient gaps across the sharpness sequence
// ---------------------------------------------------------------------------

struct CoeffLimitRow {
  double epsilon = 0.0;  // sharpness of the smooth core
  double value = 0.0;    // smooth-core coefficient at this sharpness
  double err = 0.0;      // its quadrature error bound
  double limit = 0.0;    // exact hard-core coefficient
  double gap = 0.0;      // |value - limit|
};

inline std::vector<CoeffLimitRow> coeff_limit_check(int n, int p, const Config& q,
                                                    const std::vector<double>& eps_list,
                                                    double beta = 600.0, double diameter = 1.0,
                                                    const QuadSpec& spec = {}) {
  const double limit = hard_core_coeff(n, p, q, diameter, spec);
  std::vector<CoeffLimitRow> rows;
  rows.reserve(eps_list.size());
  for (double eps : eps_list) {
    MayerCoefficients eng(PairPotential::soft_core(diameter, eps), ThermoState{beta, 1}, spec);
    const auto c = eng.coeff(n, p, q);
    CoeffLimitRow row;
    row.epsilon = eps;
    row.value = c.value;
    row.err = c.err;
    row.limit = limit;
    row.gap = std::abs(c.value - limit);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Leading-order (alternating) bound
// ---------------------------------------------------------------------------

// For positive potentials and z > 0 the activity series of rho_n alternates,
// so the whole function sits strictly below its leading term
// z^n e^{-beta sum_{i<j} phi}.  The report's residual is the signed margin
// (value - bound); `pass` certifies value + budget < bound AND the computed
// coefficients really do alternate, sign (-1)^{p+1-n}, above leading order.
inline ResidualReport groeneveld_check(int n, const Config& q, double epsilon, double z, int P,
                                       const QuadSpec& spec = {}, double beta = 600.0,
                                       double diameter = 1.0) {
  if (n < 1 || static_cast<int>(q.size()) != n)
    throw std::invalid_argument("groeneveld_check: configuration size must equal n");
  if (!(z > 0)) throw std::invalid_argument("groeneveld_check: activity must be positive");
  const PairPotential pot = PairPotential::soft_core(diameter, epsilon);
  MayerCoefficients eng(pot, ThermoState{beta, 1}, spec);

  const SeriesValue s = eng.rho(n, q, z, P);
  const double bound = std::pow(z, n) * boltzmann_weight(pot, beta, q);

  bool signs_ok = true;
  double sign = -1.0;  // first correction above leading order
  for (int p = n; p <= P; ++p) {
    const auto c = eng.coeff(n, p, q);
    if (sign * c.value < 0.0) signs_ok = false;
    sign = -sign;
  }

  ResidualReport rep;
  rep.equation = "Groeneveld";
  rep.n = n;
  for (const auto& pt : q) rep.location.push_back(pt[0]);
  rep.residual = s.value - bound;
  rep.components.tail = s.tail;
  rep.components.quad = s.quad;
  rep.budget = rep.components.total();
  rep.pass = signs_ok && (s.value + rep.budget < bound);
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence sweep
// ---------------------------------------------------------------------------

struct SweepPlan {
  std::vector<double> epsilons;  // strictly decreasing sharpness sequence
  std::vector<double> x_grid;    // pair separations, all strictly beyond the core
  double drive_value = 0.005;    // shared activity, or target density
  bool fix_density = false;      // true: invert the activity per sharpness
  int order = 3;                 // series truncation
  double beta = 600.0;
  double diameter = 1.0;
};

struct SweepPoint {
  double epsilon = 0.0;
  double x = 0.0;
  double rho2_eps = 0.0;   // smooth-core pair function at this sharpness
  double rho2_hard = 0.0;  // exact hard-rod pair function at matched drive
  double abs_error = 0.0;
  double budget = 0.0;  // series tail + quadrature of the smooth value
  bool radius_ok = true;
  bool groeneveld_ok = true;  // value + budget < z^2 (leading bound beyond the core)
};

struct SweepSummaryRow {
  double epsilon = 0.0;
  double sup_error = 0.0;
  double tail_budget = 0.0;  // worst point budget at this sharpness
  double z_used = 0.0;
  double rho_used = 0.0;
  bool radius_ok = true;
};

struct SweepTable {
  std::vector<SweepPoint> points;
  std::vector<SweepSummaryRow> summary;
};

// Density of the hard-rod gas at a given activity: R e^{R d} = z has the
// explicit solution R d = W0(z d), and rho = R / (1 + R d).
inline double tonks_density_from_activity(double z, double d) {
  if (!(z > 0) || !(d > 0))
    throw std::invalid_argument("tonks_density_from_activity: need z > 0 and d > 0");
  const double R = boost::math::lambert_w0(z * d) / d;
  return R / (1.0 + R * d);
}

inline SweepTable limit_sweep(const SweepPlan& plan, const QuadSpec& spec = {}) {
  SweepTable table;
  if (plan.epsilons.empty()) return table;

  for (std::size_t i = 0; i + 1 < plan.epsilons.size(); ++i)
    if (!(plan.epsilons[i] > plan.epsilons[i + 1]))
      throw std::invalid_argument("limit_sweep: sharpness sequence must decrease strictly");
  if (plan.x_grid.empty()) throw std::invalid_argument("limit_sweep: empty separation grid");
  for (double x : plan.x_grid)
    if (!(x > plan.diameter))
      throw std::invalid_argument("limit_sweep: grid must stay strictly beyond the core");
  if (plan.order < 1) throw std::invalid_argument("limit_sweep: series order must be >= 1");
  if (!(plan.drive_value > 0)) throw std::invalid_argument("limit_sweep: drive must be positive");

  // Envelope admissible uniformly in the sharpness: the Mayer mass of every
  // member of the family is below twice the core length, so xi = |z| e must
  // stay under 1 / (2 e * 2 d).
  const double xi_uniform_cap = 1.0 / (4.0 * M_E * plan.diameter);
  if (!plan.fix_density && plan.drive_value * M_E >= xi_uniform_cap)
    throw std::invalid_argument("limit_sweep: activity too large for the uniform envelope");

  // Hard-rod side at matched drive.
  const double rho_hard = plan.fix_density
                              ? plan.drive_value
                              : tonks_density_from_activity(plan.drive_value, plan.diameter);
  const auto tonks = hardrod::tonks_constants(rho_hard, plan.diameter);

  for (double eps : plan.epsilons) {
    MayerCoefficients eng(PairPotential::soft_core(plan.diameter, eps), ThermoState{plan.beta, 1},
                          spec);
    const double z = plan.fix_density ? eng.invert_activity(plan.drive_value, plan.order)
                                      : plan.drive_value;
    const bool radius_ok = std::abs(z) < eng.z_radius();

    SweepSummaryRow row;
    row.epsilon = eps;
    row.z_used = z;
    row.rho_used = eng.rho(1, {vec1(0.0)}, z, plan.order).value;
    row.radius_ok = radius_ok;

    for (double x : plan.x_grid) {
      SweepPoint pt;
      pt.epsilon = eps;
      pt.x = x;
      const SeriesValue s = eng.rho(2, {vec1(0.0), vec1(x)}, z, plan.order);
      pt.rho2_eps = s.value;
      pt.rho2_hard = hardrod::tonks_rhon(tonks, {0.0, x});
      pt.abs_error = std::abs(pt.rho2_eps - pt.rho2_hard);
      pt.budget = s.budget();
      pt.radius_ok = radius_ok;
      pt.groeneveld_ok = s.value + pt.budget < z * z;  // core weight is 1 beyond d
      table.points.push_back(pt);

      row.sup_error = std::max(row.sup_error, pt.abs_error);
      row.tail_budget = std::max(row.tail_budget, pt.budget);
    }
    table.summary.push_back(row);
  }
  return table;
}

}  // namespace ksgas::hclimit
