#pragma once

// Exact equilibrium correlations of the one-dimensional hard-rod (Tonks) gas
// and residual checks of the relations they satisfy: the contact hierarchy,
// the extracted-constant fixed point, and the hard-core Kirkwood-Salsburg
// equations.  Everything here is athermal: no inverse temperature appears.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ksgas/quadrature.hpp"
#include "ksgas/report.hpp"

namespace ksgas::hardrod {

struct TonksParams {
  double rho = 0.0;  // number density
  double d = 1.0;    // rod length
  double R = 0.0;    // extracted constant rho/(1 - rho d)
  double z = 0.0;    // activity R e^{R d}
};

inline TonksParams tonks_constants(double rho, double d) {
  if (!(rho > 0) || !(d > 0) || !(rho * d < 1))
    throw std::invalid_argument("tonks_constants: need rho > 0, d > 0, rho*d < 1");
  TonksParams p;
  p.rho = rho;
  p.d = d;
  p.R = rho / (1 - rho * d);
  p.z = p.R * std::exp(p.R * d);
  return p;
}

// Inverse of z = R e^{R d} by Newton iteration; unique positive root.
inline double solve_R_from_z(double z, double d) {
  if (!(z > 0) || !(d > 0)) throw std::invalid_argument("solve_R_from_z: need z > 0, d > 0");
  double R = z / (1 + z * d);  // starting guess below the root
  for (int it = 0; it < 100; ++it) {
    const double e = std::exp(R * d);
    const double f = R * e - z;
    const double df = e * (1 + R * d);
    const double step = f / df;
    R -= step;
    if (std::abs(step) < 1e-15 * (1 + std::abs(R))) return R;
  }
  throw std::runtime_error("solve_R_from_z: Newton did not converge");
}

inline TonksParams tonks_from_activity(double z, double d) {
  const double R = solve_R_from_z(z, d);
  return tonks_constants(R / (1 + R * d), d);
}

// Pair correlation at separation x:
//   rho2(x) = rho sum_{k=1}^{floor(x/d)} R^k (x-kd)^{k-1}/(k-1)! e^{-(x-kd)R}.
inline double tonks_rho2(const TonksParams& p, double x) {
  x = std::abs(x);
  if (x < p.d) return 0.0;
  const int kmax = static_cast<int>(std::floor(x / p.d + 1e-12));
  double sum = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    const double u = x - k * p.d;
    if (u < 0) break;
    double term = p.R * std::exp(-u * p.R);
    for (int j = 1; j < k; ++j) term *= p.R * u / j;
    sum += term;
  }
  return p.rho * sum;
}

// n-point function via the nearest-neighbour product representation:
//   rho_n = rho^{-(n-2)} prod_j rho2(q_{j+1} - q_j) over the sorted points.
inline double tonks_rhon(const TonksParams& p, std::vector<double> q) {
  if (q.empty()) return 1.0;
  if (q.size() == 1) return p.rho;
  std::sort(q.begin(), q.end());
  double v = std::pow(p.rho, -(static_cast<int>(q.size()) - 2));
  for (std::size_t j = 0; j + 1 < q.size(); ++j) {
    const double r2 = tonks_rho2(p, q[j + 1] - q[j]);
    if (r2 == 0.0) return 0.0;
    v *= r2;
  }
  return v;
}

namespace detail {

// Distance from every pairwise separation to the nearest multiple of d; used
// to keep finite differences and indicator factors inside one smooth piece.
inline double knot_clearance(const std::vector<double>& q, double d) {
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      const double s = std::abs(q[i] - q[j]) / d;
      c = std::min(c, std::abs(s - std::round(s)) * d);
    }
  return c;
}

// Segments of (c - d, c + d) at distance > d from every excluded point.
inline std::vector<std::pair<double, double>> free_intervals(double c, double d,
                                                             const std::vector<double>& excl) {
  std::vector<std::pair<double, double>> segs{{c - d, c + d}};
  for (double e : excl) {
    std::vector<std::pair<double, double>> next;
    for (auto [lo, hi] : segs) {
      const double blo = e - d, bhi = e + d;
      if (bhi <= lo || blo >= hi) {
        next.emplace_back(lo, hi);
        continue;
      }
      if (blo > lo) next.emplace_back(lo, blo);
      if (bhi < hi) next.emplace_back(bhi, hi);
    }
    segs = std::move(next);
  }
  std::vector<std::pair<double, double>> out;
  for (auto s : segs)
    if (s.second - s.first > 1e-13) out.push_back(s);
  return out;
}

inline std::vector<double> lattice_knots(const std::vector<double>& centres, double d, double lo,
                                         double hi) {
  std::vector<double> ks;
  for (double c : centres)
    for (int k = -8; k <= 8; ++k) {
      const double x = c + k * d;
      if (x > lo && x < hi) ks.push_back(x);
    }
  return ks;
}

}  // namespace detail

// Contact form of the stationary hierarchy:
//   d rho_n / d q1 = chi_- rho_{n+1}(q, q1 - d) - chi_+ rho_{n+1}(q, q1 + d),
// with chi_+- requiring the inserted contact point to clear every other rod.
// The derivative is a Richardson-extrapolated central difference.
inline ResidualReport hierarchy_residual(const TonksParams& p, const std::vector<double>& q,
                                         double h = 1e-5) {
  if (q.size() < 1) throw std::invalid_argument("hierarchy_residual: empty configuration");
  if (tonks_rhon(p, q) == 0.0)
    throw std::invalid_argument("hierarchy_residual: overlapping configuration");
  if (detail::knot_clearance(q, p.d) < 64 * h)
    throw std::invalid_argument("hierarchy_residual: configuration too close to a gap boundary");

  auto rho_at = [&](double x1) {
    std::vector<double> qq = q;
    qq[0] = x1;
    return tonks_rhon(p, qq);
  };
  const double d1 = (rho_at(q[0] + h) - rho_at(q[0] - h)) / (2 * h);
  const double d2 = (rho_at(q[0] + h / 2) - rho_at(q[0] - h / 2)) / h;
  const double deriv = (4 * d2 - d1) / 3;
  const double fd_err = std::abs(d2 - d1) / 3 +
                        64 * std::numeric_limits<double>::epsilon() * std::abs(rho_at(q[0])) / h;

  auto admissible = [&](double y) {
    for (std::size_t i = 1; i < q.size(); ++i)
      if (std::abs(y - q[i]) < p.d) return false;
    return true;
  };
  auto inserted = [&](double y) {
    std::vector<double> qq = q;
    qq.push_back(y);
    return tonks_rhon(p, qq);
  };
  const double gain = admissible(q[0] - p.d) ? inserted(q[0] - p.d) : 0.0;
  const double loss = admissible(q[0] + p.d) ? inserted(q[0] + p.d) : 0.0;

  ErrorBudget parts;
  parts.fd = fd_err;
  return make_report("hardrod_hierarchy", static_cast<int>(q.size()), q,
                     deriv - (gain - loss), parts);
}

// Fixed point with the constant extracted:
//   rho_n = R [rho_{n-1}(q2..) - int_{q1}^{q1+d} chi(qbar <= q2 - d)
//              rho_n(qbar, q2, ...) dqbar]   for ordered configurations.
inline ResidualReport extracted_constant_residual(const TonksParams& p,
                                                  const std::vector<double>& q,
                                                  const QuadSpec& spec = {}) {
  if (q.empty()) throw std::invalid_argument("extracted_constant_residual: empty configuration");
  if (!std::is_sorted(q.begin(), q.end()))
    throw std::invalid_argument("extracted_constant_residual: configuration must be ordered");
  for (std::size_t j = 0; j + 1 < q.size(); ++j)
    if (q[j + 1] - q[j] < p.d - 1e-12)
      throw std::invalid_argument("extracted_constant_residual: overlapping configuration");

  const std::vector<double> rest(q.begin() + 1, q.end());
  const double lead = rest.empty() ? 1.0 : tonks_rhon(p, rest);

  const double lo = q[0];
  const double hi = q.size() > 1 ? std::min(q[0] + p.d, q[1] - p.d) : q[0] + p.d;
  double integral = 0.0, quad_err = 0.0;
  if (hi > lo) {
    auto f = [&](double qbar) {
      std::vector<double> qq = rest;
      qq.insert(qq.begin(), qbar);
      return tonks_rhon(p, qq);
    };
    const auto knots = detail::lattice_knots(rest, p.d, lo, hi);
    const QuadResult r = integrate_radial(f, lo, hi, knots, spec);
    integral = r.value;
    quad_err = r.error;
  }

  const double value = tonks_rhon(p, q);
  const double residual = value - p.R * (lead - integral);
  ErrorBudget parts;
  parts.quad = p.R * quad_err +
               1e3 * std::numeric_limits<double>::epsilon() * (std::abs(value) + p.R * std::abs(lead));
  return make_report("extracted_constant", static_cast<int>(q.size()), q, residual, parts);
}

// Hard-core Kirkwood-Salsburg equations in one dimension.  The insertion
// integrals run over the free region of the ball (q1 - d, q1 + d); pigeonhole
// caps the sum at two insertion points.
inline ResidualReport hc_ks_residual(const TonksParams& p, const std::vector<double>& q,
                                     const QuadSpec& spec = {}) {
  if (q.empty()) throw std::invalid_argument("hc_ks_residual: empty configuration");
  std::vector<double> qs = q;
  std::sort(qs.begin(), qs.end());
  for (std::size_t j = 0; j + 1 < qs.size(); ++j)
    if (qs[j + 1] - qs[j] < p.d - 1e-12)
      throw std::invalid_argument("hc_ks_residual: overlapping configuration");

  const double q1 = q[0];
  const std::vector<double> rest(q.begin() + 1, q.end());
  const double lead = rest.empty() ? 1.0 : tonks_rhon(p, rest);

  const auto segs = detail::free_intervals(q1, p.d, rest);
  double quad_err = 0.0;

  // m = 1 insertion.
  double m1 = 0.0;
  for (auto [lo, hi] : segs) {
    auto f = [&](double y) {
      std::vector<double> qq = rest;
      qq.push_back(y);
      return tonks_rhon(p, qq);
    };
    const auto knots = detail::lattice_knots(rest, p.d, lo, hi);
    const QuadResult r = integrate_radial(f, lo, hi, knots, spec);
    m1 += r.value;
    quad_err += r.error;
  }

  // m = 2 insertions: twice the ordered region y1 < y2 - d.
  double m2 = 0.0;
  for (auto [lo2, hi2] : segs) {
    double max_inner_err = 0.0;
    auto outer = [&](double y2) {
      double inner_sum = 0.0, inner_err = 0.0;
      for (auto [lo1, hi1] : segs) {
        const double hi_cut = std::min(hi1, y2 - p.d);
        if (hi_cut <= lo1) continue;
        auto f = [&](double y1) {
          std::vector<double> qq = rest;
          qq.push_back(y1);
          qq.push_back(y2);
          return tonks_rhon(p, qq);
        };
        std::vector<double> centres = rest;
        centres.push_back(y2);
        const auto knots = detail::lattice_knots(centres, p.d, lo1, hi_cut);
        const QuadResult inner = integrate_radial(f, lo1, hi_cut, knots, spec);
        inner_sum += inner.value;
        inner_err += inner.error;
      }
      max_inner_err = std::max(max_inner_err, inner_err);
      return inner_sum;
    };
    std::vector<double> centres = rest;
    for (auto s : segs) {
      centres.push_back(s.first);
      centres.push_back(s.second);
      centres.push_back(s.first + p.d);
      centres.push_back(s.second + p.d);
    }
    const auto knots = detail::lattice_knots(centres, p.d, lo2, hi2);
    const QuadResult r = integrate_radial(outer, lo2, hi2, knots, spec);
    m2 += 2 * r.value;
    quad_err += 2 * (r.error + (hi2 - lo2) * max_inner_err);
  }

  const double value = tonks_rhon(p, q);
  const double rhs = p.z * (lead - m1 + 0.5 * m2);
  ErrorBudget parts;
  parts.quad = p.z * quad_err + 1e3 * std::numeric_limits<double>::epsilon() *
                                    (std::abs(value) + p.z * (std::abs(lead) + m1 + m2));
  return make_report("hard_core_ks", static_cast<int>(q.size()), q, value - rhs, parts);
}

}  // namespace ksgas::hardrod
