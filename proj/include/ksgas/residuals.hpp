#pragma once

// Certified residuals of the equilibrium equations: the Kirkwood-Salsburg
// relation (plain and the two-anchor symmetric variant), the stationary
// positional hierarchy, and its full phase-space form under a Maxwellian
// momentum profile.  Every report carries an additive worst-case budget
// (series tails + quadrature + finite differences) and `pass` is the literal
// comparison |residual| <= budget, so a passing report certifies that the
// numerics are consistent with the exact identity holding for the true
// correlation functions the evaluator approximates.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ksgas/evaluator.hpp"
#include "ksgas/geometry.hpp"
#include "ksgas/hardrod.hpp"
#include "ksgas/potential.hpp"
#include "ksgas/quadrature.hpp"
#include "ksgas/report.hpp"

namespace ksgas {

namespace detail_res {

// Abscissae where a 1-D integrand coupling `anchor` to the fixed points can
// lose smoothness: every kink radius around every participating point.
inline std::vector<double> axis_knots(const PairPotential& pot, const Vec& anchor,
                                      const Config& rest) {
  std::vector<double> ks{anchor[0]};
  for (const auto& pt : rest) ks.push_back(pt[0]);
  for (double kr : pot.kink_radii()) {
    ks.push_back(anchor[0] - kr);
    ks.push_back(anchor[0] + kr);
    for (const auto& pt : rest) {
      ks.push_back(pt[0] - kr);
      ks.push_back(pt[0] + kr);
    }
  }
  return ks;
}

inline std::vector<double> flatten(const Config& q, int nu) {
  std::vector<double> v;
  v.reserve(q.size() * static_cast<std::size_t>(nu));
  for (const auto& pt : q)
    for (int c = 0; c < nu; ++c) v.push_back(pt[c]);
  return v;
}

inline double noise_floor(double scale) {
  return 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(scale));
}

}  // namespace detail_res

// ---------------------------------------------------------------------------
// Insertion sums
// ---------------------------------------------------------------------------

// sum_{m=1}^{m_max} ((-1)^m / m!) int prod_j f(anchor - y_j) rho_{s+m}(rest,Y)
// where s = |rest| and f is the Mayer function of the evaluator's potential.
// `tail` bounds the dropped m > m_max against the true correlation functions
// via |rho_k| <= xi^k and int |f| <= I; `quad` collects rule errors plus the
// inner-evaluation budgets swept through the |f| mass.
struct InsertionSum {
  double value = 0.0;
  double quad = 0.0;
  double tail = 0.0;
  int m_used = 0;
  double budget() const { return quad + tail; }
};

inline InsertionSum insertion_sum(CorrelationEvaluator& ev, const Vec& anchor, const Config& rest,
                                  int m_max, const QuadSpec& spec = {}, int inner_excess = 1) {
  if (m_max < 0) throw std::invalid_argument("insertion_sum: m_max must be nonnegative");
  const PairPotential& pot = ev.potential();
  const ThermoState& st = ev.state();
  const double iub = ev.i_upper();
  const double xi = ev.xi_bound();
  const int s = static_cast<int>(rest.size());

  InsertionSum out;
  out.m_used = m_max;

  const bool hard_rod_line = pot.hard_core() && st.nu == 1;

  // Tail of the m-sum over the true series.  For 1-D hard cores every term
  // with m >= 3 vanishes identically (three points pairwise >= d apart do not
  // fit in an open interval of width 2d), so m_max >= 2 leaves no tail.
  if (!(hard_rod_line && m_max >= 2) && iub > 0.0) {
    const int kCutoff = m_max + 60;
    double fac = 1.0, pw = 1.0, last = 0.0;
    for (int m = 1; m <= kCutoff; ++m) {
      fac *= m;
      pw *= iub * xi;
      const double t = pw / fac * std::pow(xi, s);
      if (m > m_max && !(hard_rod_line && m >= 3)) {
        out.tail += t;
        last = t;
      }
    }
    // Factorial closeout for everything beyond the explicit window.
    const double r = iub * xi / (kCutoff + 1);
    if (r < 1.0) out.tail += last * r / (1.0 - r);
  }

  const double radius = pot.support_radius(st.beta);
  if (m_max == 0 || iub == 0.0 || radius <= 0.0) return out;

  if (hard_rod_line) {
    const double d = pot.diameter();
    std::vector<double> rx;
    rx.reserve(rest.size());
    for (const auto& pt : rest) rx.push_back(pt[0]);
    const auto segs = hardrod::detail::free_intervals(anchor[0], d, rx);

    auto inner_val = [&](const std::vector<double>& ys) {
      Config qq = rest;
      for (double y : ys) qq.push_back(vec1(y));
      return ev.rho(s + static_cast<int>(ys.size()), qq);
    };

    // The Mayer factor is exactly 1 on the ball, so each term reduces to
    // (-1)^m / m! times the integral of rho_{s+m} over the allowed region.
    // m = 1 therefore subtracts.
    {
      double max_budget = 0.0, len = 0.0, value = 0.0, rule = 0.0;
      for (const auto& [lo, hi] : segs) {
        if (!(hi > lo)) continue;
        len += hi - lo;
        auto g = [&](double y) {
          const SeriesValue r = inner_val({y});
          max_budget = std::max(max_budget, r.budget());
          return r.value;
        };
        const QuadResult r =
            integrate_radial(g, lo, hi, hardrod::detail::lattice_knots(rx, d, lo, hi), spec);
        value += r.value;
        rule += r.error;
      }
      out.value -= value;
      out.quad += rule + len * max_budget;
    }

    // m = 2 adds: the two inserted points must also be >= d apart; integrate
    // the ordered region and drop the 1/2! against the 2 orderings.
    if (m_max >= 2) {
      double max_budget = 0.0, outer_len = 0.0, inner_len_max = 0.0;
      double value = 0.0, outer_rule = 0.0, inner_rule_max = 0.0;
      for (const auto& [lo1, hi1] : segs) {
        if (!(hi1 > lo1)) continue;
        outer_len += hi1 - lo1;
        auto outer = [&](double y1) {
          double acc = 0.0, ilen = 0.0, irule = 0.0;
          for (const auto& [lo2, hi2] : segs) {
            const double lo = std::max(lo2, y1 + d);
            if (!(hi2 > lo)) continue;
            ilen += hi2 - lo;
            std::vector<double> kx = rx;
            kx.push_back(y1);
            auto g = [&](double y2) {
              const SeriesValue r = inner_val({y1, y2});
              max_budget = std::max(max_budget, r.budget());
              return r.value;
            };
            const QuadResult r =
                integrate_radial(g, lo, hi2, hardrod::detail::lattice_knots(kx, d, lo, hi2), spec);
            acc += r.value;
            irule += r.error;
          }
          inner_len_max = std::max(inner_len_max, ilen);
          inner_rule_max = std::max(inner_rule_max, irule);
          return acc;
        };
        const QuadResult r = integrate_radial(
            outer, lo1, hi1, hardrod::detail::lattice_knots(rx, d, lo1, hi1), spec);
        value += r.value;
        outer_rule += r.error;
      }
      out.value += value;
      out.quad += outer_rule + outer_len * (inner_rule_max + inner_len_max * max_budget);
    }
    return out;
  }

  // Smooth potentials: m-fold tensor insertions around the anchor, with the
  // same excess-based tolerance relaxation the coefficient recursion uses
  // (deeper terms carry smaller weights).
  double mfact = 1.0;
  for (int m = 1; m <= m_max; ++m) {
    mfact *= m;
    double max_inner_budget = 0.0;
    auto g = [&](const Config& ys) {
      double fp = 1.0;
      for (const auto& y : ys) fp *= mayer_f(pot, st.beta, anchor - y);
      if (fp == 0.0) return 0.0;
      Config qq = rest;
      qq.insert(qq.end(), ys.begin(), ys.end());
      const int nn = s + m;
      const SeriesValue r = ev.rho_at(nn, qq, nn == 1 ? 3 : inner_excess);
      max_inner_budget = std::max(max_inner_budget, r.budget());
      return fp * r.value;
    };

    QuadSpec local = spec;
    if (m >= 2) {
      const double relax = std::pow(10.0, std::min(2.0 * (m - 1), 6.0));
      local.abs_tol *= relax;
      local.rel_tol *= relax;
    }

    QuadResult r;
    if (st.nu == 1) {
      r = integrate_cluster_gl(g, anchor, radius, m, detail_res::axis_knots(pot, anchor, rest),
                               local);
    } else {
      auto radial = [&](double rr) { return mayer_f(pot, st.beta, rr); };
      r = integrate_cluster_mc(g, anchor, radius, m, st.nu, radial, local,
                               "ins:" + std::to_string(m));
    }

    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    out.value += sign / mfact * r.value;

    double tail_term = 0.0;
    const double st_bound = pot.support_tail_bound(st.beta, st.nu);
    if (st_bound > 0.0)
      tail_term = m * st_bound * std::pow(iub, m - 1) *
                  (std::pow(xi, s + m) + max_inner_budget);
    out.quad += (r.error + std::pow(iub, m) * max_inner_budget + tail_term) / mfact;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kirkwood-Salsburg residual
// ---------------------------------------------------------------------------

// rho_n(q) - z e^{-beta W_{q1}(rest)} [rho_{n-1}(rest) + insertion sum].
// For n = 1 the bracket's first term is 1, i.e. the right side reads z times
// the denominator structure that activity_from_state inverts.
inline ResidualReport ks_residual(CorrelationEvaluator& ev, const Config& q, int m_max = 2,
                                  const QuadSpec& spec = {}) {
  const int n = static_cast<int>(q.size());
  if (n < 1) throw std::invalid_argument("ks_residual: empty configuration");
  const PairPotential& pot = ev.potential();
  const ThermoState& st = ev.state();
  const double z = ev.activity();

  const Vec anchor = q.front();
  const Config rest(q.begin() + 1, q.end());

  const SeriesValue lhs = ev.rho(n, q);

  const double w = w_energy(pot, anchor, rest);
  const double weight = std::isinf(w) ? 0.0 : std::exp(-st.beta * w);

  SeriesValue lead{1.0, 0.0, 0.0};
  if (n >= 2) lead = ev.rho_at(n - 1, rest, n == 2 ? 3 : 2);

  InsertionSum ins;
  if (weight > 0.0) ins = insertion_sum(ev, anchor, rest, m_max, spec);

  const double rhs = z * weight * (lead.value + ins.value);

  ErrorBudget parts;
  parts.tail = lhs.tail + std::abs(z) * weight * (lead.tail + ins.tail);
  parts.quad = lhs.quad + std::abs(z) * weight * (lead.quad + ins.quad) +
               detail_res::noise_floor(std::abs(lhs.value) + std::abs(rhs));
  return make_report("KS", n, detail_res::flatten(q, st.nu), lhs.value - rhs, parts);
}

// ---------------------------------------------------------------------------
// Symmetric two-anchor Kirkwood-Salsburg residual
// ---------------------------------------------------------------------------

// Both sides of the identity share the prefactor
//   e^{-beta (W_{q0}(rest) + W_{q1}(rest))},
// and the e^{+beta W(Y)} factors inside the integrals cancel against the
// anchored Boltzmann weight of the correlation series, leaving the
// anchor-stripped bracket series.  No e^{+beta phi(q0-q1)} ever appears, so
// the check stays well-conditioned even when the two anchors collide.
inline ResidualReport ks_symmetric_residual(MayerEvaluator& ev, const Config& q, const Vec& q0,
                                            int k_max = 1, const QuadSpec& spec = {}) {
  const int n = static_cast<int>(q.size());
  if (n < 1) throw std::invalid_argument("ks_symmetric_residual: empty configuration");
  MayerCoefficients& eng = ev.engine();
  const PairPotential& pot = ev.potential();
  const ThermoState& st = ev.state();
  const double z = ev.activity();
  const double xi = ev.xi_bound();
  const double iub = ev.i_upper();
  const int P = ev.order();

  const Vec q1 = q.front();
  const Config rest(q.begin() + 1, q.end());

  const double wa = w_energy(pot, q0, rest);
  const double wb = w_energy(pot, q1, rest);
  const double pref =
      (std::isinf(wa) || std::isinf(wb)) ? 0.0 : std::exp(-st.beta * (wa + wb));

  struct Side {
    double value = 0.0, quad = 0.0, tail = 0.0;
  };

  const double radius = pot.support_radius(st.beta);

  auto side = [&](const Vec& ins_anchor, const Vec& brk_anchor) -> Side {
    Side out;
    // k = 0 term: the bracket series of the opposite anchor over `rest`.
    const int lead_order = std::min(P, static_cast<int>(rest.size()) + 2);
    const SeriesValue lead = eng.bracket_series(brk_anchor, rest, z, lead_order);
    out.value = lead.value;
    out.quad = lead.quad;
    out.tail = lead.tail;

    double kfact = 1.0;
    for (int k = 1; k <= k_max && iub > 0.0 && radius > 0.0; ++k) {
      kfact *= k;
      double max_inner_budget = 0.0;
      auto g = [&](const Config& ys) {
        double fp = 1.0;
        for (const auto& y : ys) fp *= mayer_f(pot, st.beta, ins_anchor - y);
        if (fp == 0.0) return 0.0;
        Config m = rest;
        m.insert(m.end(), ys.begin(), ys.end());
        const int inner_order = std::min(P, static_cast<int>(m.size()) + 1);
        const SeriesValue b = eng.bracket_series(brk_anchor, m, z, inner_order);
        max_inner_budget = std::max(max_inner_budget, b.budget());
        return fp * b.value;
      };

      QuadSpec local = spec;
      if (k >= 2) {
        const double relax = std::pow(10.0, std::min(2.0 * (k - 1), 6.0));
        local.abs_tol *= relax;
        local.rel_tol *= relax;
      }

      Config coupled = rest;
      coupled.push_back(brk_anchor);
      QuadResult r;
      if (st.nu == 1) {
        r = integrate_cluster_gl(g, ins_anchor, radius, k,
                                 detail_res::axis_knots(pot, ins_anchor, coupled), local);
      } else {
        auto radial = [&](double rr) { return mayer_f(pot, st.beta, rr); };
        r = integrate_cluster_mc(g, ins_anchor, radius, k, st.nu, radial, local,
                                 "sym:" + std::to_string(k));
      }

      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      out.value += sign / kfact * r.value;

      double tail_term = 0.0;
      const double st_bound = pot.support_tail_bound(st.beta, st.nu);
      if (st_bound > 0.0)
        tail_term = k * st_bound * std::pow(iub, k - 1) *
                    (std::pow(xi, n + k) + max_inner_budget);
      out.quad += (r.error + std::pow(iub, k) * max_inner_budget + tail_term) / kfact;
    }

    // Dropped k > k_max against the true series: |S_B(rest,Y)| <= xi^{n+k}.
    if (iub > 0.0) {
      const int kCutoff = k_max + 60;
      double fac = 1.0, pw = 1.0, last = 0.0;
      for (int k = 1; k <= kCutoff; ++k) {
        fac *= k;
        pw *= iub * xi;
        if (k > k_max) {
          last = pw / fac * std::pow(xi, n);
          out.tail += last;
        }
      }
      const double r = iub * xi / (kCutoff + 1);
      if (r < 1.0) out.tail += last * r / (1.0 - r);
    }
    return out;
  };

  const Side a = side(q0, q1);
  const Side b = side(q1, q0);

  const double residual = pref * (a.value - b.value);
  ErrorBudget parts;
  parts.tail = pref * (a.tail + b.tail);
  parts.quad = pref * (a.quad + b.quad) +
               detail_res::noise_floor(pref * (std::abs(a.value) + std::abs(b.value)));

  std::vector<double> loc = detail_res::flatten(q, st.nu);
  for (int c = 0; c < st.nu; ++c) loc.push_back(q0[c]);
  return make_report("KS_symmetric", n, std::move(loc), residual, parts);
}

// ---------------------------------------------------------------------------
// Stationary positional hierarchy
// ---------------------------------------------------------------------------

namespace detail_res {

struct HierarchyComponent {
  double residual = 0.0;
  double fd = 0.0;
  double quad = 0.0;
};

// Residual of grad rho_n + beta [grad W rho_n + int grad phi rho_{n+1}] in
// one coordinate of the leading particle.  The truncated family satisfies
// the identity order by order in z, so no series tails enter: the budget is
// finite differences plus quadrature only, provided rho_{n+1} is evaluated
// at the same truncation order (which ev.rho does).
inline HierarchyComponent hierarchy_component(CorrelationEvaluator& ev, const Config& q, int comp,
                                              double h, const QuadSpec& spec) {
  const PairPotential& pot = ev.potential();
  const ThermoState& st = ev.state();
  const int n = static_cast<int>(q.size());

  auto rho_shift = [&](double delta) {
    Config qq = q;
    qq[0][comp] += delta;
    return ev.rho(n, qq);
  };

  const SeriesValue rp = rho_shift(h);
  const SeriesValue rm = rho_shift(-h);
  const SeriesValue rp2 = rho_shift(h / 2);
  const SeriesValue rm2 = rho_shift(-h / 2);
  const double d1 = (rp.value - rm.value) / (2 * h);
  const double d2 = (rp2.value - rm2.value) / h;
  const double grad = (4 * d2 - d1) / 3;

  const double stencil_quad =
      std::max(std::max(rp.quad, rm.quad), std::max(rp2.quad, rm2.quad));

  HierarchyComponent out;
  out.fd = std::abs(d2 - d1) / 3 + 3 * stencil_quad / h +
           kPositionQuantum / h * (std::abs(d1) + std::abs(d2)) +
           noise_floor(std::abs(grad));

  const SeriesValue center = ev.rho(n, q);

  // Analytic gradient of the anchored interaction energy.
  double gw = 0.0;
  for (int j = 1; j < n; ++j) {
    const Vec u = q[0] - q[j];
    const double r = norm(u);
    if (r > 0.0) gw += pot.dphi(r) * (u[comp] / r);
  }

  // int grad_c phi(q1 - y) rho_{n+1}(q, y) dy over the support of grad phi.
  double integral = 0.0, rule = 0.0, max_inner_quad = 0.0;
  const double radius = pot.support_radius(st.beta);
  double j_upper = 0.0;
  if (radius > 0.0) {
    const QuadResult jb = grad_phi_l1(pot, st, spec);
    j_upper = jb.value + jb.error;
    auto g = [&](const Config& ys) {
      const Vec u = q[0] - ys[0];
      const double r = norm(u);
      if (r == 0.0 || r >= radius) return 0.0;
      Config qq = q;
      qq.push_back(ys[0]);
      const SeriesValue inner = ev.rho(n + 1, qq);
      max_inner_quad = std::max(max_inner_quad, inner.quad);
      return pot.dphi(r) * (u[comp] / r) * inner.value;
    };
    QuadResult r;
    if (st.nu == 1) {
      Config others(q.begin() + 1, q.end());
      r = integrate_cluster_gl(g, q[0], radius, 1, axis_knots(pot, q[0], others), spec);
    } else {
      auto radial = [&](double rr) { return std::abs(pot.dphi(rr)); };
      r = integrate_cluster_mc(g, q[0], radius, 1, st.nu, radial, spec, "grad");
    }
    integral = r.value;
    rule = r.error;
  }

  out.residual = grad + st.beta * (gw * center.value + integral);
  out.quad = st.beta * (std::abs(gw) * center.quad + rule + j_upper * max_inner_quad) +
             noise_floor(std::abs(out.residual));
  return out;
}

}  // namespace detail_res

// Max-norm residual of the positional hierarchy at the leading particle of
// `q`; the reported component is the one with the worst pass margin, so the
// report passes exactly when every component does.
inline ResidualReport bbgky_residual(CorrelationEvaluator& ev, const Config& q, double h = 1e-4,
                                     const QuadSpec& spec = {}) {
  const int n = static_cast<int>(q.size());
  if (n < 1) throw std::invalid_argument("bbgky_residual: empty configuration");
  if (!(h > 0)) throw std::invalid_argument("bbgky_residual: step must be positive");
  const PairPotential& pot = ev.potential();
  const ThermoState& st = ev.state();
  if (pot.hard_core())
    throw std::domain_error("bbgky_residual: gradient form requires a differentiable potential");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (norm(q[i] - q[j]) == 0.0)
        throw std::domain_error("bbgky_residual: configuration points must be distinct");

  double worst_margin = -std::numeric_limits<double>::infinity();
  detail_res::HierarchyComponent worst;
  for (int c = 0; c < st.nu; ++c) {
    const auto hc = detail_res::hierarchy_component(ev, q, c, h, spec);
    const double margin = std::abs(hc.residual) - (hc.fd + hc.quad);
    if (margin > worst_margin) {
      worst_margin = margin;
      worst = hc;
    }
  }

  ErrorBudget parts;
  parts.fd = worst.fd;
  parts.quad = worst.quad;
  return make_report("BBGKY_positional", n, detail_res::flatten(q, st.nu), worst.residual, parts);
}

// ---------------------------------------------------------------------------
// Full stationary phase-space form
// ---------------------------------------------------------------------------

// With the Maxwellian momentum profile M(p) = prod_i e^{-beta |p_i|^2 / 2} /
// (2 pi / beta)^{nu/2}, all momentum derivatives are analytic and the full
// equation collapses to M(p) sum_i p_i . (positional residual anchored at
// particle i).  Momenta are arbitrary finite vectors.
inline ResidualReport bogolyubov_residual(CorrelationEvaluator& ev, const Config& q,
                                          const Config& momenta, double h = 1e-4,
                                          const QuadSpec& spec = {}) {
  const int n = static_cast<int>(q.size());
  if (n < 1) throw std::invalid_argument("bogolyubov_residual: empty configuration");
  if (momenta.size() != q.size())
    throw std::invalid_argument("bogolyubov_residual: need one momentum per particle");
  const PairPotential& pot = ev.potential();
  const ThermoState& st = ev.state();
  if (pot.hard_core())
    throw std::domain_error(
        "bogolyubov_residual: gradient form requires a differentiable potential");

  double maxwell = 1.0;
  for (const auto& p : momenta) {
    double p2 = 0.0;
    for (int c = 0; c < st.nu; ++c) p2 += p[c] * p[c];
    maxwell *= std::exp(-st.beta * p2 / 2) / std::pow(2 * M_PI / st.beta, st.nu / 2.0);
  }

  double residual = 0.0, fd = 0.0, quad = 0.0;
  for (int i = 0; i < n; ++i) {
    bool needed = false;
    for (int c = 0; c < st.nu; ++c) needed = needed || momenta[i][c] != 0.0;
    if (!needed) continue;

    Config rotated;
    rotated.reserve(q.size());
    rotated.push_back(q[i]);
    for (int j = 0; j < n; ++j)
      if (j != i) rotated.push_back(q[j]);

    for (int c = 0; c < st.nu; ++c) {
      const double pc = momenta[i][c];
      if (pc == 0.0) continue;
      const auto hc = detail_res::hierarchy_component(ev, rotated, c, h, spec);
      residual += pc * hc.residual;
      fd += std::abs(pc) * hc.fd;
      quad += std::abs(pc) * hc.quad;
    }
  }

  ErrorBudget parts;
  parts.fd = maxwell * fd;
  parts.quad = maxwell * quad + detail_res::noise_floor(maxwell * std::abs(residual));

  std::vector<double> loc = detail_res::flatten(q, st.nu);
  const auto ploc = detail_res::flatten(momenta, st.nu);
  loc.insert(loc.end(), ploc.begin(), ploc.end());
  return make_report("Bogolyubov", n, std::move(loc), maxwell * residual, parts);
}

// ---------------------------------------------------------------------------
// Closed-form iteration tail and cluster decay
// ---------------------------------------------------------------------------

// (1/N!) |q1 - q0| (3 I)^N J xi^{n+1+N}, evaluated as a running product so
// the factorial never overflows.
inline double iteration_tail(int N, int n, double dist, double i_beta, double j_beta, double xi) {
  if (N < 0) throw std::invalid_argument("iteration_tail: N must be nonnegative");
  if (xi == 0.0) return 0.0;
  double v = dist * j_beta * std::pow(xi, n + 1);
  for (int k = 1; k <= N; ++k) v *= 3.0 * i_beta * xi / k;
  return v;
}

// |rho_{nA+nB}(A, B shifted by s) - rho_{nA}(A) rho_{nB}(B)| for canonical
// line clusters whose nearest points are `s` apart.
inline double cluster_gap(CorrelationEvaluator& ev, int nA, int nB, double s) {
  if (nA < 1 || nB < 1) throw std::invalid_argument("cluster_gap: cluster sizes must be >= 1");
  const double step = std::max(1.5 * ev.potential().diameter(), 1.5);
  Config a, b;
  for (int i = 0; i < nA; ++i) a.push_back(vec1(i * step));
  const double start = (nA - 1) * step + s;
  for (int j = 0; j < nB; ++j) b.push_back(vec1(start + j * step));
  Config joint = a;
  joint.insert(joint.end(), b.begin(), b.end());
  const double together = ev.rho(nA + nB, joint).value;
  const double apart = ev.rho(nA, a).value * ev.rho(nB, b).value;
  return std::abs(together - apart);
}

// ---------------------------------------------------------------------------
// Activity from the one-point function
// ---------------------------------------------------------------------------

// Inverts the n = 1 Kirkwood-Salsburg relation rho_1 = z D, where D is one
// plus the insertion sum at an empty rest configuration.  Positivity of the
// denominator within its budget is part of the certificate.
struct ActivityEstimate {
  double z = 0.0;
  double denominator = 0.0;
  double budget = 0.0;
};

inline ActivityEstimate activity_from_state(CorrelationEvaluator& ev, int k_max = 2,
                                            const QuadSpec& spec = {}) {
  const Vec origin = vec1(0.0);
  const SeriesValue r1 = ev.rho(1, {origin});
  const InsertionSum s = insertion_sum(ev, origin, {}, k_max, spec);
  const double denom = 1.0 + s.value;
  const double d_denom = s.budget();
  if (!(denom - d_denom > 0.0))
    throw std::runtime_error("activity_from_state: denominator not positive within budget");
  const double z = r1.value / denom;
  const double budget =
      (r1.budget() + std::abs(z) * d_denom) / (denom - d_denom) + detail_res::noise_floor(z);
  return {z, denom, budget};
}

}  // namespace ksgas
