#pragma once

// Recursive construction of the activity-series coefficients of the
// equilibrium correlation functions.  The family c_{n,p} (n points, order
// z^{p+1}) is defined by
//
//   c_{1,0} = 1,
//   c_{n,p+1}(q) = e^{-beta W_{q1}} [ c_{n-1,p}(q2..qn)            (n > 1)
//       + sum_{k>=1} (-1)^k/k! int dy1..dyk prod_i f(q1-yi)
//                    c_{n-1+k,p}(q2..qn, y1..yk) ],
//
// with f the Mayer function and W_{q1} the interaction energy of the first
// point with the rest.  Then rho_n(q) = sum_p c_{n,p}(q) z^{p+1}.
//
// Structural facts used throughout:
//   * c_{n,p} = 0 for p < n-1, so the k-sum is finite (k <= p + 1 - n when
//     computing order p);
//   * the lowest surviving order is the pure Boltzmann factor,
//     c_{n,n-1} = e^{-beta U_n}, reached without any quadrature;
//   * for nonnegative potentials |c_{n,p}| <= I^{1-n} (I e)^p with
//     I = int |f|, giving a geometric tail once |z| I e < 1.
//
// Internally every coefficient is stored in anchor-stripped ("bracket") form
//   B_{n,p}(q1; q2..qn) = c_{n,p} / e^{-beta W_{q1}},
// i.e. the square bracket of the recursion before the prefactor.  The split
// matters for the symmetric two-anchor consistency checks, which need the
// bracket with the exponentially small prefactor held out; multiplying the
// series value by e^{+beta W} instead would amplify quadrature noise by up
// to e^{beta phi(0)}.  B obeys the same geometric bound as c (the extra
// k-sum costs one factor of e, absorbed by lowering p by one), so all tail
// formulas are shared.
//
// Brackets are memoised on the canonical form of (anchor, rest): translated
// so the anchor sits at the origin, rest sorted, reflected (nu = 1) and
// quantized.  This makes every value reproducible bit for bit across runs
// and argument orderings.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ksgas/geometry.hpp"
#include "ksgas/potential.hpp"
#include "ksgas/quadrature.hpp"

namespace ksgas {

// A partial series sum together with the two sources of defect: the bound on
// all truncated orders (`tail`) and the accumulated numerical error of the
// kept orders (`quad`).
struct SeriesValue {
  double value = 0.0;
  double tail = 0.0;
  double quad = 0.0;
  double budget() const { return tail + quad; }
};

class MayerCoefficients {
 public:
  struct Coeff {
    double value = 0.0;
    double err = 0.0;  // accumulated quadrature / truncation error bound
  };

  MayerCoefficients(const PairPotential& pot, const ThermoState& state, const QuadSpec& spec = {})
      : pot_(pot), state_(state), spec_(spec) {
    const QuadResult i = i_beta(pot_, state_, spec_);
    i_value_ = i.value;
    i_error_ = i.error;
    support_radius_ = pot_.support_radius(state_.beta);
    support_tail_ = pot_.support_tail_bound(state_.beta, state_.nu);
  }

  const PairPotential& potential() const { return pot_; }
  const ThermoState& state() const { return state_; }
  const QuadSpec& quad_spec() const { return spec_; }

  double i_value() const { return i_value_; }
  double i_error() const { return i_error_; }
  double i_upper() const { return i_value_ + i_error_; }
  double support_radius() const { return support_radius_; }

  // |c_{n,p}| <= I^{1-n} (I e)^p  (only meaningful for p >= n-1).
  double coeff_bound(int n, int p) const {
    return std::pow(i_upper(), p + 1 - n) * std::pow(M_E, p);
  }

  // |z| below this makes the geometric coefficient tail summable.
  double z_radius() const { return 1.0 / (i_upper() * M_E); }

  // Envelope ratio admissible for iteration-tail bounds: xi = 1/(2 e I).
  double xi_admissible() const { return 1.0 / (2.0 * M_E * i_upper()); }

  // Bound on sum_{p>P} |c_{n,p}| |z|^{p+1} = |z| I^{1-n} a^{P+1} / (1-a),
  // a = |z| I e; infinite when a >= 1.  Also valid for bracket series.
  double series_tail(int n, double z, int P) const {
    const double a = std::abs(z) * i_upper() * M_E;
    if (a == 0.0) return P < n - 1 ? std::pow(std::abs(z), n) : 0.0;
    if (a >= 1.0) return std::numeric_limits<double>::infinity();
    return std::abs(z) * std::pow(i_upper(), 1 - n) * std::pow(a, P + 1) / (1.0 - a);
  }

  // c_{n,p} at configuration q (|q| == n; any order, any translate).
  Coeff coeff(int n, int p, const Config& q) {
    if (n < 1 || static_cast<int>(q.size()) != n)
      throw std::invalid_argument("coeff: configuration size must equal n");
    if (p < 0) throw std::invalid_argument("coeff: order must be nonnegative");
    if (p < n - 1) return {0.0, 0.0};  // exact structural zero
    if (n == 1 && p == 0) return {1.0, 0.0};

    // Quantize at entry so the entire recursion runs on the canonical grid;
    // all interior translations then stay on-grid and the value is exactly
    // invariant under permutation, translation and (nu = 1) reflection.
    const Config cq = canonical_config(q, state_.nu);
    const Vec anchor = cq.front();
    const Config rest(cq.begin() + 1, cq.end());
    const double w = w_energy(pot_, anchor, rest);
    if (std::isinf(w)) return {0.0, 0.0};  // hard-core overlap kills the prefactor
    const double weight = std::exp(-state_.beta * w);

    const Coeff b = bracket(n, p, anchor, rest);
    return {weight * b.value, weight * b.err};
  }

  // Anchor-stripped coefficient B_{n,p}(anchor; rest), |rest| == n-1.
  Coeff bracket(int n, int p, const Vec& anchor, const Config& rest) {
    if (n < 1 || static_cast<int>(rest.size()) != n - 1)
      throw std::invalid_argument("bracket: rest size must equal n-1");
    if (p < 0) throw std::invalid_argument("bracket: order must be nonnegative");
    if (p < n - 1) return {0.0, 0.0};
    if (n == 1 && p == 0) return {1.0, 0.0};

    // Leading order in closed form: B_{n,n-1} is the Boltzmann factor of the
    // pairs internal to `rest`, with no quadrature.  Deep tensor rules hit
    // this case at millions of distinct configurations, so it must not
    // occupy cache space (each entry would be used exactly once).
    if (p == n - 1) return {rest_pair_weight(rest), 0.0};

    const Config cr = anchored_canonical(anchor, rest);
    const std::string key = cache_key(n, p, cr);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    const Coeff out = compute_bracket(n, p, cr, key);
    cache_.emplace(key, out);
    return out;
  }

  // rho_n(q) summed through order z^{P+1}, with the dropped orders bounded by
  // the geometric envelope.
  SeriesValue rho(int n, const Config& q, double z, int P) {
    if (P < 0) throw std::invalid_argument("rho: truncation order must be nonnegative");
    SeriesValue s;
    double zp = 1.0;  // z^p
    for (int p = 0; p <= P; ++p) {
      if (p >= n - 1) {
        const Coeff c = coeff(n, p, q);
        s.value += c.value * zp * z;
        s.quad += c.err * std::abs(zp * z);
      }
      zp *= z;
    }
    s.tail = series_tail(n, z, P);
    return s;
  }

  // Bracket series sum_p B_{n,p}(anchor; rest) z^{p+1}; same tail envelope.
  SeriesValue bracket_series(const Vec& anchor, const Config& rest, double z, int P) {
    if (P < 0) throw std::invalid_argument("bracket_series: truncation order must be nonnegative");
    const int n = static_cast<int>(rest.size()) + 1;
    SeriesValue s;
    double zp = 1.0;
    for (int p = 0; p <= P; ++p) {
      if (p >= n - 1) {
        const Coeff b = bracket(n, p, anchor, rest);
        s.value += b.value * zp * z;
        s.quad += b.err * std::abs(zp * z);
      }
      zp *= z;
    }
    s.tail = series_tail(n, z, P);
    return s;
  }

  // Newton inversion of target = rho_1(z) on the truncated series.
  double invert_activity(double target_density, int P) {
    if (!(target_density > 0))
      throw std::invalid_argument("invert_activity: density must be positive");
    const Config origin{Vec{0.0, 0.0, 0.0}};
    std::vector<double> c(P + 1);
    for (int p = 0; p <= P; ++p) c[p] = coeff(1, p, origin).value;

    double z = target_density;
    for (int it = 0; it < 64; ++it) {
      double f = -target_density, df = 0.0, zp = 1.0;
      for (int p = 0; p <= P; ++p) {
        f += c[p] * zp * z;
        df += (p + 1) * c[p] * zp;
        zp *= z;
      }
      if (df == 0.0) break;
      const double step = f / df;
      z -= step;
      if (std::abs(step) <= 1e-12 * (1.0 + std::abs(z))) return z;
    }
    throw std::runtime_error("invert_activity: Newton iteration did not converge");
  }

  // Kinks of an insertion integrand along one axis (nu == 1): the Mayer
  // factor breaks at anchor +- d and the inner coefficient at q_j +- d.
  std::vector<double> insertion_knots(const Vec& anchor, const Config& rest) const {
    std::vector<double> ks;
    for (double r : pot_.kink_radii()) {
      ks.push_back(anchor[0] - r);
      ks.push_back(anchor[0] + r);
      for (const auto& pt : rest) {
        ks.push_back(pt[0] - r);
        ks.push_back(pt[0] + r);
      }
    }
    return ks;
  }

  std::size_t cache_size() const { return cache_.size(); }

 private:
  // Canonical form of (anchor, rest) under the symmetries of B: translate the
  // anchor to the origin, sort, reflect (radial potentials, nu = 1), quantize.
  Config anchored_canonical(const Vec& anchor, const Config& rest) const {
    Config m(rest);
    for (auto& pt : m) pt = pt - anchor;
    std::sort(m.begin(), m.end());
    if (state_.nu == 1 && !m.empty()) {
      Config r(m.rbegin(), m.rend());
      for (auto& pt : r) pt = -1.0 * pt;
      if (r < m) m = std::move(r);
    }
    for (auto& pt : m)
      for (double& x : pt) x = quantize(x);
    return m;
  }

  static std::string cache_key(int n, int p, const Config& rest) {
    std::string key;
    key.reserve(8 + rest.size() * 24);
    auto put = [&key](std::int64_t v) {
      key.append(reinterpret_cast<const char*>(&v), sizeof(v));
    };
    put(n);
    put(p);
    for (const auto& pt : rest)
      for (double x : pt) put(quantize_ticks(x));
    return key;
  }

  Coeff compute_bracket(int n, int p, const Config& rest, const std::string& key) {
    const Vec origin{0.0, 0.0, 0.0};
    const int pm1 = p - 1;

    double value = 0.0, err = 0.0;
    if (n > 1) {
      const Coeff base = coeff(n - 1, pm1, rest);
      value = base.value;
      err = base.err;
    }

    const int kmax = p + 1 - n;
    if (support_radius_ <= 0.0) return {value, err};  // no interaction: no insertions

    // Tolerance schedule: a coefficient at excess e = p+1-n enters rho only
    // with weight z^{p+1} <= z^{n+e}, so the deeper levels of the recursion
    // may integrate coarsely without moving the series budget.  The schedule
    // depends on (n, p) alone, keeping cached values call-order independent.
    QuadSpec local = spec_;
    if (kmax >= 2) {
      const double relax = std::pow(10.0, std::min(2.0 * (kmax - 1), 6.0));
      local.abs_tol *= relax;
      local.rel_tol *= relax;
    }

    double kfact = 1.0;
    for (int k = 1; k <= kmax; ++k) {
      kfact *= k;
      double max_inner_err = 0.0;
      auto g = [&](const Config& ys) {
        double fprod = 1.0;
        for (const auto& y : ys) fprod *= mayer_f(pot_, state_.beta, origin - y);
        if (fprod == 0.0) return 0.0;
        const Coeff inner = coeff(n - 1 + k, pm1, merged_config(rest, ys));
        max_inner_err = std::max(max_inner_err, inner.err);
        return fprod * inner.value;
      };

      QuadResult r;
      if (state_.nu == 1) {
        r = integrate_cluster_gl(g, origin, support_radius_, k, insertion_knots(origin, rest),
                                 local);
      } else {
        auto radial = [this](double rr) { return mayer_f(pot_, state_.beta, rr); };
        r = integrate_cluster_mc(g, origin, support_radius_, k, state_.nu, radial, local,
                                 mc_label(k, key));
      }

      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      value += sign / kfact * r.value;

      // Rule error, the inner-coefficient error swept through the |f| mass,
      // and the |f| mass ignored outside the support ball.
      const double iub = i_upper();
      double tail_term = 0.0;
      if (support_tail_ > 0.0)
        tail_term = k * support_tail_ * std::pow(iub, k - 1) * coeff_bound(n - 1 + k, pm1);
      err += (r.error + std::pow(iub, k) * max_inner_err + tail_term) / kfact;
    }

    return {value, err};
  }

  // exp(-beta sum_{i<j} phi(rest_i - rest_j)); zero on hard-core overlap.
  double rest_pair_weight(const Config& rest) const {
    double w = 0.0;
    for (std::size_t i = 0; i + 1 < rest.size(); ++i)
      for (std::size_t j = i + 1; j < rest.size(); ++j) {
        const double pij = pot_.phi(norm(rest[i] - rest[j]));
        if (std::isinf(pij)) return 0.0;
        w += pij;
      }
    return std::exp(-state_.beta * w);
  }

  static Config merged_config(const Config& rest, const Config& ys) {
    Config merged;
    merged.reserve(rest.size() + ys.size());
    merged.insert(merged.end(), rest.begin(), rest.end());
    merged.insert(merged.end(), ys.begin(), ys.end());
    return merged;
  }

  std::string mc_label(int k, const std::string& key) const {
    const std::size_t h = std::hash<std::string>{}(key);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "brk:%d:%zx", k, h);
    return buf;
  }

  PairPotential pot_;
  ThermoState state_;
  QuadSpec spec_;
  double i_value_ = 0.0;
  double i_error_ = 0.0;
  double support_radius_ = 0.0;
  double support_tail_ = 0.0;
  std::unordered_map<std::string, Coeff> cache_;
};

}  // namespace ksgas
