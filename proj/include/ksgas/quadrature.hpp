#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ksgas/geometry.hpp"

namespace ksgas {

struct QuadSpec {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  int max_depth = 12;                    // adaptive bisection depth per segment
  int max_level = 8;                     // panel doublings for cluster rules
  std::int64_t max_evals = 60'000'000;   // hard cap per integral
  std::uint64_t seed = 0x2545f4914f6cdd1dULL;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // certified absolute estimate
  std::int64_t evaluations = 0;
  bool converged = true;
};

namespace detail {

// Deduplicate, sort, and clip breakpoints into (a, b).
inline std::vector<double> interior_knots(double a, double b, const std::vector<double>& knots) {
  std::vector<double> ks;
  for (double k : knots)
    if (k > a + 1e-14 * (1 + std::abs(a)) && k < b - 1e-14 * (1 + std::abs(b))) ks.push_back(k);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end(),
                       [](double x, double y) { return std::abs(x - y) < 1e-13; }),
           ks.end());
  return ks;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
  for (char c : label) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return h;
}

}  // namespace detail

// Adaptive 1-D integration of f over [a, b]. Known discontinuities or kinks
// are passed in `knots`; the interval is split there exactly and each smooth
// segment handled by adaptive Gauss-Kronrod.
inline QuadResult integrate_radial(const std::function<double(double)>& f, double a, double b,
                                   const std::vector<double>& knots, const QuadSpec& spec) {
  namespace bq = boost::math::quadrature;
  QuadResult out;
  if (!(b > a)) return out;

  std::vector<double> edges{a};
  for (double k : detail::interior_knots(a, b, knots)) edges.push_back(k);
  edges.push_back(b);

  std::int64_t evals = 0;
  auto counted = [&](double x) {
    ++evals;
    return f(x);
  };

  const int nseg = static_cast<int>(edges.size()) - 1;
  for (int s = 0; s < nseg; ++s) {
    const double lo = edges[s], hi = edges[s + 1];
    double err = 0.0, l1 = 0.0;
    // Segment tolerance: boost terminates on the relative error of the
    // segment estimate, so translate the absolute budget through |I| ~ L1.
    const double tol = std::max(spec.rel_tol, 1e-15);
    double v = bq::gauss_kronrod<double, 15>::integrate(counted, lo, hi, spec.max_depth, tol,
                                                        &err, &l1);
    if (!std::isfinite(v)) throw std::runtime_error("integrate_radial: non-finite integrand");
    out.value += v;
    out.error += err;
  }
  out.evaluations = evals;
  const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value));
  out.converged = out.error <= std::max(target * 4, 1e-13 * (1 + std::abs(out.value)));
  return out;
}

namespace detail {

// Nodes and weights of the composite 16-point Gauss-Legendre rule over the
// kink-split segments of [lo, hi], each segment cut into 2^level panels.
inline void composite_gl16(double lo, double hi, const std::vector<double>& knots, int level,
                           std::vector<double>& nodes, std::vector<double>& weights) {
  using rule = boost::math::quadrature::gauss<double, 16>;
  const auto& xs = rule::abscissa();  // nonnegative half, includes 0? (16: no zero)
  const auto& ws = rule::weights();

  std::vector<double> edges{lo};
  for (double k : interior_knots(lo, hi, knots)) edges.push_back(k);
  edges.push_back(hi);

  nodes.clear();
  weights.clear();
  const int panels_per_seg = 1 << level;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double w = (edges[s + 1] - edges[s]) / panels_per_seg;
    for (int p = 0; p < panels_per_seg; ++p) {
      const double c = edges[s] + (p + 0.5) * w;
      const double h = 0.5 * w;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        nodes.push_back(c - h * xs[i]);
        weights.push_back(h * ws[i]);
        nodes.push_back(c + h * xs[i]);
        weights.push_back(h * ws[i]);
      }
    }
  }
}

}  // namespace detail

// m-point cluster integral over (R^nu)^m for integrands supported in the ball
// of radius `radius` around `anchor` in each argument.
//
// nu == 1: tensorized fixed-order Gauss-Legendre panels, panel count doubled
// until two successive estimates agree within tolerance (the difference is
// the reported error).  Axis kinks may be registered via `axis_knots`.
//
// nu in {2,3}: importance-sampled Monte Carlo; see integrate_cluster_mc.
inline QuadResult integrate_cluster_gl(const std::function<double(const Config&)>& g,
                                       const Vec& anchor, double radius, int m,
                                       const std::vector<double>& axis_knots,
                                       const QuadSpec& spec) {
  if (m < 1 || m > 6) throw std::invalid_argument("integrate_cluster: bad point count");
  QuadResult out;
  out.converged = false;

  const double lo = anchor[0] - radius, hi = anchor[0] + radius;
  std::vector<double> nodes, weights;
  double prev = std::numeric_limits<double>::quiet_NaN();
  double prev_diff = std::numeric_limits<double>::infinity();

  for (int level = 0; level <= spec.max_level; ++level) {
    detail::composite_gl16(lo, hi, axis_knots, level, nodes, weights);
    const std::size_t n1 = nodes.size();
    double cost = 1.0;
    for (int j = 0; j < m; ++j) cost *= static_cast<double>(n1);
    if (cost > static_cast<double>(spec.max_evals - out.evaluations)) {
      out.error = prev_diff;
      return out;  // budget exhausted before convergence
    }

    Config pts(m, anchor);
    std::vector<std::size_t> idx(m, 0);
    double sum = 0.0;
    while (true) {
      double w = 1.0;
      for (int j = 0; j < m; ++j) {
        pts[j][0] = nodes[idx[j]];
        w *= weights[idx[j]];
      }
      sum += w * g(pts);
      int j = 0;
      for (; j < m; ++j) {
        if (++idx[j] < n1) break;
        idx[j] = 0;
      }
      if (j == m) break;
    }
    out.evaluations += static_cast<std::int64_t>(cost);
    out.value = sum;

    if (level > 0) {
      const double diff = std::abs(sum - prev);
      const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(sum));
      if (diff <= target) {
        out.error = std::max(diff, 4 * std::numeric_limits<double>::epsilon() * std::abs(sum));
        out.converged = true;
        return out;
      }
      prev_diff = diff;
    }
    prev = sum;
  }
  out.error = prev_diff;
  return out;
}

// Monte Carlo companion for nu in {2,3}.  Each of the m points is drawn from
// the radial proposal density proportional to `proposal(r)` (typically
// |mayer_f|) inside the support ball; the stream is derived from (seed,
// label) so repeated runs are reproducible.
inline QuadResult integrate_cluster_mc(const std::function<double(const Config&)>& g,
                                       const Vec& anchor, double radius, int m, int nu,
                                       const std::function<double(double)>& proposal,
                                       const QuadSpec& spec, std::string_view label) {
  if (nu != 2 && nu != 3) throw std::invalid_argument("integrate_cluster_mc: nu must be 2 or 3");
  constexpr int kKnots = 1024;

  // Unnormalised radial CDF of proposal(r) r^(nu-1) on [0, radius].
  std::vector<double> rs(kKnots), cdf(kKnots);
  using rule = boost::math::quadrature::gauss<double, 16>;
  const auto& xs = rule::abscissa();
  const auto& ws = rule::weights();
  double acc = 0.0;
  rs[0] = 0.0;
  cdf[0] = 0.0;
  for (int i = 1; i < kKnots; ++i) {
    const double a = radius * (i - 1) / (kKnots - 1);
    const double b = radius * i / (kKnots - 1);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double cell = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      for (double sgn : {-1.0, 1.0}) {
        const double r = c + sgn * h * xs[k];
        cell += h * ws[k] * std::abs(proposal(r)) * std::pow(r, nu - 1);
      }
    }
    acc += cell;
    rs[i] = b;
    cdf[i] = acc;
  }
  const double z_radial = acc;
  if (!(z_radial > 0)) throw std::runtime_error("integrate_cluster_mc: empty proposal");
  const double surface = (nu == 2) ? 2 * M_PI : 4 * M_PI;
  const double z_full = z_radial * surface;

  auto sample_r = [&](double u) {
    const double t = u * z_radial;
    auto it = std::lower_bound(cdf.begin(), cdf.end(), t);
    const std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - cdf.begin(), 1), kKnots - 1);
    const double c0 = cdf[i - 1], c1 = cdf[i];
    const double frac = (c1 > c0) ? (t - c0) / (c1 - c0) : 0.5;
    return rs[i - 1] + frac * (rs[i] - rs[i - 1]);
  };

  std::mt19937_64 rng(detail::mix_seed(spec.seed, label));
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  QuadResult out;
  out.converged = false;
  double sum = 0.0, sum2 = 0.0;
  std::int64_t n = 0;
  std::int64_t batch = 4096;
  Config pts(m, anchor);
  while (out.evaluations + batch * m <= spec.max_evals) {
    for (std::int64_t s = 0; s < batch; ++s) {
      double density = 1.0;
      for (int j = 0; j < m; ++j) {
        const double r = sample_r(uni(rng));
        double dir[3] = {0, 0, 0};
        if (nu == 2) {
          const double th = 2 * M_PI * uni(rng);
          dir[0] = std::cos(th);
          dir[1] = std::sin(th);
        } else {
          const double cth = 2 * uni(rng) - 1;
          const double sth = std::sqrt(std::max(0.0, 1 - cth * cth));
          const double ph = 2 * M_PI * uni(rng);
          dir[0] = sth * std::cos(ph);
          dir[1] = sth * std::sin(ph);
          dir[2] = cth;
        }
        pts[j] = anchor + Vec{r * dir[0], r * dir[1], r * dir[2]};
        density *= std::abs(proposal(r)) / z_full;
      }
      const double w = (density > 0) ? g(pts) / density : 0.0;
      sum += w;
      sum2 += w * w;
      ++n;
    }
    out.evaluations += batch * m;
    out.value = sum / n;
    const double var = std::max(0.0, sum2 / n - out.value * out.value);
    out.error = std::sqrt(var / n);
    const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value));
    if (out.error <= target && n >= 8192) {
      out.converged = true;
      return out;
    }
    batch *= 2;
  }
  return out;
}

struct ClusterProposal {
  std::function<double(double)> radial;  // |mayer_f| profile for MC sampling
  std::string label;                     // stream label for reproducibility
};

// Dispatch on dimension: deterministic tensor panels for nu == 1, importance
// sampling for nu in {2,3}.
inline QuadResult integrate_cluster(const std::function<double(const Config&)>& g,
                                    const Vec& anchor, double radius, int m, int nu,
                                    const std::vector<double>& axis_knots, const QuadSpec& spec,
                                    const ClusterProposal& proposal = {}) {
  if (nu == 1) return integrate_cluster_gl(g, anchor, radius, m, axis_knots, spec);
  if (!proposal.radial)
    throw std::invalid_argument("integrate_cluster: nu >= 2 requires a radial proposal");
  return integrate_cluster_mc(g, anchor, radius, m, nu, proposal.radial, spec, proposal.label);
}

}  // namespace ksgas
