#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ksgas/geometry.hpp"
#include "ksgas/quadrature.hpp"

namespace ksgas {

struct ThermoState {
  double beta = 1.0;  // inverse temperature
  int nu = 1;         // spatial dimension, 1..3
};

inline double sphere_surface(int nu) {
  switch (nu) {
    case 1: return 2.0;
    case 2: return 2.0 * M_PI;
    case 3: return 4.0 * M_PI;
    default: throw std::invalid_argument("sphere_surface: nu must be 1, 2 or 3");
  }
}

inline double ball_volume(int nu, double r) {
  switch (nu) {
    case 1: return 2.0 * r;
    case 2: return M_PI * r * r;
    case 3: return 4.0 / 3.0 * M_PI * r * r * r;
    default: throw std::invalid_argument("ball_volume: nu must be 1, 2 or 3");
  }
}

enum class PotentialKind { ideal, gaussian_bump, soft_core, hard_rod };

// Radial pair potentials: all nonnegative (stability constant B = 0), with
// finite range except for the Gaussian bump, which is truncated where
// beta*phi drops below 1e-14 and the remainder booked as an error term.
class PairPotential {
 public:
  // phi = 0 identically: the non-interacting gas, useful as a degenerate
  // reference whose correlation functions are pure powers of the activity.
  static PairPotential ideal() {
    PairPotential p;
    p.kind_ = PotentialKind::ideal;
    return p;
  }

  static PairPotential gaussian_bump(double amplitude, double width) {
    if (!(amplitude > 0) || !(width > 0))
      throw std::invalid_argument("gaussian_bump: amplitude and width must be positive");
    PairPotential p;
    p.kind_ = PotentialKind::gaussian_bump;
    p.amplitude_ = amplitude;
    p.width_ = width;
    return p;
  }

  // phi(r) = (1/eps) (1 - r^2/d^2)^2 on r <= d, zero outside; C^1 at r = d.
  static PairPotential soft_core(double diameter, double sharpness) {
    if (!(diameter > 0) || !(sharpness > 0))
      throw std::invalid_argument("soft_core: diameter and sharpness must be positive");
    PairPotential p;
    p.kind_ = PotentialKind::soft_core;
    p.diameter_ = diameter;
    p.sharpness_ = sharpness;
    return p;
  }

  // phi = +inf on r < d, zero on r >= d (open core: phi(d) = 0).
  static PairPotential hard_rod(double diameter) {
    if (!(diameter > 0)) throw std::invalid_argument("hard_rod: diameter must be positive");
    PairPotential p;
    p.kind_ = PotentialKind::hard_rod;
    p.diameter_ = diameter;
    return p;
  }

  PotentialKind kind() const { return kind_; }
  bool hard_core() const { return kind_ == PotentialKind::hard_rod; }
  double diameter() const { return diameter_; }
  double sharpness() const { return sharpness_; }
  double amplitude() const { return amplitude_; }
  double width() const { return width_; }

  double phi(double r) const {
    switch (kind_) {
      case PotentialKind::ideal:
        return 0.0;
      case PotentialKind::gaussian_bump: {
        const double t = r / width_;
        return amplitude_ * std::exp(-t * t);
      }
      case PotentialKind::soft_core: {
        if (r >= diameter_) return 0.0;
        const double u = 1.0 - (r * r) / (diameter_ * diameter_);
        return u * u / sharpness_;
      }
      case PotentialKind::hard_rod:
        return r < diameter_ ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return 0.0;
  }

  // Radial derivative phi'(r); the hard rod has no classical derivative.
  double dphi(double r) const {
    switch (kind_) {
      case PotentialKind::ideal:
        return 0.0;
      case PotentialKind::gaussian_bump: {
        const double t = r / width_;
        return -2.0 * r / (width_ * width_) * amplitude_ * std::exp(-t * t);
      }
      case PotentialKind::soft_core: {
        if (r >= diameter_) return 0.0;
        const double u = 1.0 - (r * r) / (diameter_ * diameter_);
        return -4.0 * r * u / (sharpness_ * diameter_ * diameter_);
      }
      case PotentialKind::hard_rod:
        throw std::domain_error("hard_rod potential is not differentiable");
    }
    return 0.0;
  }

  // Radius beyond which the Mayer function is treated as zero.
  double support_radius(double beta) const {
    switch (kind_) {
      case PotentialKind::ideal:
        return 0.0;
      case PotentialKind::soft_core:
      case PotentialKind::hard_rod:
        return diameter_;
      case PotentialKind::gaussian_bump: {
        const double lim = beta * amplitude_ / kPhiCutoff;
        if (lim <= 1.0) return 0.0;
        return width_ * std::sqrt(std::log(lim));
      }
    }
    return 0.0;
  }

  // Radii where phi or a low-order derivative is discontinuous.
  std::vector<double> kink_radii() const {
    if (kind_ == PotentialKind::soft_core || kind_ == PotentialKind::hard_rod)
      return {diameter_};
    return {};
  }

  // Bound on the |mayer_f| mass ignored outside support_radius; uses
  // |1 - e^{-beta phi}| <= beta phi and the Gaussian tail integral.
  double support_tail_bound(double beta, int nu) const {
    if (kind_ != PotentialKind::gaussian_bump) return 0.0;
    const double R = support_radius(beta);
    const double s = width_;
    const double x = R / s;
    double radial;  // int_R^inf e^{-r^2/s^2} r^(nu-1) dr
    switch (nu) {
      case 1: radial = s * 0.5 * std::sqrt(M_PI) * std::erfc(x); break;
      case 2: radial = 0.5 * s * s * std::exp(-x * x); break;
      case 3:
        radial = s * s * s * (0.25 * std::sqrt(M_PI) * std::erfc(x) + 0.5 * x * std::exp(-x * x));
        break;
      default: throw std::invalid_argument("support_tail_bound: bad nu");
    }
    return beta * amplitude_ * sphere_surface(nu) * radial;
  }

  static constexpr double kPhiCutoff = 1e-14;

 private:
  PairPotential() = default;
  PotentialKind kind_ = PotentialKind::gaussian_bump;
  double amplitude_ = 0.0;
  double width_ = 0.0;
  double diameter_ = 0.0;
  double sharpness_ = 0.0;
};

inline double eval_phi(const PairPotential& pot, const Vec& q) { return pot.phi(norm(q)); }

// Mayer function 1 - e^{-beta phi}; in [0, 1] for nonnegative potentials.
inline double mayer_f(const PairPotential& pot, double beta, double r) {
  if (pot.hard_core()) return r < pot.diameter() ? 1.0 : 0.0;
  return -std::expm1(-beta * pot.phi(r));
}

inline double mayer_f(const PairPotential& pot, double beta, const Vec& q) {
  return mayer_f(pot, beta, norm(q));
}

// Gradient of the Mayer function, beta phi'(r) e^{-beta phi} q/|q|.
inline Vec grad_mayer(const PairPotential& pot, double beta, const Vec& q) {
  if (pot.hard_core())
    throw std::domain_error("grad_mayer: hard-core potential is not differentiable");
  const double r = norm(q);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const double scale = beta * pot.dphi(r) * std::exp(-beta * pot.phi(r)) / r;
  return scale * q;
}

// Interaction energy of a point q with a fixed configuration.
inline double w_energy(const PairPotential& pot, const Vec& q, const Config& others) {
  double w = 0.0;
  for (const auto& o : others) {
    w += pot.phi(norm(q - o));
    if (std::isinf(w)) return w;
  }
  return w;
}

// e^{-beta sum_{i<j} phi(q_i - q_j)}; zero when a hard core overlaps.
inline double boltzmann_weight(const PairPotential& pot, double beta, const Config& pts) {
  double w = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      w += pot.phi(norm(pts[i] - pts[j]));
      if (std::isinf(w)) return 0.0;
    }
  return std::exp(-beta * w);
}

// I_beta = int |1 - e^{-beta phi}| over R^nu; exact core volume for hard rods.
inline QuadResult i_beta(const PairPotential& pot, const ThermoState& st, const QuadSpec& spec) {
  if (pot.hard_core()) return {ball_volume(st.nu, pot.diameter()), 0.0, 0, true};
  const double R = pot.support_radius(st.beta);
  const double S = sphere_surface(st.nu);
  QuadResult r{0.0, pot.support_tail_bound(st.beta, st.nu), 0, true};
  if (R > 0) {
    auto g = [&](double x) {
      return mayer_f(pot, st.beta, x) * std::pow(x, st.nu - 1);
    };
    QuadResult q = integrate_radial(g, 0.0, R, pot.kink_radii(), spec);
    r.value = S * q.value;
    r.error += S * q.error;
    r.evaluations = q.evaluations;
    r.converged = q.converged;
  }
  return r;
}

// J_beta = int |grad(1 - e^{-beta phi})| over R^nu.
inline QuadResult j_beta(const PairPotential& pot, const ThermoState& st, const QuadSpec& spec) {
  if (pot.hard_core())
    throw std::domain_error("j_beta: hard-core potential is not differentiable");
  const double R = pot.support_radius(st.beta);
  const double S = sphere_surface(st.nu);
  QuadResult r{0.0, 0.0, 0, true};
  if (R > 0) {
    auto g = [&](double x) {
      return std::abs(st.beta * pot.dphi(x)) * std::exp(-st.beta * pot.phi(x)) *
             std::pow(x, st.nu - 1);
    };
    QuadResult q = integrate_radial(g, 0.0, R, pot.kink_radii(), spec);
    r = q;
    r.value *= S;
    r.error *= S;
  }
  return r;
}

// int |grad phi| over R^nu; enters gradient-equation budgets.
inline QuadResult grad_phi_l1(const PairPotential& pot, const ThermoState& st,
                              const QuadSpec& spec) {
  if (pot.hard_core())
    throw std::domain_error("grad_phi_l1: hard-core potential is not differentiable");
  const double R = pot.support_radius(st.beta);
  const double S = sphere_surface(st.nu);
  QuadResult r{0.0, 0.0, 0, true};
  if (R > 0) {
    auto g = [&](double x) { return std::abs(pot.dphi(x)) * std::pow(x, st.nu - 1); };
    QuadResult q = integrate_radial(g, 0.0, R, pot.kink_radii(), spec);
    r = q;
    r.value *= S;
    r.error *= S;
  }
  return r;
}

}  // namespace ksgas
