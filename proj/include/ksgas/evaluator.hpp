#pragma once

// Uniform interface over the ways this library can produce correlation
// functions: the truncated activity series (any admissible potential), the
// exact hard-rod closed forms, and the non-interacting gas.  The residual
// checks are written against this interface so every equation can be tested
// both on approximate families (with honest budgets) and on exact oracles
// (with zero budgets).
//
// Contract: rho(n, q) returns the n-point correlation value together with a
// truncation-tail bound and an accumulated numerical-error bound, and
// |rho_n| <= xi_bound()^n holds for every n and configuration, with
// int |mayer_f| <= i_upper().  These two numbers drive all closed-form
// remainder estimates.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksgas/geometry.hpp"
#include "ksgas/hardrod.hpp"
#include "ksgas/mayer.hpp"
#include "ksgas/potential.hpp"

namespace ksgas {

class CorrelationEvaluator {
 public:
  virtual ~CorrelationEvaluator() = default;

  virtual SeriesValue rho(int n, const Config& q) = 0;

  // rho with permission to truncate harder: implementations may drop
  // coefficients of excess p+1-n > max_excess as long as the returned tail
  // still bounds everything omitted relative to the true correlation
  // function.  Residual checks use this for integrand evaluations whose
  // z-suppressed precision would otherwise be paid at full recursion depth.
  // Exact evaluators ignore the hint.
  virtual SeriesValue rho_at(int n, const Config& q, int max_excess) {
    (void)max_excess;
    return rho(n, q);
  }

  virtual double activity() const = 0;
  virtual double xi_bound() const = 0;  // certified envelope: |rho_n| <= xi^n
  virtual double i_upper() const = 0;   // upper bound on int |mayer_f|
  virtual const PairPotential& potential() const = 0;
  virtual const ThermoState& state() const = 0;
  virtual std::string name() const = 0;
};

// Truncated Mayer series at fixed activity and order.  Construction enforces
// |z| I e <= 1 - 1/e, which makes xi = |z| e a valid envelope:
//   |rho_n| <= sum_{p>=n-1} |z|^{p+1} I^{1-n} (I e)^p = (|z| e)^n / (e (1-a)).
class MayerEvaluator : public CorrelationEvaluator {
 public:
  MayerEvaluator(const PairPotential& pot, const ThermoState& st, double z, int order,
                 const QuadSpec& spec = {})
      : engine_(pot, st, spec), z_(z), order_(order) {
    if (order < 0) throw std::invalid_argument("MayerEvaluator: order must be nonnegative");
    const double a = std::abs(z) * engine_.i_upper() * M_E;
    if (a > 1.0 - 1.0 / M_E)
      throw std::domain_error(
          "MayerEvaluator: activity outside the certified envelope |z| I e <= 1 - 1/e");
  }

  SeriesValue rho(int n, const Config& q) override { return engine_.rho(n, q, z_, order_); }

  SeriesValue rho_at(int n, const Config& q, int max_excess) override {
    const int eff = std::min(order_, n - 1 + std::max(0, max_excess));
    return engine_.rho(n, q, z_, eff);
  }

  double activity() const override { return z_; }
  double xi_bound() const override { return std::abs(z_) * M_E; }
  double i_upper() const override { return engine_.i_upper(); }
  const PairPotential& potential() const override { return engine_.potential(); }
  const ThermoState& state() const override { return engine_.state(); }
  std::string name() const override { return "mayer_series"; }

  int order() const { return order_; }
  MayerCoefficients& engine() { return engine_; }

 private:
  MayerCoefficients engine_;
  double z_;
  int order_;
};

// Exact hard-rod (Tonks) correlations; every value is closed-form, so both
// defect fields are zero and xi = R works since rho_n <= rho R^{n-1}.
class TonksEvaluator : public CorrelationEvaluator {
 public:
  explicit TonksEvaluator(double density, double diameter = 1.0)
      : params_(hardrod::tonks_constants(density, diameter)),
        pot_(PairPotential::hard_rod(diameter)) {}

  SeriesValue rho(int n, const Config& q) override {
    if (n < 1 || static_cast<int>(q.size()) != n)
      throw std::invalid_argument("TonksEvaluator: configuration size must equal n");
    std::vector<double> xs(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) xs[i] = q[i][0];
    return {hardrod::tonks_rhon(params_, xs), 0.0, 0.0};
  }

  double activity() const override { return params_.z; }
  double xi_bound() const override { return params_.R; }
  double i_upper() const override { return 2.0 * params_.d; }
  const PairPotential& potential() const override { return pot_; }
  const ThermoState& state() const override { return state_; }
  std::string name() const override { return "tonks_hard_rod"; }

  const hardrod::TonksParams& params() const { return params_; }

 private:
  hardrod::TonksParams params_;
  PairPotential pot_;
  ThermoState state_{1.0, 1};  // the hard-rod equations never involve beta
};

// Non-interacting gas: rho_n = z^n exactly.
class IdealGasEvaluator : public CorrelationEvaluator {
 public:
  explicit IdealGasEvaluator(double z, int nu = 1) : z_(z), state_{1.0, nu} {
    if (!(z > 0)) throw std::invalid_argument("IdealGasEvaluator: activity must be positive");
  }

  SeriesValue rho(int n, const Config& q) override {
    if (n < 1 || static_cast<int>(q.size()) != n)
      throw std::invalid_argument("IdealGasEvaluator: configuration size must equal n");
    return {std::pow(z_, n), 0.0, 0.0};
  }

  double activity() const override { return z_; }
  double xi_bound() const override { return z_; }
  double i_upper() const override { return 0.0; }
  const PairPotential& potential() const override { return pot_; }
  const ThermoState& state() const override { return state_; }
  std::string name() const override { return "ideal_gas"; }

 private:
  double z_;
  PairPotential pot_ = PairPotential::ideal();
  ThermoState state_;
};

}  // namespace ksgas
