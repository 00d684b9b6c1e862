// Hard-core limit: exact limit coefficients on the line, coefficient gaps
// shrinking with the core sharpness, the leading-order strict bound, and the
// sweep comparing the smooth pair function to the exact hard-rod gas.

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "ksgas/hclimit.hpp"

namespace {

using namespace ksgas;
using namespace ksgas::hclimit;

Config line(std::initializer_list<double> xs) {
  Config q;
  for (double x : xs) q.push_back(vec1(x));
  return q;
}

const std::vector<double> kEpsSequence{0.2, 0.1, 0.05};

TEST(HardCoreCoefficients, LowOrdersMatchHandComputedValues) {
  EXPECT_NEAR(hard_core_coeff(1, 1, line({0.0})), -2.0, 1e-12);
  EXPECT_NEAR(hard_core_coeff(1, 2, line({0.0})), 4.5, 1e-12);
  EXPECT_NEAR(hard_core_coeff(1, 1, line({0.0}), 0.5), -1.0, 1e-12);
  EXPECT_NEAR(hard_core_coeff(1, 2, line({0.0}), 0.5), 4.5 * 0.25, 1e-12);

  // Leading order is the overlap indicator.
  EXPECT_EQ(hard_core_coeff(2, 1, line({0.0, 1.5})), 1.0);
  EXPECT_EQ(hard_core_coeff(2, 1, line({0.0, 0.7})), 0.0);
  EXPECT_EQ(hard_core_coeff(2, 0, line({0.0, 1.5})), 0.0);  // below leading order

  // Pair coefficient at next order: -2d minus the measure of the insertion
  // ball cleared by the partner rod, i.e. -2d - min(x, 2d).
  EXPECT_NEAR(hard_core_coeff(2, 2, line({0.0, 1.5})), -3.5, 1e-12);
  EXPECT_NEAR(hard_core_coeff(2, 2, line({0.0, 2.5})), -4.0, 1e-12);
  // Far apart this matches the factorized value 2 c_{1,0} c_{1,1}.
  EXPECT_NEAR(hard_core_coeff(2, 2, line({0.0, 10.0})), -4.0, 1e-12);
}

TEST(HardCoreCoefficients, BoundaryContactIsRejected) {
  EXPECT_THROW(hard_core_coeff(2, 2, line({0.0, 1.0})), std::domain_error);
  EXPECT_THROW(hard_core_coeff(3, 3, line({0.0, 2.0, 3.0})), std::domain_error);
}

TEST(CoefficientGaps, ShrinkAlongTheSharpnessSequenceTowardExactLimits) {
  const auto rows11 = coeff_limit_check(1, 1, line({0.0}), kEpsSequence);
  ASSERT_EQ(rows11.size(), 3u);
  EXPECT_EQ(rows11[0].limit, -2.0);
  // Frozen from independent adaptive evaluations of the sharpened core at
  // the module's default inverse temperature.
  EXPECT_NEAR(rows11[0].gap, 0.01626, 2e-4);
  EXPECT_NEAR(rows11[1].gap, 0.01148, 2e-4);
  EXPECT_NEAR(rows11[2].gap, 0.00811, 2e-4);
  EXPECT_GT(rows11[0].gap, rows11[1].gap);
  EXPECT_GT(rows11[1].gap, rows11[2].gap);

  const auto rows12 = coeff_limit_check(1, 2, line({0.0}), kEpsSequence);
  EXPECT_NEAR(rows12[0].limit, 4.5, 1e-12);
  EXPECT_NEAR(rows12[0].gap, 0.07287, 2e-3);
  EXPECT_NEAR(rows12[1].gap, 0.05151, 2e-3);
  EXPECT_NEAR(rows12[2].gap, 0.03642, 2e-3);
  EXPECT_GT(rows12[0].gap, rows12[1].gap);
  EXPECT_GT(rows12[1].gap, rows12[2].gap);
  EXPECT_LT(rows12[2].gap, 0.05);
}

TEST(CoefficientGaps, LinearExtrapolationBracketsTheExactLimit) {
  // The sharpness sequence halves at each step; extrapolating the last two
  // values linearly to zero must land within three times the extrapolation
  // defect (the spread between successive two-point extrapolations).
  for (auto [n, p] : {std::pair{1, 1}, std::pair{1, 2}}) {
    const auto rows = coeff_limit_check(n, p, line({0.0}), kEpsSequence);
    auto extrapolate = [&](const CoeffLimitRow& a, const CoeffLimitRow& b) {
      return b.value - b.epsilon * (a.value - b.value) / (a.epsilon - b.epsilon);
    };
    const double e12 = extrapolate(rows[0], rows[1]);
    const double e23 = extrapolate(rows[1], rows[2]);
    const double defect = std::abs(e23 - e12) + 3 * (rows[1].err + rows[2].err);
    EXPECT_LE(std::abs(e23 - rows[0].limit), 3 * defect) << "n=" << n << " p=" << p;
  }
}

TEST(LeadingOrderBound, StrictlyDominatesTheSeriesForPositiveActivity) {
  const auto one = groeneveld_check(1, line({0.0}), 0.1, 0.05, 3);
  EXPECT_TRUE(one.pass);
  EXPECT_LT(one.residual, 0.0);  // rho < z
  EXPECT_EQ(one.equation, "Groeneveld");

  const auto two = groeneveld_check(2, line({0.0, 1.5}), 0.1, 0.05, 3);
  EXPECT_TRUE(two.pass);
  EXPECT_LT(two.residual, 0.0);  // rho_2 < z^2 beyond the core
}

TEST(LeadingOrderBound, RatioApproachesTheBoltzmannFactorAtSmallActivity) {
  const double z = 1e-6;
  const auto rep = groeneveld_check(1, line({0.0}), 0.1, z, 2);
  EXPECT_TRUE(rep.pass);
  // residual = rho - z, and rho = z (1 - z I + O(z^2)).
  const double ratio = (rep.residual + z) / z;
  EXPECT_NEAR(ratio, 1.0, 3e-6);
}

TEST(LimitSweep, SupErrorIsNonincreasingWithinBudgets) {
  // Four separations keep the property run affordable; the acceptance gate
  // drives the full default grid.
  SweepPlan plan;
  plan.epsilons = kEpsSequence;
  for (int i = 0; i < 4; ++i) plan.x_grid.push_back(1.05 + i * (3.0 - 1.05) / 3.0);

  const auto table = limit_sweep(plan);
  ASSERT_EQ(table.summary.size(), 3u);
  ASSERT_EQ(table.points.size(), 12u);

  for (std::size_t i = 0; i + 1 < table.summary.size(); ++i) {
    const auto& a = table.summary[i];
    const auto& b = table.summary[i + 1];
    EXPECT_LE(b.sup_error, a.sup_error + a.tail_budget + b.tail_budget)
        << "sharpness step " << i;
  }
  for (const auto& pt : table.points) {
    EXPECT_TRUE(pt.radius_ok);
    EXPECT_TRUE(pt.groeneveld_ok) << "x = " << pt.x;
    EXPECT_TRUE(std::isfinite(pt.budget));
  }
  // The drive is the activity; the realized density is below it and shared
  // across rows up to the sharpness dependence.
  for (const auto& row : table.summary) {
    EXPECT_LT(row.rho_used, plan.drive_value);
    EXPECT_GT(row.rho_used, 0.9 * plan.drive_value);
  }
}

TEST(LimitSweep, FarSeparationFactorizesIntoTheSquaredDensity) {
  MayerCoefficients eng(PairPotential::soft_core(1.0, 0.1), ThermoState{600.0, 1});
  const double z = 0.005;
  const auto rho1 = eng.rho(1, line({0.0}), z, 3);
  const auto rho2 = eng.rho(2, line({0.0, 10.0}), z, 3);
  const double combined =
      rho2.budget() + 2 * std::abs(rho1.value) * rho1.budget() + rho1.budget() * rho1.budget();
  EXPECT_LE(std::abs(rho2.value - rho1.value * rho1.value), combined);
}

TEST(LimitSweep, ValidatesThePlanAndFlagsRadiusViolations) {
  SweepPlan empty;
  EXPECT_TRUE(limit_sweep(empty).points.empty());

  SweepPlan bad_grid;
  bad_grid.epsilons = {0.1};
  bad_grid.x_grid = {1.0};  // touches the core boundary
  EXPECT_THROW(limit_sweep(bad_grid), std::invalid_argument);

  SweepPlan bad_order;
  bad_order.epsilons = {0.2, 0.2};
  bad_order.x_grid = {1.5};
  EXPECT_THROW(limit_sweep(bad_order), std::invalid_argument);

  SweepPlan hot;
  hot.epsilons = {0.1};
  hot.x_grid = {1.5};
  hot.drive_value = 0.05;  // activity too large for the uniform envelope
  EXPECT_THROW(limit_sweep(hot), std::invalid_argument);

  // Fixed-density mode inverts the activity; a dense target lands outside
  // the series radius and the row is flagged rather than rejected.
  SweepPlan dense;
  dense.epsilons = {0.1};
  dense.x_grid = {1.5};
  dense.drive_value = 0.15;
  dense.fix_density = true;
  dense.order = 2;
  const auto table = limit_sweep(dense);
  ASSERT_EQ(table.summary.size(), 1u);
  EXPECT_FALSE(table.summary[0].radius_ok);
  EXPECT_TRUE(std::isinf(table.points[0].budget));
}

TEST(UniformEnvelope, CorrelationsStayBelowTwiceTheDensityEnvelope) {
  // With the insertion denominator certified above one half, the activity is
  // at most twice the density, so the leading-order bound gives
  // rho_n <= (2 rho)^n e^{-beta sum phi} uniformly in the sharpness.  The
  // bound concerns the true functions, so any certified truncation order
  // must sit below it by more than its own budget; order two keeps the
  // deep-core quadrature out of the loop.
  const double z = 0.005;
  for (double eps : kEpsSequence) {
    const PairPotential pot = PairPotential::soft_core(1.0, eps);
    MayerCoefficients eng(pot, ThermoState{600.0, 1});
    const double rho = eng.rho(1, line({0.0}), z, 2).value;
    for (const Config& q : {line({0.0, 1.2}), line({0.0, 1.3, 2.6})}) {
      const int n = static_cast<int>(q.size());
      const auto s = eng.rho(n, q, z, 2);
      const double bound =
          std::pow(2 * rho, n) * boltzmann_weight(pot, 600.0, q);
      EXPECT_LE(s.value + s.budget(), bound) << "eps=" << eps << " n=" << n;
    }
  }
}

TEST(ActivityDensityConversion, LambertFormInvertsTheTonksRelation) {
  for (double z : {0.005, 0.05, 0.3}) {
    const double rho = tonks_density_from_activity(z, 1.0);
    const auto p = hardrod::tonks_constants(rho, 1.0);
    EXPECT_NEAR(p.z, z, 1e-12 * z);
  }
  EXPECT_THROW(tonks_density_from_activity(-0.1, 1.0), std::invalid_argument);
}

}  // namespace
