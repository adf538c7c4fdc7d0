#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lsis/estimator.hpp"
#include "lsis/model_bs.hpp"
#include "lsis/payoffs_lmm.hpp"

using namespace lsis;

namespace {

const RngStream kBase(424242, 0);

Payoff constant_payoff(double c) {
  return Payoff{1, [c](std::span<const double>) { return c; }};
}

Payoff linear_payoff() {
  return Payoff{1, [](std::span<const double> z) { return z[0]; }};
}

}  // namespace

TEST_CASE("crude: constant payoff has zero variance") {
  const EstimatorReport report = crude_estimate(constant_payoff(3.25), 1000, kBase);
  CHECK(report.value == 3.25);
  CHECK(report.variance == 0.0);
  CHECK(report.std_error == 0.0);
  CHECK(report.num_paths == 1000);
}

TEST_CASE("crude: linear payoff matches standard normal moments") {
  const long n = 200000;
  const EstimatorReport report = crude_estimate(linear_payoff(), n, kBase);
  CHECK(std::fabs(report.value) <= 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(report.variance == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("crude: lognormal call agrees with the closed form") {
  const BsParams params{50, 55, 0.05, 0.2, 1.0};
  const Payoff payoff = make_bs_payoff(params, OptionKind::Call);
  const EstimatorReport report = crude_estimate(payoff, 1000000, kBase);
  CHECK(std::fabs(report.value - bs_closed_form(params, OptionKind::Call)) <=
        3.0 * report.std_error);
}

TEST_CASE("is: zero shift reproduces crude on matched streams") {
  const BsParams params{50, 55, 0.05, 0.2, 1.0};
  const Payoff payoff = make_bs_payoff(params, OptionKind::Call);
  const EstimatorReport crude = crude_estimate(payoff, 50000, kBase);
  const EstimatorReport is = is_estimate(payoff, ShiftedGaussian{{0.0}}, 50000, kBase);
  CHECK(is.value == crude.value);
  CHECK(is.std_error == crude.std_error);
  const VarianceRatioReport vr = variance_ratio(crude, is);
  CHECK(vr.vr == 1.0);
}

TEST_CASE("is: exponential payout with its matching shift has zero variance") {
  const double a = 1.7;
  const Payoff payoff{1, [a](std::span<const double> z) { return std::exp(a * z[0]); }};
  const EstimatorReport report =
      is_estimate(payoff, ShiftedGaussian{{a}}, 20000, kBase);
  CHECK(report.value == doctest::Approx(std::exp(0.5 * a * a)).epsilon(1e-12));
  CHECK(std::sqrt(report.variance) / report.value < 1e-12);
}

TEST_CASE("stratified: single stratum reduces to plain importance sampling") {
  const BsParams params{50, 52, 0.05, 0.25, 1.0};
  const Payoff payoff = make_bs_payoff(params, OptionKind::Call);
  const ShiftedGaussian density{{0.8}};
  StratificationPlan plan;
  plan.direction = {1.0};
  plan.num_strata = 1;
  plan.samples_per_stratum = 20000;
  const EstimatorReport strat = is_stratified_estimate(payoff, density, plan, kBase);
  const EstimatorReport plain = is_estimate(payoff, TrialDensity{density}, 20000, kBase);
  CHECK(strat.value == plain.value);
  CHECK(strat.std_error == plain.std_error);
  CHECK(strat.method == Method::LSIS_Strat);
}

TEST_CASE("stratified: per-stratum occupancy is exact") {
  // Count projections per stratum from an independently recomputed CDF.
  const int d = 3;
  const ShiftedGaussian density{{0.5, 0.25, -0.125}};
  const StratificationPlan plan = plan_along_drift(density.mu, 25, 1000);
  std::vector<long> counts(25, 0);
  const Payoff payoff{
      d, [&](std::span<const double> z) {
        double proj = 0.0;
        for (int i = 0; i < d; ++i) {
          proj += plan.direction[static_cast<std::size_t>(i)] *
                  (z[static_cast<std::size_t>(i)] - density.mu[static_cast<std::size_t>(i)]);
        }
        const double v = normal_cdf(proj);
        const int k = std::min(24, static_cast<int>(v * 25.0));
        ++counts[static_cast<std::size_t>(k)];
        return 1.0;
      }};
  set_max_threads(1);  // counting inside the payoff is not thread safe
  (void)is_stratified_estimate(payoff, density, plan, kBase);
  set_max_threads(0);
  for (long c : counts) CHECK(c == 40);
}

TEST_CASE("stratified: payoffs of the projection collapse with the stratum count") {
  // Midpoint-rule behavior: for a smooth bounded function of the stratified
  // projection the standard error falls like 1/M. The unbounded quadratic
  // keeps improving too, but its outer strata cap the gain (paired runs at
  // M = 1, 10, 100 give a ~23x variance gain overall).
  const int d = 4;
  const DriftVector mu = {0.05, 0.05, 0.05, 0.05};
  const ShiftedGaussian density{mu};
  const StratificationPlan plan1 = plan_along_drift(mu, 1, 40000);
  const StratificationPlan plan10 = plan_along_drift(mu, 10, 40000);
  const StratificationPlan plan100 = plan_along_drift(mu, 100, 40000);

  const Payoff bounded{d, [](std::span<const double> z) {
                         double proj = 0.0;
                         for (double v : z) proj += 0.5 * v;
                         return normal_cdf(proj);
                       }};
  const double b1 = is_stratified_estimate(bounded, density, plan1, kBase).std_error;
  const double b10 = is_stratified_estimate(bounded, density, plan10, kBase).std_error;
  const double b100 = is_stratified_estimate(bounded, density, plan100, kBase).std_error;
  CHECK(b10 < b1 / 6.0);
  CHECK(b100 < b10 / 5.0);

  const Payoff quadratic{d, [](std::span<const double> z) {
                           double proj = 0.0;
                           for (double v : z) proj += 0.5 * v;
                           return proj * proj;
                         }};
  const double q1 = is_stratified_estimate(quadratic, density, plan1, kBase).std_error;
  const double q10 = is_stratified_estimate(quadratic, density, plan10, kBase).std_error;
  const double q100 = is_stratified_estimate(quadratic, density, plan100, kBase).std_error;
  CHECK(q10 < q1 / 1.4);
  CHECK(q100 < q10 / 2.0);
  CHECK(q100 * q100 * 10.0 < q1 * q1);  // at least a tenfold variance gain
}

TEST_CASE("stratified: degenerate direction is rejected") {
  const Payoff payoff = make_bs_payoff(BsParams{}, OptionKind::Call);
  const ShiftedGaussian zero{{0.0}};
  StratificationPlan plan;
  plan.direction = {1.0};
  plan.num_strata = 4;
  plan.samples_per_stratum = 10;
  CHECK_THROWS_AS(is_stratified_estimate(payoff, zero, plan, kBase),
                  std::invalid_argument);
  CHECK_THROWS_AS(plan_along_drift(DriftVector{0.7}, 3, 1000), std::invalid_argument);
}

TEST_CASE("variance ratio: self ratio and scale invariance") {
  const BsParams params{50, 50, 0.05, 0.3, 1.0};
  const Payoff payoff = make_bs_payoff(params, OptionKind::Call);
  const Payoff scaled{1, [&](std::span<const double> z) {
                        return 17.0 * bs_payout(params, z[0], OptionKind::Call);
                      }};
  const EstimatorReport a = crude_estimate(payoff, 20000, kBase);
  const EstimatorReport b = crude_estimate(payoff, 20000, kBase);
  CHECK(variance_ratio(a, b).vr == 1.0);

  const EstimatorReport c = is_estimate(payoff, ShiftedGaussian{{0.6}}, 20000, kBase);
  const EstimatorReport c_scaled =
      is_estimate(scaled, ShiftedGaussian{{0.6}}, 20000, kBase);
  const EstimatorReport a_scaled = crude_estimate(scaled, 20000, kBase);
  CHECK(variance_ratio(a, c).vr ==
        doctest::Approx(variance_ratio(a_scaled, c_scaled).vr).epsilon(1e-12));

  const EstimatorReport tiny = crude_estimate(payoff, 100, kBase);
  CHECK_THROWS_AS(variance_ratio(a, tiny), std::invalid_argument);
}

TEST_CASE("variance ratio: zero IS variance flags infinity") {
  const EstimatorReport crude = crude_estimate(linear_payoff(), 1000, kBase);
  const EstimatorReport degenerate = crude_estimate(constant_payoff(1.0), 1000, kBase);
  const VarianceRatioReport vr = variance_ratio(crude, degenerate);
  CHECK(vr.infinite);
  CHECK(std::isinf(vr.vr));
}

TEST_CASE("variance ratio: repetition spread") {
  std::vector<EstimatorReport> crude_reps, is_reps;
  for (int r = 0; r < 5; ++r) {
    const RngStream base(11, static_cast<std::uint64_t>(r) << 40);
    const BsParams params{50, 55, 0.05, 0.2, 1.0};
    const Payoff payoff = make_bs_payoff(params, OptionKind::Call);
    crude_reps.push_back(crude_estimate(payoff, 20000, base));
    is_reps.push_back(is_estimate(payoff, ShiftedGaussian{{0.7}}, 20000, base));
  }
  const VarianceRatioReport vr = variance_ratio(crude_reps, is_reps);
  CHECK(vr.repetitions == 5);
  CHECK(vr.vr > 1.0);
  CHECK(vr.vr_uncertainty > 0.0);
  CHECK(vr.vr_uncertainty < vr.vr);  // repetitions agree to leading order
}

TEST_CASE("reports are bit-identical for any worker count") {
  const LmmConfig base;
  const InstrumentSpec instrument = Caplet{4, 0.05};
  const LmmConfig sized = config_for_instrument(base, instrument);
  const Payoff payoff = make_instrument_payoff(sized, instrument);
  const DriftVector mu(static_cast<std::size_t>(payoff.dim), 0.05);

  set_max_threads(1);
  const EstimatorReport crude1 = crude_estimate(payoff, 20000, kBase);
  const EstimatorReport is1 = is_estimate(payoff, ShiftedGaussian{mu}, 20000, kBase);
  const EstimatorReport strat1 = is_stratified_estimate(
      payoff, ShiftedGaussian{mu}, plan_along_drift(mu, 10, 20000), kBase);
  set_max_threads(3);
  const EstimatorReport crude3 = crude_estimate(payoff, 20000, kBase);
  const EstimatorReport is3 = is_estimate(payoff, ShiftedGaussian{mu}, 20000, kBase);
  const EstimatorReport strat3 = is_stratified_estimate(
      payoff, ShiftedGaussian{mu}, plan_along_drift(mu, 10, 20000), kBase);
  set_max_threads(0);

  CHECK(crude1.value == crude3.value);
  CHECK(crude1.variance == crude3.variance);
  CHECK(is1.value == is3.value);
  CHECK(is1.variance == is3.variance);
  CHECK(strat1.value == strat3.value);
  CHECK(strat1.std_error == strat3.std_error);
}

TEST_CASE("unbiasedness triangle on a caplet") {
  const LmmConfig base;
  const InstrumentSpec instrument = Caplet{4, 0.05};
  const LmmConfig sized = config_for_instrument(base, instrument);
  const Payoff payoff = make_instrument_payoff(sized, instrument);
  DriftVector mu(static_cast<std::size_t>(payoff.dim), 0.08);

  const long n = 200000;
  const EstimatorReport crude = crude_estimate(payoff, n, kBase);
  const EstimatorReport is = is_estimate(payoff, ShiftedGaussian{mu}, n, kBase);
  const EstimatorReport strat = is_stratified_estimate(
      payoff, ShiftedGaussian{mu}, plan_along_drift(mu, 100, n), kBase);

  auto agree = [](const EstimatorReport& x, const EstimatorReport& y) {
    const double combined =
        std::sqrt(x.std_error * x.std_error + y.std_error * y.std_error);
    return std::fabs(x.value - y.value) <= 3.0 * combined;
  };
  CHECK(agree(crude, is));
  CHECK(agree(crude, strat));
  CHECK(agree(is, strat));

  // weights average to one under the trial measure
  const Payoff unit{payoff.dim, [](std::span<const double>) { return 1.0; }};
  const EstimatorReport w_mean = is_estimate(unit, ShiftedGaussian{mu}, n, kBase);
  CHECK(std::fabs(w_mean.value - 1.0) <= 3.0 * w_mean.std_error);
}
