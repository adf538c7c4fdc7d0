#pragma once

#include <span>
#include <string>
#include <vector>

#include "lsis/normal_sampling.hpp"
#include "lsis/payoff.hpp"
#include "lsis/rng.hpp"
#include "lsis/trial_density.hpp"

namespace lsis {

enum class Method { Crude, LSIS, LSIS_Strat, GHS_IS };

std::string method_name(Method method);

struct EstimatorReport {
  double value = 0.0;
  double std_error = 0.0;
  double variance = 0.0;  // effective per-path variance: std_error^2 * num_paths
  long num_paths = 0;
  Method method = Method::Crude;
};

struct VarianceRatioReport {
  double vr = 1.0;
  double vr_uncertainty = 0.0;
  int repetitions = 1;
  bool infinite = false;  // set when the IS variance vanished
};

// Number of worker threads used for path evaluation; results are
// bit-identical for any count because each path owns a stream and the
// reduction is a fixed-shape pairwise tree.
void set_max_threads(int count);
int max_threads();

// Deterministic pairwise sum, independent of threading.
double pairwise_sum(std::span<const double> values);

// Plain average of G over draws from the standard normal. Path p draws from
// stream (base.seed, base.stream_index + p).
EstimatorReport crude_estimate(const Payoff& payoff, long num_paths,
                               const RngStream& base);

// Importance-sampled average of W(Z) G(Z) with Z from the trial density.
EstimatorReport is_estimate(const Payoff& payoff, const TrialDensity& density,
                            long num_paths, const RngStream& base);

// Plan whose direction is mu / ||mu||, with num_paths split evenly across
// `strata` strata. Throws std::invalid_argument when mu = 0 or strata does
// not divide num_paths.
StratificationPlan plan_along_drift(const DriftVector& mu, int strata, long num_paths);

// Importance sampling with the innovation stratified along plan.direction:
// Z = mu + Y, with the projection of Y onto the direction forced to visit
// every stratum equally. The estimate is the equally weighted mean of
// within-stratum means; the standard error combines per-stratum variances.
// With one stratum this is exactly is_estimate on matched streams.
EstimatorReport is_stratified_estimate(const Payoff& payoff, const ShiftedGaussian& density,
                                       const StratificationPlan& plan,
                                       const RngStream& base);

// Squared ratio of standard errors at equal path counts from one paired run.
VarianceRatioReport variance_ratio(const EstimatorReport& crude,
                                   const EstimatorReport& is_report);

// Point estimate from the first pair plus the spread across repetitions.
VarianceRatioReport variance_ratio(std::span<const EstimatorReport> crude_reps,
                                   std::span<const EstimatorReport> is_reps);

}  // namespace lsis
