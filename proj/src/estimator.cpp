#include "lsis/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace lsis {

namespace {

std::atomic<int> g_max_threads{0};  // 0: use hardware concurrency

int resolved_threads(long work_items) {
  int n = g_max_threads.load();
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
  }
  if (work_items < 4096) n = 1;
  return static_cast<int>(std::min<long>(n, std::max<long>(1, work_items)));
}

// Runs fn(begin, end) over a partition of [0, count); chunk boundaries do not
// affect results because outputs are indexed per path.
template <typename Fn>
void parallel_chunks(long count, Fn&& fn) {
  const int workers = resolved_threads(count);
  if (workers == 1) {
    fn(0L, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const long chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const long begin = w * chunk;
    const long end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

double pairwise_sum_impl(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(data, half) + pairwise_sum_impl(data + half, n - half);
}

// Mean and population variance via fixed-shape pairwise reductions.
void mean_and_variance(std::span<const double> values, double& mean, double& variance) {
  const std::size_t n = values.size();
  mean = pairwise_sum_impl(values.data(), n) / static_cast<double>(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = values[i] - mean;
    sq[i] = d * d;
  }
  variance = pairwise_sum_impl(sq.data(), n) / static_cast<double>(n);
}

EstimatorReport report_from_values(std::span<const double> values, Method method) {
  EstimatorReport report;
  report.num_paths = static_cast<long>(values.size());
  report.method = method;
  mean_and_variance(values, report.value, report.variance);
  report.std_error = std::sqrt(report.variance / static_cast<double>(report.num_paths));
  return report;
}

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::Crude: return "crude";
    case Method::LSIS: return "lsis";
    case Method::LSIS_Strat: return "lsis_strat";
    case Method::GHS_IS: return "ghs";
  }
  return "unknown";
}

void set_max_threads(int count) { g_max_threads.store(count); }

int max_threads() { return resolved_threads(1L << 30); }

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_impl(values.data(), values.size());
}

EstimatorReport crude_estimate(const Payoff& payoff, long num_paths,
                               const RngStream& base) {
  if (num_paths < 2) {
    throw std::invalid_argument("crude_estimate: need at least two paths");
  }
  std::vector<double> values(static_cast<std::size_t>(num_paths));
  parallel_chunks(num_paths, [&](long begin, long end) {
    std::vector<double> z(static_cast<std::size_t>(payoff.dim));
    for (long p = begin; p < end; ++p) {
      RngStream stream = base.substream(static_cast<std::uint64_t>(p));
      fill_standard_normal(stream, z);
      values[static_cast<std::size_t>(p)] = payoff(z);
    }
  });
  return report_from_values(values, Method::Crude);
}

EstimatorReport is_estimate(const Payoff& payoff, const TrialDensity& density,
                            long num_paths, const RngStream& base) {
  if (num_paths < 2) {
    throw std::invalid_argument("is_estimate: need at least two paths");
  }
  validate(density);
  if (dimension(density) != payoff.dim) {
    throw std::invalid_argument("is_estimate: density and payoff dimension mismatch");
  }
  std::vector<double> values(static_cast<std::size_t>(num_paths));
  parallel_chunks(num_paths, [&](long begin, long end) {
    std::vector<double> z(static_cast<std::size_t>(payoff.dim));
    for (long p = begin; p < end; ++p) {
      RngStream stream = base.substream(static_cast<std::uint64_t>(p));
      sample(density, stream, z);
      const double g = payoff(z);
      values[static_cast<std::size_t>(p)] =
          g == 0.0 ? 0.0 : std::exp(log_weight(density, z)) * g;
    }
  });
  return report_from_values(values, Method::LSIS);
}

StratificationPlan plan_along_drift(const DriftVector& mu, int strata, long num_paths) {
  double norm_sq = 0.0;
  for (double c : mu) norm_sq += c * c;
  const double norm = std::sqrt(norm_sq);
  if (!(norm > 0.0)) {
    throw std::invalid_argument("plan_along_drift: zero drift gives no direction");
  }
  if (strata < 1 || num_paths % strata != 0) {
    throw std::invalid_argument("plan_along_drift: strata must divide the path count");
  }
  StratificationPlan plan;
  plan.direction.resize(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) plan.direction[i] = mu[i] / norm;
  plan.num_strata = strata;
  plan.samples_per_stratum = num_paths / strata;
  return plan;
}

EstimatorReport is_stratified_estimate(const Payoff& payoff, const ShiftedGaussian& density,
                                       const StratificationPlan& plan,
                                       const RngStream& base) {
  double drift_norm = 0.0;
  for (double c : density.mu) drift_norm += c * c;
  if (!(drift_norm > 0.0)) {
    throw std::invalid_argument("is_stratified_estimate: drift must be nonzero");
  }
  validate_plan(plan, payoff.dim);
  if (static_cast<int>(density.mu.size()) != payoff.dim) {
    throw std::invalid_argument("is_stratified_estimate: dimension mismatch");
  }
  if (plan.num_strata == 1) {
    EstimatorReport report =
        is_estimate(payoff, TrialDensity{density}, plan.samples_per_stratum, base);
    report.method = Method::LSIS_Strat;
    return report;
  }

  const long num_paths = plan.total_samples();
  const long per_stratum = plan.samples_per_stratum;
  const int strata = plan.num_strata;
  const int d = payoff.dim;
  const TrialDensity as_density{density};
  std::vector<double> values(static_cast<std::size_t>(num_paths));

  parallel_chunks(num_paths, [&](long begin, long end) {
    std::vector<double> y(static_cast<std::size_t>(d));
    std::vector<double> z(static_cast<std::size_t>(d));
    for (long p = begin; p < end; ++p) {
      const long k = p / per_stratum;  // stratum of this path
      RngStream stream = base.substream(static_cast<std::uint64_t>(p));
      const double v = (static_cast<double>(k) + stream.next_uniform()) / strata;
      const double x = inverse_normal_cdf(v);
      fill_standard_normal(stream, y);
      double dot = 0.0;
      for (int i = 0; i < d; ++i) dot += plan.direction[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
      for (int i = 0; i < d; ++i) {
        z[static_cast<std::size_t>(i)] = density.mu[static_cast<std::size_t>(i)] +
                                         y[static_cast<std::size_t>(i)] +
                                         plan.direction[static_cast<std::size_t>(i)] * (x - dot);
      }
      const double g = payoff(z);
      values[static_cast<std::size_t>(p)] =
          g == 0.0 ? 0.0 : std::exp(log_weight(as_density, z)) * g;
    }
  });

  // Equal-probability strata: the estimate is the mean of within-stratum
  // means and the variance combines per-stratum spreads only.
  EstimatorReport report;
  report.num_paths = num_paths;
  report.method = Method::LSIS_Strat;
  std::vector<double> stratum_means(static_cast<std::size_t>(strata));
  double se_sq = 0.0;
  for (int k = 0; k < strata; ++k) {
    std::span<const double> slice{values.data() + static_cast<std::size_t>(k) * per_stratum,
                                  static_cast<std::size_t>(per_stratum)};
    double mean = 0.0;
    double variance = 0.0;
    mean_and_variance(slice, mean, variance);
    stratum_means[static_cast<std::size_t>(k)] = mean;
    se_sq += variance / static_cast<double>(per_stratum);
  }
  se_sq /= static_cast<double>(strata) * strata;
  report.value = pairwise_sum_impl(stratum_means.data(), stratum_means.size()) /
                 static_cast<double>(strata);
  report.std_error = std::sqrt(se_sq);
  report.variance = se_sq * static_cast<double>(num_paths);
  return report;
}

VarianceRatioReport variance_ratio(const EstimatorReport& crude,
                                   const EstimatorReport& is_report) {
  if (crude.num_paths != is_report.num_paths) {
    throw std::invalid_argument("variance_ratio: path counts must match");
  }
  VarianceRatioReport report;
  report.repetitions = 1;
  if (is_report.std_error == 0.0) {
    report.infinite = true;
    report.vr = std::numeric_limits<double>::infinity();
    return report;
  }
  const double ratio = crude.std_error / is_report.std_error;
  report.vr = ratio * ratio;
  return report;
}

VarianceRatioReport variance_ratio(std::span<const EstimatorReport> crude_reps,
                                   std::span<const EstimatorReport> is_reps) {
  if (crude_reps.empty() || crude_reps.size() != is_reps.size()) {
    throw std::invalid_argument("variance_ratio: need matching nonempty repetition sets");
  }
  VarianceRatioReport report = variance_ratio(crude_reps[0], is_reps[0]);
  report.repetitions = static_cast<int>(crude_reps.size());
  if (crude_reps.size() > 1) {
    std::vector<double> ratios;
    ratios.reserve(crude_reps.size());
    bool any_infinite = report.infinite;
    for (std::size_t r = 0; r < crude_reps.size(); ++r) {
      const VarianceRatioReport single = variance_ratio(crude_reps[r], is_reps[r]);
      any_infinite = any_infinite || single.infinite;
      ratios.push_back(single.vr);
    }
    report.infinite = any_infinite;
    if (!any_infinite) {
      double mean = 0.0;
      for (double v : ratios) mean += v;
      mean /= static_cast<double>(ratios.size());
      double var = 0.0;
      for (double v : ratios) var += (v - mean) * (v - mean);
      var /= static_cast<double>(ratios.size() - 1);
      report.vr_uncertainty = std::sqrt(var);
    }
  }
  return report;
}

}  // namespace lsis
