// Acceptance suite: runs the bundled experiment tables once (single
// repetition) and checks every headline number, printing one line per
// criterion. Expect a total runtime of a few minutes per large table.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <vector>

#include "lsis/estimator.hpp"
#include "lsis/experiment.hpp"
#include "lsis/lsq_optimizer.hpp"
#include "lsis/model_bs.hpp"
#include "lsis/normal_sampling.hpp"

using namespace lsis;

namespace {

struct TableRun {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
  std::vector<OptimizationRecord> opt_log;
};

const TableRun& table(const std::string& name) {
  static std::map<std::string, TableRun> cache;
  const auto it = cache.find(name);
  if (it != cache.end()) return it->second;

  TableRun run;
  run.config = load_config(std::string(LSIS_CONFIG_DIR) + "/" + name + ".cfg");
  run.config.repetitions = 1;  // point estimates are enough for the checks
  std::cerr << "=== running table '" << name << "' ===" << std::endl;
  run.rows = run_experiment(run.config, &std::cerr, &run.opt_log);
  return cache.emplace(name, std::move(run)).first->second;
}

const ResultRow& find_row(const TableRun& run, const std::string& instrument,
                          const std::string& method) {
  const ResultRow* found = nullptr;
  for (const ResultRow& row : run.rows) {
    if (row.instrument == instrument && row.method == method) {
      REQUIRE(found == nullptr);
      found = &row;
    }
  }
  REQUIRE(found != nullptr);
  return *found;
}

// Tracks the verdict for the one-line summary while still reporting each
// failed comparison through doctest.
struct Criterion {
  std::string label;
  bool ok = true;

  explicit Criterion(std::string text) : label(std::move(text)) {}
  void check(bool condition, const std::string& what) {
    CHECK_MESSAGE(condition, label, ": ", what);
    ok = ok && condition;
  }
  ~Criterion() {
    std::cout << "[" << label << "] " << (ok ? "PASS" : "FAIL") << std::endl;
  }
};

std::string bs_desc(const char* kind, double strike, double sigma) {
  std::ostringstream os;
  os << kind << " K=" << strike << " sigma=" << sigma;
  return os.str();
}

bool within(double value, double target, double rel) {
  return value >= target * (1.0 - rel) && value <= target * (1.0 + rel);
}

}  // namespace

TEST_CASE("criterion 1: BS pricing sanity") {
  Criterion c("criterion 1: crude BS prices match the closed form");
  for (const char* name : {"calls", "puts"}) {
    const TableRun& run = table(name);
    for (const BsInstrumentCfg& ins : run.config.bs_instruments) {
      const BsParams params{run.config.bs_spot, ins.strike, run.config.bs_rate,
                            ins.sigma, run.config.bs_maturity};
      const double truth = bs_closed_form(params, ins.kind);
      const std::string desc =
          bs_desc(ins.kind == OptionKind::Call ? "call" : "put", ins.strike, ins.sigma);
      const ResultRow& row = find_row(run, desc, "crude");
      c.check(std::fabs(row.price - truth) <= 3.0 * row.std_error,
              desc + " crude price off the closed form");
    }
  }
}

TEST_CASE("criterion 2: call-table variance ratios") {
  Criterion c("criterion 2: call-table variance ratios");
  const TableRun& run = table("calls");
  const double vr_atm_low = find_row(run, bs_desc("call", 50, 0.1), "lsis").variance_ratio;
  c.check(within(vr_atm_low, 7.8, 0.20), "lsis vr at sigma=0.1 K=50, got " +
                                             std::to_string(vr_atm_low));
  const double vr_atm_high = find_row(run, bs_desc("call", 50, 0.3), "lsis").variance_ratio;
  c.check(within(vr_atm_high, 9.9, 0.20), "lsis vr at sigma=0.3 K=50, got " +
                                              std::to_string(vr_atm_high));
  const double vr_itm = find_row(run, bs_desc("call", 30, 0.1), "lsis_vol").variance_ratio;
  c.check(vr_itm >= 850.0 && vr_itm <= 3400.0,
          "lsis_vol vr at sigma=0.1 K=30, got " + std::to_string(vr_itm));
}

TEST_CASE("criterion 3: saddle-point baseline") {
  Criterion c("criterion 3: saddle-point baseline");
  const TableRun& run = table("calls");
  const double vr = find_row(run, bs_desc("call", 50, 0.1), "ghs").variance_ratio;
  c.check(within(vr, 7.8, 0.20), "ghs vr at sigma=0.1 K=50, got " + std::to_string(vr));

  const BsParams params{50, 50, 0.05, 0.1, 1.0};
  const double mu_saddle = ghs_drift(params, OptionKind::Call);
  double mu_fit = 0.0;
  bool found = false;
  for (const OptimizationRecord& record : run.opt_log) {
    if (record.experiment_id == "calls[1]" && record.method == "lsis") {
      mu_fit = record.result.theta_star[0];
      found = true;
    }
  }
  c.check(found, "no fit record for the at-the-money call");
  c.check(std::fabs(mu_saddle - mu_fit) <= 0.1,
          "drifts differ: saddle " + std::to_string(mu_saddle) + " vs fitted " +
              std::to_string(mu_fit));
}

TEST_CASE("criterion 4: caplet table") {
  Criterion c("criterion 4: caplet table");
  const TableRun& run = table("caplets");
  const double vr_short =
      find_row(run, "caplet Tm=1 K=0.04", "lsis").variance_ratio;
  c.check(within(vr_short, 11.4, 0.30),
          "lsis vr at Tm=1 K=0.04, got " + std::to_string(vr_short));
  const double vr_long =
      find_row(run, "caplet Tm=7 K=0.055", "lsis").variance_ratio;
  c.check(within(vr_long, 8.5, 0.50),
          "lsis vr at Tm=7 K=0.055, got " + std::to_string(vr_long));
  const double vr_strat =
      find_row(run, "caplet Tm=1 K=0.04", "lsis_strat").variance_ratio;
  c.check(vr_strat > 200.0,
          "stratified vr at Tm=1 K=0.04, got " + std::to_string(vr_strat));
}

TEST_CASE("criterion 5: cap table") {
  Criterion c("criterion 5: cap table");
  const TableRun& run = table("caps");
  int ratio_in_band = 0;
  int total = 0;
  for (const LmmInstrumentCfg& ins : run.config.lmm_instruments) {
    const LmmConfig sized = config_for_instrument(run.config.lmm, ins.spec);
    const std::string desc = describe(ins.spec, sized);
    const double vr_lsis = find_row(run, desc, "lsis").variance_ratio;
    const double vr_strat = find_row(run, desc, "lsis_strat").variance_ratio;
    c.check(vr_lsis >= 8.0 && vr_lsis <= 25.0,
            desc + " lsis vr out of [8,25]: " + std::to_string(vr_lsis));
    const double gain = vr_strat / vr_lsis;
    if (gain >= 1.5 && gain <= 6.0) ++ratio_in_band;
    ++total;
  }
  c.check(total == 12, "expected 12 cap rows");
  c.check(ratio_in_band >= 10, "stratification gain within [1.5,6] on only " +
                                   std::to_string(ratio_in_band) + "/12 rows");
}

TEST_CASE("criterion 6: swaption table") {
  Criterion c("criterion 6: swaption table");
  const TableRun& run = table("swaptions");
  for (const LmmInstrumentCfg& ins : run.config.lmm_instruments) {
    const LmmConfig sized = config_for_instrument(run.config.lmm, ins.spec);
    const std::string desc = describe(ins.spec, sized);
    const double vr_lsis = find_row(run, desc, "lsis").variance_ratio;
    const double vr_strat = find_row(run, desc, "lsis_strat").variance_ratio;
    c.check(vr_lsis >= 5.0 && vr_lsis <= 30.0,
            desc + " lsis vr out of [5,30]: " + std::to_string(vr_lsis));
    c.check(vr_strat >= 30.0,
            desc + " stratified vr below 30: " + std::to_string(vr_strat));
  }
}

TEST_CASE("criterion 7: straddle mixture") {
  Criterion c("criterion 7: straddle mixture");
  const TableRun& run = table("straddles");
  for (const LmmInstrumentCfg& ins : run.config.lmm_instruments) {
    const LmmConfig sized = config_for_instrument(run.config.lmm, ins.spec);
    const std::string desc = describe(ins.spec, sized);
    const double vr_single = find_row(run, desc, "lsis").variance_ratio;
    const double vr_mixture = find_row(run, desc, "lsis_mm").variance_ratio;
    c.check(vr_mixture > vr_single,
            desc + " mixture does not beat the single mode: " +
                std::to_string(vr_mixture) + " vs " + std::to_string(vr_single));
  }
  const double vr_single = find_row(run, "straddle Tm=1 K=0.05", "lsis").variance_ratio;
  const double vr_mixture = find_row(run, "straddle Tm=1 K=0.05", "lsis_mm").variance_ratio;
  c.check(vr_mixture / vr_single >= 2.0,
          "at-the-money gain below 2: " + std::to_string(vr_mixture / vr_single));
}

TEST_CASE("criterion 8: zero-variance weight algebra") {
  Criterion c("criterion 8: zero-variance weight algebra");
  const double a = 1.7;
  const Payoff payoff{1, [a](std::span<const double> z) { return std::exp(a * z[0]); }};
  const EstimatorReport report =
      is_estimate(payoff, ShiftedGaussian{{a}}, 100000, RngStream(8101, 0));
  c.check(std::sqrt(report.variance) / report.value < 1e-12,
          "relative spread " + std::to_string(std::sqrt(report.variance) / report.value));
}

TEST_CASE("criterion 9: stratification exactness") {
  Criterion c("criterion 9: stratification exactness");

  // occupancy: every stratum of every batch holds exactly its share
  StratificationPlan plan;
  plan.direction = {0.6, 0.0, 0.8};
  plan.num_strata = 40;
  plan.samples_per_stratum = 25;
  RngStream stream(9001, 0);
  for (int batch = 0; batch < 5; ++batch) {
    const auto samples = stratified_normal_directional(stream, plan, 3);
    std::vector<long> counts(40, 0);
    for (const auto& s : samples) {
      double proj = 0.0;
      for (int i = 0; i < 3; ++i) proj += plan.direction[static_cast<std::size_t>(i)] * s.values[static_cast<std::size_t>(i)];
      const double v = normal_cdf(proj);
      ++counts[static_cast<std::size_t>(std::min(39, static_cast<int>(v * 40.0)))];
    }
    for (long count : counts) {
      c.check(count == 25, "stratum occupancy " + std::to_string(count) + " != 25");
    }
  }

  // pooled stratified normals against the exact CDF at the 1% level
  std::vector<double> pooled;
  for (int b = 0; b < 200; ++b) {
    const auto xs = stratified_normal_1d(stream, 100);
    pooled.insert(pooled.end(), xs.begin(), xs.end());
  }
  std::sort(pooled.begin(), pooled.end());
  double d_stat = 0.0;
  const double n = static_cast<double>(pooled.size());
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    const double f = normal_cdf(pooled[i]);
    d_stat = std::max(d_stat, std::fabs(f - static_cast<double>(i) / n));
    d_stat = std::max(d_stat, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  const double critical = 1.628 / std::sqrt(n);
  c.check(d_stat < critical, "KS statistic " + std::to_string(d_stat) +
                                 " above the 1% critical value " +
                                 std::to_string(critical));
}

TEST_CASE("criterion 10: optimizer oracle suite") {
  Criterion c("criterion 10: optimizer oracle suite");

  // closed-form linear least squares in one accepted step
  const std::vector<double> targets = {0.5, 1.5, 2.0, 4.0};
  double mean_t = 0.0;
  for (double t : targets) mean_t += t;
  mean_t /= static_cast<double>(targets.size());
  const ResidualFn fn = [&targets](std::span<const double> theta, std::span<double> out) {
    for (std::size_t i = 0; i < targets.size(); ++i) out[i] = theta[0] - targets[i];
  };
  const OptimizationResult linear =
      minimize_least_squares(fn, static_cast<int>(targets.size()), 1, LsqConfig{}, {0.0});
  c.check(linear.converged, "linear fit did not converge");
  c.check(std::fabs(linear.theta_star[0] - mean_t) <= 1e-8,
          "linear fit missed the mean");
  // the first accepted step must already cover the distance up to the
  // initial damping ratio
  c.check(linear.objective_trace.size() >= 2, "no accepted step recorded");
  if (linear.objective_trace.size() >= 2) {
    double var_t = 0.0;
    for (double t : targets) var_t += (t - mean_t) * (t - mean_t);
    var_t /= static_cast<double>(targets.size());
    const double dist_after = std::sqrt(std::max(0.0, linear.objective_trace[1] - var_t));
    c.check(dist_after <= 2e-3 * mean_t, "first accepted step fell short");
  }

  // monotone accepted-step traces and bounded presimulation cost on every
  // table experiment
  double presim_total = 0.0;
  double main_total = 0.0;
  for (const char* name : {"calls", "puts", "caplets", "caps", "swaptions", "straddles"}) {
    const TableRun& run = table(name);
    for (const OptimizationRecord& record : run.opt_log) {
      for (std::size_t i = 1; i < record.result.objective_trace.size(); ++i) {
        c.check(record.result.objective_trace[i] <=
                    record.result.objective_trace[i - 1] * (1.0 + 1e-12),
                record.experiment_id + "/" + record.method + " trace increased");
      }
      presim_total += record.presim_seconds;
      main_total += record.main_seconds;
    }
  }
  c.check(presim_total <= 0.05 * main_total,
          "presimulation cost " + std::to_string(presim_total) + "s vs main " +
              std::to_string(main_total) + "s");
}

TEST_CASE("criterion 11: unbiasedness sweep") {
  Criterion c("criterion 11: unbiasedness sweep");
  for (const char* name : {"calls", "puts", "caplets", "caps", "swaptions", "straddles"}) {
    const TableRun& run = table(name);
    for (const ResultRow& row : run.rows) {
      if (row.method == "crude") continue;
      const ResultRow& crude = find_row(run, row.instrument, "crude");
      const double combined = std::sqrt(row.std_error * row.std_error +
                                        crude.std_error * crude.std_error);
      c.check(std::fabs(row.price - crude.price) <= 3.0 * combined,
              std::string(name) + " " + row.instrument + " " + row.method +
                  " disagrees with crude by " +
                  std::to_string((row.price - crude.price) / combined) + " SE");
    }
  }
}
