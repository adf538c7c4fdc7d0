#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lsis/lsq_optimizer.hpp"
#include "lsis/model_bs.hpp"
#include "lsis/model_lmm.hpp"
#include "lsis/payoffs_lmm.hpp"

namespace lsis {

enum class RunMethod { Crude, Lsis, LsisVol, LsisStrat, LsisMM, Ghs };

std::string run_method_name(RunMethod method);
RunMethod parse_run_method(const std::string& name);

struct BsInstrumentCfg {
  OptionKind kind = OptionKind::Call;
  double strike = 50.0;
  double sigma = 0.2;
};

struct LmmInstrumentCfg {
  InstrumentSpec spec;
  int knots = 0;  // 0: inherit run.knots
};

// A batch of (instrument, method) runs sharing one model and one seed.
struct ExperimentConfig {
  enum class ModelType { BS, LMM };

  std::string name = "experiment";
  ModelType model_type = ModelType::LMM;

  // model.* (BS tier)
  double bs_spot = 50.0;
  double bs_rate = 0.05;
  double bs_maturity = 1.0;
  double bs_sigma = 0.2;

  // model.* (LMM tier); horizon fields are sized per instrument
  LmmConfig lmm;

  std::vector<BsInstrumentCfg> bs_instruments;
  std::vector<LmmInstrumentCfg> lmm_instruments;
  std::vector<RunMethod> methods;

  // run.*
  long paths = 200000;
  int presim_paths = 0;  // 0: tier default (500 for LMM, 50 for BS)
  int knots = 1;
  int strata = 100;
  std::uint64_t seed = 202608;
  int repetitions = 10;

  std::string output_path = "results.csv";

  int instrument_count() const {
    return static_cast<int>(model_type == ModelType::BS ? bs_instruments.size()
                                                        : lmm_instruments.size());
  }
};

// Flat sectioned key = value format; '#' starts a comment. Throws
// std::invalid_argument on unknown keys or malformed values.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

// Throws std::invalid_argument when the configured runs cannot be executed
// (indices beyond the horizon, strata not dividing paths, method/model
// mismatches). Called by run_experiment before any simulation.
void validate_config(const ExperimentConfig& config);

struct ResultRow {
  std::string experiment_id;
  std::string instrument;
  std::string method;
  double price = 0.0;
  double std_error = 0.0;
  double variance_ratio = 1.0;
  double vr_uncertainty = 0.0;
  long n_paths = 0;
  int n_knots = 0;
  int m_strata = 0;
  std::uint64_t seed = 0;
  double wall_time_seconds = 0.0;
  int warning = 0;  // 1 when the optimizer did not converge
};

// Per-optimization diagnostics for callers that want to inspect the fits.
struct OptimizationRecord {
  std::string experiment_id;
  std::string method;
  OptimizationResult result;
  double presim_seconds = 0.0;  // draw generation plus the fit
  double main_seconds = 0.0;    // the estimates the fit fed
};

// Runs every (instrument, method) pair: the crude baseline first, then each
// requested method, warm-starting fits from the previous compatible row.
// Variance ratios come from `repetitions` paired runs on disjoint streams.
// Progress lines go to `progress` when given; optimization diagnostics are
// appended to `opt_log` when given.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      std::ostream* progress = nullptr,
                                      std::vector<OptimizationRecord>* opt_log = nullptr);

// Fixed-header CSV, one row per line, '.' decimal point, UTF-8. Throws
// std::runtime_error naming the path when it cannot be written.
void write_results(const std::vector<ResultRow>& rows, const std::string& path);

std::string results_header();
std::string to_csv_line(const ResultRow& row);

// Parses write_results output back; used for round-trip checks.
std::vector<ResultRow> parse_results(std::istream& in);

}  // namespace lsis
