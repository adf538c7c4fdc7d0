#include "lsis/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lsis/estimator.hpp"

namespace lsis {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for " + key + ": " + value);
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for " + key + ": " + value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad seed value for " + key + ": " + value);
  }
}

int period_from_years(const std::string& key, double years, double tenor) {
  const double ratio = years / tenor;
  const int k = static_cast<int>(std::lround(ratio));
  if (k < 0 || std::fabs(ratio - k) > 1e-9) {
    throw std::invalid_argument("config: " + key +
                                " must be an integer multiple of the tenor");
  }
  return k;
}

// Stream bases: main repetition r uses segment 1 + r, presimulation for row
// i uses segment 2^20 + i. One segment holds up to 2^40 per-path streams.
RngStream segment_stream(std::uint64_t seed, std::uint64_t segment) {
  return RngStream(seed, segment << 40);
}

constexpr std::uint64_t kPresimSegment = 1ull << 20;

struct RawInstrument {
  std::map<std::string, std::string> fields;
};

}  // namespace

std::string run_method_name(RunMethod method) {
  switch (method) {
    case RunMethod::Crude: return "crude";
    case RunMethod::Lsis: return "lsis";
    case RunMethod::LsisVol: return "lsis_vol";
    case RunMethod::LsisStrat: return "lsis_strat";
    case RunMethod::LsisMM: return "lsis_mm";
    case RunMethod::Ghs: return "ghs";
  }
  return "unknown";
}

RunMethod parse_run_method(const std::string& name) {
  if (name == "crude") return RunMethod::Crude;
  if (name == "lsis") return RunMethod::Lsis;
  if (name == "lsis_vol") return RunMethod::LsisVol;
  if (name == "lsis_strat") return RunMethod::LsisStrat;
  if (name == "lsis_mm") return RunMethod::LsisMM;
  if (name == "ghs") return RunMethod::Ghs;
  throw std::invalid_argument("config: unknown method '" + name + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::map<int, RawInstrument> raw_instruments;
  bool model_is_bs = false;
  bool model_seen = false;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key or value");
    }

    if (key.rfind("instrument[", 0) == 0) {
      const auto close = key.find(']');
      if (close == std::string::npos || close + 1 >= key.size() || key[close + 1] != '.') {
        throw std::invalid_argument("config: malformed instrument key " + key);
      }
      const int index = static_cast<int>(parse_long(key, key.substr(11, close - 11)));
      raw_instruments[index].fields[key.substr(close + 2)] = value;
      continue;
    }

    if (key == "name") {
      config.name = value;
    } else if (key == "output") {
      config.output_path = value;
    } else if (key == "methods") {
      std::stringstream ss(value);
      std::string token;
      while (std::getline(ss, token, ',')) {
        config.methods.push_back(parse_run_method(trim(token)));
      }
    } else if (key == "model.type") {
      model_seen = true;
      if (value == "bs") {
        model_is_bs = true;
        config.model_type = ExperimentConfig::ModelType::BS;
      } else if (value == "lmm") {
        model_is_bs = false;
        config.model_type = ExperimentConfig::ModelType::LMM;
      } else {
        throw std::invalid_argument("config: model.type must be bs or lmm");
      }
    } else if (key == "model.spot") {
      config.bs_spot = parse_double(key, value);
    } else if (key == "model.rate") {
      config.bs_rate = parse_double(key, value);
    } else if (key == "model.maturity") {
      config.bs_maturity = parse_double(key, value);
    } else if (key == "model.sigma") {
      config.bs_sigma = parse_double(key, value);
    } else if (key == "model.tenor") {
      config.lmm.tenor = parse_double(key, value);
    } else if (key == "model.euler_substeps") {
      config.lmm.euler_substeps = static_cast<int>(parse_long(key, value));
    } else if (key == "model.num_factors") {
      config.lmm.num_factors = static_cast<int>(parse_long(key, value));
    } else if (key == "model.sigma0") {
      config.lmm.sigma0 = parse_double(key, value);
    } else if (key == "model.alpha") {
      config.lmm.alpha = parse_double(key, value);
    } else if (key == "model.beta") {
      config.lmm.beta = parse_double(key, value);
    } else if (key == "model.l0") {
      config.lmm.l0 = parse_double(key, value);
    } else if (key == "run.paths") {
      config.paths = parse_long(key, value);
    } else if (key == "run.presim_paths") {
      config.presim_paths = static_cast<int>(parse_long(key, value));
    } else if (key == "run.knots") {
      config.knots = static_cast<int>(parse_long(key, value));
    } else if (key == "run.strata") {
      config.strata = static_cast<int>(parse_long(key, value));
    } else if (key == "run.seed") {
      config.seed = parse_u64(key, value);
    } else if (key == "run.repetitions") {
      config.repetitions = static_cast<int>(parse_long(key, value));
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  if (!model_seen) {
    throw std::invalid_argument("config: model.type is required");
  }

  for (const auto& [index, raw] : raw_instruments) {
    (void)index;  // map iteration is ordered; indices give instrument order
    auto field = [&raw](const std::string& name) -> const std::string& {
      const auto it = raw.fields.find(name);
      if (it == raw.fields.end()) {
        throw std::invalid_argument("config: instrument missing field '" + name + "'");
      }
      return it->second;
    };
    auto known = [&raw](std::initializer_list<const char*> names) {
      for (const auto& [k, v] : raw.fields) {
        (void)v;
        if (std::find_if(names.begin(), names.end(),
                         [&k](const char* n) { return k == n; }) == names.end()) {
          throw std::invalid_argument("config: unknown instrument field '" + k + "'");
        }
      }
    };
    const std::string type = field("type");
    if (model_is_bs) {
      known({"type", "strike", "sigma"});
      BsInstrumentCfg ins;
      if (type == "call") {
        ins.kind = OptionKind::Call;
      } else if (type == "put") {
        ins.kind = OptionKind::Put;
      } else {
        throw std::invalid_argument("config: bs instrument type must be call or put");
      }
      ins.strike = parse_double("strike", field("strike"));
      ins.sigma = raw.fields.count("sigma") ? parse_double("sigma", field("sigma"))
                                            : config.bs_sigma;
      config.bs_instruments.push_back(ins);
    } else {
      const double h = config.lmm.tenor;
      LmmInstrumentCfg ins;
      if (raw.fields.count("knots")) {
        ins.knots = static_cast<int>(parse_long("knots", field("knots")));
      }
      const double strike = parse_double("strike", field("strike"));
      if (type == "caplet") {
        known({"type", "strike", "maturity", "knots"});
        ins.spec = Caplet{period_from_years("maturity", parse_double("maturity", field("maturity")), h), strike};
      } else if (type == "cap") {
        known({"type", "strike", "first", "last", "knots"});
        ins.spec = Cap{period_from_years("first", parse_double("first", field("first")), h),
                       period_from_years("last", parse_double("last", field("last")), h), strike};
      } else if (type == "swaption") {
        known({"type", "strike", "expiry", "final", "knots"});
        ins.spec = Swaption{period_from_years("expiry", parse_double("expiry", field("expiry")), h),
                            period_from_years("final", parse_double("final", field("final")), h), strike};
      } else if (type == "straddle") {
        known({"type", "strike", "maturity", "knots"});
        ins.spec = Straddle{period_from_years("maturity", parse_double("maturity", field("maturity")), h), strike};
      } else {
        throw std::invalid_argument("config: unknown lmm instrument type '" + type + "'");
      }
      config.lmm_instruments.push_back(ins);
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  return parse_config(in);
}

void validate_config(const ExperimentConfig& config) {
  if (config.paths < 2) {
    throw std::invalid_argument("config: run.paths must be at least 2");
  }
  if (config.repetitions < 1) {
    throw std::invalid_argument("config: run.repetitions must be positive");
  }
  if (config.presim_paths < 0) {
    throw std::invalid_argument("config: run.presim_paths must be non-negative");
  }
  if (config.knots < 1) {
    throw std::invalid_argument("config: run.knots must be positive");
  }
  const bool is_bs = config.model_type == ExperimentConfig::ModelType::BS;
  for (RunMethod m : config.methods) {
    if (is_bs && (m == RunMethod::LsisStrat || m == RunMethod::LsisMM)) {
      throw std::invalid_argument("config: " + run_method_name(m) +
                                  " is not available for the bs tier");
    }
    if (!is_bs && (m == RunMethod::LsisVol || m == RunMethod::Ghs)) {
      throw std::invalid_argument("config: " + run_method_name(m) +
                                  " is only available for the bs tier");
    }
    if (m == RunMethod::LsisStrat) {
      if (config.strata < 1 || config.paths % config.strata != 0) {
        throw std::invalid_argument(
            "config: run.strata must divide run.paths for lsis_strat");
      }
    }
  }
  if (is_bs) {
    for (const auto& ins : config.bs_instruments) {
      BsParams params{config.bs_spot, ins.strike, config.bs_rate, ins.sigma,
                      config.bs_maturity};
      validate(params);
    }
  } else {
    validate(config.lmm);
    for (const auto& ins : config.lmm_instruments) {
      const LmmConfig sized = config_for_instrument(config.lmm, ins.spec);
      const int n_k = ins.knots > 0 ? ins.knots : config.knots;
      if (n_k > sized.num_steps()) {
        throw std::invalid_argument("config: more knots than Euler steps for " +
                                    describe(ins.spec, sized));
      }
    }
  }
}

namespace {

struct MethodOutcome {
  std::vector<EstimatorReport> reports;  // one per repetition
  int n_knots = 0;
  int m_strata = 0;
  int warning = 0;
};

ResultRow make_row(const ExperimentConfig& config, const std::string& experiment_id,
                   const std::string& instrument, RunMethod method,
                   const MethodOutcome& outcome,
                   const std::vector<EstimatorReport>& crude_reports,
                   double wall_seconds) {
  ResultRow row;
  row.experiment_id = experiment_id;
  row.instrument = instrument;
  row.method = run_method_name(method);
  row.price = outcome.reports[0].value;
  row.std_error = outcome.reports[0].std_error;
  const VarianceRatioReport vr = variance_ratio(crude_reports, outcome.reports);
  row.variance_ratio = vr.vr;
  row.vr_uncertainty = vr.vr_uncertainty;
  row.n_paths = config.paths;
  row.n_knots = outcome.n_knots;
  row.m_strata = outcome.m_strata;
  row.seed = config.seed;
  row.wall_time_seconds = wall_seconds;
  row.warning = outcome.warning;
  return row;
}

void emit_progress(std::ostream* progress, const ExperimentConfig& config,
                   const ResultRow& row) {
  if (!progress) return;
  (*progress) << "[" << config.name << "] " << row.instrument << " | " << row.method
              << " price=" << row.price << " se=" << row.std_error
              << " vr=" << row.variance_ratio << " (" << row.wall_time_seconds << "s)"
              << std::endl;
}

// Single-mode knot fits of the caplet and floorlet branches seed the two
// mixture modes; the weight starts even.
std::vector<double> mixture_start(const ExperimentConfig& config, const LmmConfig& sized,
                                  const Straddle& straddle, int n_k, int presim_n,
                                  const RngStream& presim_base, const LsqConfig& lsq) {
  const KnotDriftFamily sub(sized.num_factors, n_k, sized.num_steps());
  const std::vector<double> zeros(static_cast<std::size_t>(sub.num_params()), 0.0);

  Payoff up{sized.dimension(), [sized, straddle](std::span<const double> z) {
              thread_local RatePath scratch;
              evolve_path(sized, z, scratch);
              return caplet_payoff(scratch, sized, straddle.period, straddle.strike);
            }};
  Payoff down{sized.dimension(), [sized, straddle](std::span<const double> z) {
                thread_local RatePath scratch;
                evolve_path(sized, z, scratch);
                return floorlet_payoff(scratch, sized, straddle.period, straddle.strike);
              }};

  const PresimSample presim_up = make_presim(up, presim_n, presim_base);
  const PresimSample presim_down = make_presim(down, presim_n, presim_base);
  const OptimizationResult fit_up = optimize(presim_up, sub, lsq, zeros);
  const OptimizationResult fit_down = optimize(presim_down, sub, lsq, zeros);

  std::vector<double> theta0;
  theta0.reserve(static_cast<std::size_t>(2 * sub.num_params() + 1));
  theta0.insert(theta0.end(), fit_up.theta_star.begin(), fit_up.theta_star.end());
  theta0.insert(theta0.end(), fit_down.theta_star.begin(), fit_down.theta_star.end());
  theta0.push_back(0.0);  // logit of w_a = 1/2
  (void)config;
  return theta0;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      std::ostream* progress,
                                      std::vector<OptimizationRecord>* opt_log) {
  validate_config(config);
  std::vector<ResultRow> rows;
  const int reps = config.repetitions;
  const bool is_bs = config.model_type == ExperimentConfig::ModelType::BS;
  const int presim_n =
      config.presim_paths > 0 ? config.presim_paths : (is_bs ? 50 : 500);

  // theta from the previous compatible fit, keyed by method family.
  std::map<std::string, OptimizationResult> warm_slots;
  auto warm_theta = [&warm_slots](const std::string& key, const DensityFamily& family)
      -> std::optional<std::vector<double>> {
    const auto it = warm_slots.find(key);
    if (it == warm_slots.end()) return std::nullopt;
    if (static_cast<int>(it->second.theta_star.size()) != family.num_params()) {
      return std::nullopt;
    }
    return warm_start(it->second, family);
  };

  for (int idx = 0; idx < config.instrument_count(); ++idx) {
    const std::string experiment_id = config.name + "[" + std::to_string(idx) + "]";

    Payoff payoff;
    std::string instrument_desc;
    LmmConfig sized = config.lmm;
    BsParams bs_params;
    int n_k = config.knots;
    if (is_bs) {
      const BsInstrumentCfg& ins = config.bs_instruments[static_cast<std::size_t>(idx)];
      bs_params = BsParams{config.bs_spot, ins.strike, config.bs_rate, ins.sigma,
                           config.bs_maturity};
      payoff = make_bs_payoff(bs_params, ins.kind);
      std::ostringstream os;
      os << (ins.kind == OptionKind::Call ? "call" : "put") << " K=" << ins.strike
         << " sigma=" << ins.sigma;
      instrument_desc = os.str();
    } else {
      const LmmInstrumentCfg& ins = config.lmm_instruments[static_cast<std::size_t>(idx)];
      sized = config_for_instrument(config.lmm, ins.spec);
      payoff = make_instrument_payoff(sized, ins.spec);
      instrument_desc = describe(ins.spec, sized);
      if (ins.knots > 0) n_k = ins.knots;
    }

    // Crude baseline: repetition r runs on stream segment 1 + r.
    const auto crude_start = Clock::now();
    std::vector<EstimatorReport> crude_reports;
    crude_reports.reserve(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
      crude_reports.push_back(
          crude_estimate(payoff, config.paths,
                         segment_stream(config.seed, 1 + static_cast<std::uint64_t>(r))));
    }
    const double crude_seconds = seconds_since(crude_start);

    const RngStream presim_base =
        segment_stream(config.seed, kPresimSegment + static_cast<std::uint64_t>(idx));
    const LsqConfig lsq;

    // The single-mode fit backs both lsis and lsis_strat.
    bool have_presim = false;
    PresimSample presim;
    bool have_knot_fit = false;
    OptimizationResult knot_fit;
    double presim_seconds = 0.0;

    auto ensure_presim = [&]() {
      if (have_presim) return;
      const auto t0 = Clock::now();
      presim = make_presim(payoff, presim_n, presim_base);
      presim_seconds += seconds_since(t0);
      have_presim = true;
    };

    auto ensure_knot_fit = [&](const DensityFamily& family, const std::string& warm_key)
        -> const OptimizationResult& {
      if (!have_knot_fit) {
        ensure_presim();
        const auto t0 = Clock::now();
        std::vector<double> theta0(static_cast<std::size_t>(family.num_params()), 0.0);
        if (auto warm = warm_theta(warm_key, family)) theta0 = std::move(*warm);
        knot_fit = optimize(presim, family, lsq, std::move(theta0));
        presim_seconds += seconds_since(t0);
        warm_slots[warm_key] = knot_fit;
        have_knot_fit = true;
      }
      return knot_fit;
    };

    for (RunMethod method : config.methods) {
      const auto method_start = Clock::now();
      MethodOutcome outcome;

      switch (method) {
        case RunMethod::Crude: {
          outcome.reports = crude_reports;
          break;
        }
        case RunMethod::Lsis: {
          const OptimizationResult* fit = nullptr;
          TrialDensity density;
          if (is_bs) {
            const ShiftedGaussianFamily family(1);
            fit = &ensure_knot_fit(family, "lsis_bs");
            density = family.decode(fit->theta_star);
          } else {
            const KnotDriftFamily family(sized.num_factors, n_k, sized.num_steps());
            fit = &ensure_knot_fit(family, "lsis");
            density = family.decode(fit->theta_star);
            outcome.n_knots = n_k;
          }
          outcome.warning = fit->converged ? 0 : 1;
          for (int r = 0; r < reps; ++r) {
            outcome.reports.push_back(is_estimate(
                payoff, density, config.paths,
                segment_stream(config.seed, 1 + static_cast<std::uint64_t>(r))));
          }
          if (opt_log) {
            opt_log->push_back({experiment_id, run_method_name(method), *fit,
                                presim_seconds, seconds_since(method_start)});
          }
          break;
        }
        case RunMethod::LsisVol: {
          const ShiftedScaledFamily family;
          ensure_presim();
          const auto t0 = Clock::now();
          std::vector<double> theta0 = {0.0, 0.0};
          if (auto warm = warm_theta("lsis_vol", family)) theta0 = std::move(*warm);
          const OptimizationResult fit = optimize(presim, family, lsq, std::move(theta0));
          const double fit_seconds = seconds_since(t0);
          warm_slots["lsis_vol"] = fit;
          const TrialDensity density = family.decode(fit.theta_star);
          outcome.warning = fit.converged ? 0 : 1;
          for (int r = 0; r < reps; ++r) {
            outcome.reports.push_back(is_estimate(
                payoff, density, config.paths,
                segment_stream(config.seed, 1 + static_cast<std::uint64_t>(r))));
          }
          if (opt_log) {
            opt_log->push_back({experiment_id, run_method_name(method), fit,
                                presim_seconds + fit_seconds,
                                seconds_since(method_start) - fit_seconds});
          }
          break;
        }
        case RunMethod::LsisStrat: {
          const KnotDriftFamily family(sized.num_factors, n_k, sized.num_steps());
          const OptimizationResult& fit = ensure_knot_fit(family, "lsis");
          const auto density = std::get<ShiftedGaussian>(family.decode(fit.theta_star));
          const StratificationPlan plan =
              plan_along_drift(density.mu, config.strata, config.paths);
          outcome.n_knots = n_k;
          outcome.m_strata = config.strata;
          outcome.warning = fit.converged ? 0 : 1;
          for (int r = 0; r < reps; ++r) {
            outcome.reports.push_back(is_stratified_estimate(
                payoff, density, plan,
                segment_stream(config.seed, 1 + static_cast<std::uint64_t>(r))));
          }
          if (opt_log) {
            opt_log->push_back({experiment_id, run_method_name(method), fit,
                                presim_seconds, seconds_since(method_start)});
          }
          break;
        }
        case RunMethod::LsisMM: {
          const MixtureKnotFamily family(sized.num_factors, n_k, sized.num_steps());
          ensure_presim();
          const auto t0 = Clock::now();
          std::vector<double> theta0;
          if (auto warm = warm_theta("lsis_mm", family)) {
            theta0 = std::move(*warm);
          } else if (const auto* straddle =
                         std::get_if<Straddle>(&config.lmm_instruments[static_cast<std::size_t>(idx)].spec)) {
            theta0 = mixture_start(config, sized, *straddle, n_k, presim_n, presim_base, lsq);
          } else {
            // Generic seeding: opposed copies of the single-mode fit.
            const KnotDriftFamily sub(sized.num_factors, n_k, sized.num_steps());
            const OptimizationResult& single = ensure_knot_fit(sub, "lsis");
            theta0.reserve(static_cast<std::size_t>(family.num_params()));
            theta0.insert(theta0.end(), single.theta_star.begin(), single.theta_star.end());
            for (double v : single.theta_star) theta0.push_back(-v);
            theta0.push_back(0.0);
          }
          const OptimizationResult fit = optimize(presim, family, lsq, std::move(theta0));
          const double fit_seconds = seconds_since(t0);
          warm_slots["lsis_mm"] = fit;
          const TrialDensity density = family.decode(fit.theta_star);
          outcome.n_knots = n_k;
          outcome.warning = fit.converged ? 0 : 1;
          for (int r = 0; r < reps; ++r) {
            outcome.reports.push_back(is_estimate(
                payoff, density, config.paths,
                segment_stream(config.seed, 1 + static_cast<std::uint64_t>(r))));
          }
          if (opt_log) {
            opt_log->push_back({experiment_id, run_method_name(method), fit,
                                presim_seconds + fit_seconds,
                                seconds_since(method_start) - fit_seconds});
          }
          break;
        }
        case RunMethod::Ghs: {
          const BsInstrumentCfg& ins = config.bs_instruments[static_cast<std::size_t>(idx)];
          const double drift = ghs_drift(bs_params, ins.kind);
          const TrialDensity density = ShiftedGaussian{{drift}};
          for (int r = 0; r < reps; ++r) {
            EstimatorReport report = is_estimate(
                payoff, density, config.paths,
                segment_stream(config.seed, 1 + static_cast<std::uint64_t>(r)));
            report.method = Method::GHS_IS;
            outcome.reports.push_back(report);
          }
          break;
        }
      }

      const double wall = method == RunMethod::Crude ? crude_seconds
                                                     : seconds_since(method_start);
      ResultRow row = make_row(config, experiment_id, instrument_desc, method, outcome,
                               crude_reports, wall);
      emit_progress(progress, config, row);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string results_header() {
  return "experiment_id,instrument,method,price,std_error,variance_ratio,"
         "vr_uncertainty,n_paths,n_knots,m_strata,seed,wall_time_seconds,warning";
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string to_csv_line(const ResultRow& row) {
  std::ostringstream os;
  os << row.experiment_id << ',' << row.instrument << ',' << row.method << ','
     << format_double(row.price) << ',' << format_double(row.std_error) << ','
     << format_double(row.variance_ratio) << ',' << format_double(row.vr_uncertainty)
     << ',' << row.n_paths << ',' << row.n_knots << ',' << row.m_strata << ','
     << row.seed << ',' << format_double(row.wall_time_seconds) << ',' << row.warning;
  return os.str();
}

void write_results(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write results file: " + path);
  }
  out << results_header() << '\n';
  for (const ResultRow& row : rows) {
    out << to_csv_line(row) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed for results file: " + path);
  }
}

std::vector<ResultRow> parse_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != results_header()) {
    throw std::runtime_error("results: missing or unexpected header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) fields.push_back(token);
    if (fields.size() != 13) {
      throw std::runtime_error("results: malformed row: " + line);
    }
    ResultRow row;
    row.experiment_id = fields[0];
    row.instrument = fields[1];
    row.method = fields[2];
    row.price = std::strtod(fields[3].c_str(), nullptr);
    row.std_error = std::strtod(fields[4].c_str(), nullptr);
    row.variance_ratio = std::strtod(fields[5].c_str(), nullptr);
    row.vr_uncertainty = std::strtod(fields[6].c_str(), nullptr);
    row.n_paths = std::stol(fields[7]);
    row.n_knots = std::stoi(fields[8]);
    row.m_strata = std::stoi(fields[9]);
    row.seed = std::stoull(fields[10]);
    row.wall_time_seconds = std::strtod(fields[11].c_str(), nullptr);
    row.warning = std::stoi(fields[12]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace lsis
