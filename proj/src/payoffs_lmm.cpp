#include "lsis/payoffs_lmm.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lsis {

namespace {

struct Horizon {
  int last_fixing;  // latest T_m whose fixing the payout reads
  int last_rate;    // largest rate index referenced
};

Horizon horizon_of(const InstrumentSpec& instrument) {
  return std::visit(
      [](const auto& ins) -> Horizon {
        using T = std::decay_t<decltype(ins)>;
        if constexpr (std::is_same_v<T, Caplet>) {
          return {ins.period, ins.period};
        } else if constexpr (std::is_same_v<T, Cap>) {
          return {ins.last_period, ins.last_period};
        } else if constexpr (std::is_same_v<T, Swaption>) {
          return {ins.expiry_period, ins.final_period - 1};
        } else {
          return {ins.period, ins.period};
        }
      },
      instrument);
}

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

void validate(const LmmConfig& config, const InstrumentSpec& instrument) {
  const Horizon h = horizon_of(instrument);
  const double strike = std::visit([](const auto& ins) { return ins.strike; }, instrument);
  if (!(strike > 0.0)) {
    throw std::invalid_argument("instrument: strike must be positive");
  }
  std::visit(
      [](const auto& ins) {
        using T = std::decay_t<decltype(ins)>;
        if constexpr (std::is_same_v<T, Caplet> || std::is_same_v<T, Straddle>) {
          if (ins.period < 1) throw std::invalid_argument("instrument: period must be >= 1");
        } else if constexpr (std::is_same_v<T, Cap>) {
          if (ins.first_period < 1 || ins.last_period < ins.first_period) {
            throw std::invalid_argument("cap: need 1 <= first <= last");
          }
        } else {
          if (ins.expiry_period < 1 || ins.final_period <= ins.expiry_period) {
            throw std::invalid_argument("swaption: need 1 <= expiry < final");
          }
        }
      },
      instrument);
  if (h.last_fixing > config.num_periods || h.last_rate >= config.num_rates) {
    throw std::invalid_argument("instrument: indices beyond the simulated horizon");
  }
}

double discount_factor(const RatePath& path, const LmmConfig& config, int m) {
  double df = 1.0;
  for (int i = 0; i <= m; ++i) {
    df /= 1.0 + config.tenor * path.fixing(i);
  }
  return df;
}

double caplet_payoff(const RatePath& path, const LmmConfig& config, int m,
                     double strike) {
  return discount_factor(path, config, m) * config.tenor *
         positive_part(path.fixing(m) - strike);
}

double floorlet_payoff(const RatePath& path, const LmmConfig& config, int m,
                       double strike) {
  return discount_factor(path, config, m) * config.tenor *
         positive_part(strike - path.fixing(m));
}

double cap_payoff(const RatePath& path, const LmmConfig& config, int first, int last,
                  double strike) {
  double df = discount_factor(path, config, first - 1);
  double total = 0.0;
  for (int l = first; l <= last; ++l) {
    df /= 1.0 + config.tenor * path.fixing(l);
    total += df * config.tenor * positive_part(path.fixing(l) - strike);
  }
  return total;
}

double swaption_payoff(const RatePath& path, const LmmConfig& config, int expiry,
                       int final, double strike) {
  const int step = expiry * config.euler_substeps;
  // Bonds off the curve observed at expiry; the l = expiry rate is its fixing.
  double bond = 1.0;
  double annuity = 0.0;
  for (int i = expiry + 1; i <= final; ++i) {
    bond /= 1.0 + config.tenor * path.rate(step, i - 1);
    annuity += bond;
  }
  annuity *= config.tenor;
  const double swap_rate = (1.0 - bond) / annuity;
  const double value_at_expiry = annuity * positive_part(swap_rate - strike);
  return discount_factor(path, config, expiry - 1) * value_at_expiry;
}

double straddle_payoff(const RatePath& path, const LmmConfig& config, int m,
                       double strike) {
  return discount_factor(path, config, m) * config.tenor *
         std::fabs(path.fixing(m) - strike);
}

double instrument_payoff(const RatePath& path, const LmmConfig& config,
                         const InstrumentSpec& instrument) {
  return std::visit(
      [&](const auto& ins) -> double {
        using T = std::decay_t<decltype(ins)>;
        if constexpr (std::is_same_v<T, Caplet>) {
          return caplet_payoff(path, config, ins.period, ins.strike);
        } else if constexpr (std::is_same_v<T, Cap>) {
          return cap_payoff(path, config, ins.first_period, ins.last_period, ins.strike);
        } else if constexpr (std::is_same_v<T, Swaption>) {
          return swaption_payoff(path, config, ins.expiry_period, ins.final_period,
                                 ins.strike);
        } else {
          return straddle_payoff(path, config, ins.period, ins.strike);
        }
      },
      instrument);
}

LmmConfig config_for_instrument(const LmmConfig& base, const InstrumentSpec& instrument) {
  const Horizon h = horizon_of(instrument);
  LmmConfig config = base;
  config.num_periods = h.last_fixing;
  config.num_rates = h.last_rate + 1;
  validate(config, instrument);
  return config;
}

Payoff make_instrument_payoff(const LmmConfig& config, const InstrumentSpec& instrument) {
  validate(config);
  validate(config, instrument);
  return Payoff{config.dimension(), [config, instrument](std::span<const double> z) {
                  thread_local RatePath scratch;
                  evolve_path(config, z, scratch);
                  return instrument_payoff(scratch, config, instrument);
                }};
}

std::string describe(const InstrumentSpec& instrument, const LmmConfig& config) {
  std::ostringstream os;
  const double h = config.tenor;
  std::visit(
      [&](const auto& ins) {
        using T = std::decay_t<decltype(ins)>;
        if constexpr (std::is_same_v<T, Caplet>) {
          os << "caplet Tm=" << ins.period * h << " K=" << ins.strike;
        } else if constexpr (std::is_same_v<T, Cap>) {
          os << "cap Tn=" << ins.first_period * h << " TM=" << ins.last_period * h
             << " K=" << ins.strike;
        } else if constexpr (std::is_same_v<T, Swaption>) {
          os << "swaption Tn=" << ins.expiry_period * h
             << " Tfinal=" << ins.final_period * h << " K=" << ins.strike;
        } else {
          os << "straddle Tm=" << ins.period * h << " K=" << ins.strike;
        }
      },
      instrument);
  return os.str();
}

}  // namespace lsis
