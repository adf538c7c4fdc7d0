#pragma once

#include <string>
#include <variant>

#include "lsis/model_lmm.hpp"
#include "lsis/payoff.hpp"

namespace lsis {

// Call on the fixing of L_m, paid at T_{m+1}.
struct Caplet {
  int period = 1;  // m
  double strike = 0.05;
};

// Sum of caplets fixing at T_l, l = first_period .. last_period.
struct Cap {
  int first_period = 1;
  int last_period = 1;
  double strike = 0.05;
};

// Option expiring at T_n to pay fixed K on a swap with payment dates
// T_{n+1} .. T_{final}; final is the paper-style M+1 index.
struct Swaption {
  int expiry_period = 1;   // n
  int final_period = 2;    // M + 1
  double strike = 0.05;
};

// Modulus payout on the fixing of L_m: long caplet plus long floorlet.
struct Straddle {
  int period = 1;
  double strike = 0.05;
};

using InstrumentSpec = std::variant<Caplet, Cap, Swaption, Straddle>;

// Throws std::invalid_argument when indices fall outside the simulated
// horizon of `config` or the strike is not positive.
void validate(const LmmConfig& config, const InstrumentSpec& instrument);

// Realized money-market discount from time 0 to T_{m+1}:
// prod_{i=0..m} 1/(1 + h L_i(T_i)). m = -1 yields 1. Throws
// std::runtime_error when a needed fixing is missing.
double discount_factor(const RatePath& path, const LmmConfig& config, int m);

double caplet_payoff(const RatePath& path, const LmmConfig& config, int m, double strike);
double floorlet_payoff(const RatePath& path, const LmmConfig& config, int m, double strike);
double cap_payoff(const RatePath& path, const LmmConfig& config, int first, int last,
                  double strike);
double swaption_payoff(const RatePath& path, const LmmConfig& config, int expiry,
                       int final, double strike);
double straddle_payoff(const RatePath& path, const LmmConfig& config, int m,
                       double strike);

double instrument_payoff(const RatePath& path, const LmmConfig& config,
                         const InstrumentSpec& instrument);

// A config sized to simulate the instrument: horizon periods up to the last
// fixing the payout needs, rates up to the last index it references.
LmmConfig config_for_instrument(const LmmConfig& base, const InstrumentSpec& instrument);

// Full path payoff: evolves the curve from the draw, then prices. The
// returned object is safe for concurrent calls.
Payoff make_instrument_payoff(const LmmConfig& config, const InstrumentSpec& instrument);

std::string describe(const InstrumentSpec& instrument, const LmmConfig& config);

}  // namespace lsis
