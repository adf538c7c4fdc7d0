#pragma once

#include "lsis/payoff.hpp"

namespace lsis {

enum class OptionKind { Call, Put };

struct BsParams {
  double spot = 50.0;
  double strike = 50.0;
  double rate = 0.05;
  double sigma = 0.2;
  double maturity = 1.0;
};

// Throws std::invalid_argument unless spot, strike, sigma, maturity > 0.
void validate(const BsParams& params);

// Terminal asset level for a single standard normal draw.
double bs_terminal_spot(const BsParams& params, double z);

// Discounted lognormal one-step payout.
double bs_payout(const BsParams& params, double z, OptionKind kind);

// Analytic option value; the ground truth for unbiasedness checks.
double bs_closed_form(const BsParams& params, OptionKind kind);

// The saddle-point drift: the location of the maximum of log G(z) - z^2/2,
// i.e. the mode of payout times density. Found by a coarse scan plus a
// golden-section refinement on [-10, 10]. Throws std::runtime_error when the
// payout vanishes on the whole bracket.
double ghs_drift(const BsParams& params, OptionKind kind);

// One-draw payoff wrapper for the estimators (dim = 1).
Payoff make_bs_payoff(const BsParams& params, OptionKind kind);

}  // namespace lsis
