#include "lsis/model_bs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lsis/normal_sampling.hpp"

namespace lsis {

void validate(const BsParams& params) {
  if (!(params.spot > 0.0) || !(params.strike > 0.0) || !(params.sigma > 0.0) ||
      !(params.maturity > 0.0)) {
    throw std::invalid_argument("BsParams: spot, strike, sigma, maturity must be positive");
  }
}

double bs_terminal_spot(const BsParams& params, double z) {
  const double drift =
      (params.rate - 0.5 * params.sigma * params.sigma) * params.maturity;
  return params.spot * std::exp(drift + params.sigma * std::sqrt(params.maturity) * z);
}

double bs_payout(const BsParams& params, double z, OptionKind kind) {
  const double s = bs_terminal_spot(params, z);
  const double intrinsic = kind == OptionKind::Call ? s - params.strike : params.strike - s;
  if (intrinsic <= 0.0) return 0.0;
  return std::exp(-params.rate * params.maturity) * intrinsic;
}

double bs_closed_form(const BsParams& params, OptionKind kind) {
  validate(params);
  const double vol = params.sigma * std::sqrt(params.maturity);
  const double d1 =
      (std::log(params.spot / params.strike) +
       (params.rate + 0.5 * params.sigma * params.sigma) * params.maturity) / vol;
  const double d2 = d1 - vol;
  const double df = std::exp(-params.rate * params.maturity);
  if (kind == OptionKind::Call) {
    return params.spot * normal_cdf(d1) - params.strike * df * normal_cdf(d2);
  }
  return params.strike * df * normal_cdf(-d2) - params.spot * normal_cdf(-d1);
}

namespace {

// log G(z) - z^2/2 for the saddle search; -inf where the payout vanishes.
double saddle_objective(const BsParams& params, OptionKind kind, double z) {
  const double g = bs_payout(params, z, kind);
  if (g <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(g) - 0.5 * z * z;
}

}  // namespace

double ghs_drift(const BsParams& params, OptionKind kind) {
  validate(params);
  constexpr double lo = -10.0;
  constexpr double hi = 10.0;
  constexpr int scan_points = 4001;

  double best_z = 0.0;
  double best_f = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan_points; ++i) {
    const double z = lo + (hi - lo) * i / (scan_points - 1);
    const double f = saddle_objective(params, kind, z);
    if (f > best_f) {
      best_f = f;
      best_z = z;
    }
  }
  if (!std::isfinite(best_f)) {
    throw std::runtime_error("ghs_drift: payout vanishes on the search bracket");
  }

  const double grid = (hi - lo) / (scan_points - 1);
  double a = std::max(lo, best_z - grid);
  double b = std::min(hi, best_z + grid);
  // Golden-section maximization; the objective is strictly concave on the
  // positive-payout region, so the scan bracket contains the optimum.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = saddle_objective(params, kind, x1);
  double f2 = saddle_objective(params, kind, x2);
  while (b - a > 1e-8) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = saddle_objective(params, kind, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = saddle_objective(params, kind, x1);
    }
  }
  return 0.5 * (a + b);
}

Payoff make_bs_payoff(const BsParams& params, OptionKind kind) {
  validate(params);
  return Payoff{1, [params, kind](std::span<const double> z) {
                  return bs_payout(params, z[0], kind);
                }};
}

}  // namespace lsis
