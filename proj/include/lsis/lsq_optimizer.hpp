#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lsis/payoff.hpp"
#include "lsis/rng.hpp"
#include "lsis/trial_density.hpp"

namespace lsis {

// The frozen presimulation sample: draws from the original measure with their
// payouts cached. The draws are generated once and reused for every objective
// evaluation during the fit, so objective differences between parameter sets
// are far more accurate than the objective values themselves.
struct PresimSample {
  std::vector<double> draws;  // size x dim, row-major
  int dim = 1;
  std::vector<double> payouts;
  std::vector<double> log_abs_payouts;  // log|G|, -inf where G == 0

  int size() const { return static_cast<int>(payouts.size()); }
  std::span<const double> draw(int i) const {
    return {draws.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
};

// Draws `count` paths from the original measure through per-path streams
// (base + i) and caches payouts.
PresimSample make_presim(const Payoff& payoff, int count, const RngStream& base);

enum class LsqTarget {
  SecondMoment,    // fit W^{1/2} G to zero
  PseudoVariance,  // fit W^{1/2} G to a guess of the option value
};

struct LsqConfig {
  int max_iterations = 50;
  double relative_tolerance = 1e-6;
  double initial_damping = 1e-3;
  LsqTarget target_mode = LsqTarget::SecondMoment;
  std::optional<double> v_t;  // PseudoVariance target; presample mean if absent
};

struct OptimizationResult {
  std::vector<double> theta_star;
  std::vector<double> objective_trace;  // initial value then accepted steps
  int iterations_used = 0;
  bool converged = false;
};

// Fit target resolved against the presample (0 for SecondMoment, v_t or the
// presample payout mean for PseudoVariance).
double resolve_target(const LsqConfig& config, const PresimSample& presim);

// residual_i = W_theta(Z_i)^{1/2} G(Z_i) - target, evaluated in log space
// where G != 0. Throws std::invalid_argument for negative payouts in
// SecondMoment mode.
void residuals(const DensityFamily& family, std::span<const double> theta,
               const PresimSample& presim, const LsqConfig& config,
               std::span<double> out);

// Mean squared residual; equals the Monte Carlo second-moment estimate in
// SecondMoment mode.
double objective_value(const DensityFamily& family, std::span<const double> theta,
                       const PresimSample& presim, const LsqConfig& config);

// Evaluates all residuals for a parameter vector.
using ResidualFn =
    std::function<void(std::span<const double> theta, std::span<double> out)>;

// Damped Gauss-Newton (Levenberg-Marquardt) minimization of the mean squared
// residual over theta, with forward-difference Jacobians. The damping factor
// shrinks tenfold on accepted steps and grows tenfold on rejections; the
// accepted-step objective trace never increases. Convergence is declared when
// the relative objective change falls below the tolerance; damping overflow
// returns the best point seen with converged = false.
OptimizationResult minimize_least_squares(const ResidualFn& fn, int n_points,
                                          int n_params, const LsqConfig& config,
                                          std::vector<double> theta0);

// The importance-sampling fit: least squares on W^{1/2} G residuals over the
// frozen presample.
OptimizationResult optimize(const PresimSample& presim, const DensityFamily& family,
                            const LsqConfig& config, std::vector<double> theta0);

// Previous optimum as the starting point of a compatible fit. Throws
// std::invalid_argument when parameter counts differ.
std::vector<double> warm_start(const OptimizationResult& previous,
                               const DensityFamily& family);

}  // namespace lsis
