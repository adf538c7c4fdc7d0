#pragma once

#include <span>
#include <vector>

#include "lsis/payoff.hpp"

namespace lsis {

// Multi-factor lognormal forward-rate model under the spot (rolling
// money-market) measure. Reset times are T_i = i * tenor; rate L_i accrues
// over [T_i, T_{i+1}) and fixes at T_i, so L_0 is fixed at time zero. eta(t)
// is the index of the first reset time strictly after t; rates below it are
// frozen at their fixings.
struct LmmConfig {
  double tenor = 0.25;     // h
  int euler_substeps = 3;  // n_e per accrual period
  int num_periods = 1;     // simulated horizon in periods
  int num_rates = 2;       // rates L_0 .. L_{num_rates-1}
  int num_factors = 3;     // N
  double sigma0 = 0.2;
  double alpha = 0.1;
  double beta = 0.01;
  double l0 = 0.05;
  bool enable_drift = true;  // spot-measure drift switch (diagnostics only)

  int num_steps() const { return num_periods * euler_substeps; }
  int dimension() const { return num_steps() * num_factors; }
  double substep() const { return tenor / euler_substeps; }
  double initial_rate(int i) const { return l0 * (1.0 + beta * i); }
  // Smallest index i with T_i > t.
  int eta(double t) const;
  // eta at substep n, computed in integer arithmetic.
  int eta_at_substep(int n) const { return n / euler_substeps + 1; }
};

void validate(const LmmConfig& config);

// Rate vector together with the substep clock, as consumed by the drift.
struct LmmState {
  std::vector<double> rates;
  int step_index = 0;
};

// A realized path: fixings by rate index plus the full rate grid per substep.
struct RatePath {
  int num_rates = 0;
  int num_steps = 0;
  std::vector<double> grid;     // (num_steps + 1) x num_rates, row-major
  std::vector<double> fixings;  // NaN where not yet fixed

  double rate(int step, int i) const {
    return grid[static_cast<std::size_t>(step) * num_rates + i];
  }
  bool has_fixing(int i) const;
  // Realized fixing L_i(T_i); throws std::runtime_error when missing.
  double fixing(int i) const;
};

// Volatility vector of rate i at time t, component j = 1..N equal to
// sigma0 (1 + alpha j)(1 + beta k) with k = i - eta(t) + 1. Throws
// std::invalid_argument when the rate is already fixed.
std::vector<double> vol_vector(const LmmConfig& config, int i, double t);

// Arbitrage-free spot-measure drift of rate i given the current state:
// sum over j = eta..i of sigma_i . sigma_j h L_j / (1 + h L_j).
double spot_drift(const LmmConfig& config, const LmmState& state, int i);

// Log-Euler evolution of the whole curve driven by the normal draw z
// (dimension num_steps * num_factors, substep-major). Records fixings as
// reset times are crossed. Grid and fixings are resized as needed.
void evolve_path(const LmmConfig& config, std::span<const double> z, RatePath& out);
RatePath evolve_path(const LmmConfig& config, std::span<const double> z);

}  // namespace lsis
