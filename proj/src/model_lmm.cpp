#include "lsis/model_lmm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lsis {

void validate(const LmmConfig& config) {
  if (!(config.tenor > 0.0) || config.euler_substeps < 1 || config.num_periods < 1 ||
      config.num_rates < 1 || config.num_factors < 1) {
    throw std::invalid_argument("LmmConfig: counts and tenor must be positive");
  }
  if (!(config.sigma0 >= 0.0) || !(config.l0 > 0.0)) {
    throw std::invalid_argument("LmmConfig: sigma0 must be non-negative and l0 positive");
  }
}

int LmmConfig::eta(double t) const {
  if (t < 0.0) throw std::invalid_argument("eta: negative time");
  // Nudge guards against accumulated substep rounding just below a reset.
  return static_cast<int>(std::floor(t / tenor * (1.0 + 1e-12))) + 1;
}

bool RatePath::has_fixing(int i) const {
  return i >= 0 && i < num_rates && !std::isnan(fixings[static_cast<std::size_t>(i)]);
}

double RatePath::fixing(int i) const {
  if (!has_fixing(i)) {
    throw std::runtime_error("RatePath: fixing not available for requested index");
  }
  return fixings[static_cast<std::size_t>(i)];
}

std::vector<double> vol_vector(const LmmConfig& config, int i, double t) {
  validate(config);
  const int eta = config.eta(t);
  if (i < eta) {
    throw std::invalid_argument("vol_vector: rate already fixed, no volatility");
  }
  const int k = i - eta + 1;
  std::vector<double> out(static_cast<std::size_t>(config.num_factors));
  for (int j = 1; j <= config.num_factors; ++j) {
    out[static_cast<std::size_t>(j - 1)] =
        config.sigma0 * (1.0 + config.alpha * j) * (1.0 + config.beta * k);
  }
  return out;
}

double spot_drift(const LmmConfig& config, const LmmState& state, int i) {
  const double t = state.step_index * config.substep();
  const int eta = config.eta_at_substep(state.step_index);
  if (i < eta || i >= static_cast<int>(state.rates.size())) {
    throw std::invalid_argument("spot_drift: rate index out of the live range");
  }
  const std::vector<double> sigma_i = vol_vector(config, i, t);
  double drift = 0.0;
  for (int j = eta; j <= i; ++j) {
    const std::vector<double> sigma_j = vol_vector(config, j, t);
    double cross = 0.0;
    for (int f = 0; f < config.num_factors; ++f) {
      cross += sigma_i[static_cast<std::size_t>(f)] * sigma_j[static_cast<std::size_t>(f)];
    }
    const double hl = config.tenor * state.rates[static_cast<std::size_t>(j)];
    drift += cross * hl / (1.0 + hl);
  }
  return drift;
}

void evolve_path(const LmmConfig& config, std::span<const double> z, RatePath& out) {
  validate(config);
  const int n_steps = config.num_steps();
  const int n_rates = config.num_rates;
  const int n_f = config.num_factors;
  if (z.size() != static_cast<std::size_t>(config.dimension())) {
    throw std::invalid_argument("evolve_path: draw dimension mismatch");
  }

  out.num_rates = n_rates;
  out.num_steps = n_steps;
  out.grid.resize(static_cast<std::size_t>(n_steps + 1) * n_rates);
  out.fixings.assign(static_cast<std::size_t>(n_rates),
                     std::numeric_limits<double>::quiet_NaN());

  // Volatility components depend only on the time-to-maturity index
  // k = i - eta + 1; tabulate them once per call.
  std::vector<double> vol(static_cast<std::size_t>(n_rates + 1) * n_f);
  std::vector<double> vol_normsq(static_cast<std::size_t>(n_rates + 1));
  for (int k = 1; k <= n_rates; ++k) {
    double nsq = 0.0;
    for (int j = 1; j <= n_f; ++j) {
      const double s = config.sigma0 * (1.0 + config.alpha * j) * (1.0 + config.beta * k);
      vol[static_cast<std::size_t>(k) * n_f + (j - 1)] = s;
      nsq += s * s;
    }
    vol_normsq[static_cast<std::size_t>(k)] = nsq;
  }

  std::vector<double> rates(static_cast<std::size_t>(n_rates));
  std::vector<double> next(static_cast<std::size_t>(n_rates));
  for (int i = 0; i < n_rates; ++i) {
    rates[static_cast<std::size_t>(i)] = config.initial_rate(i);
    out.grid[static_cast<std::size_t>(i)] = rates[static_cast<std::size_t>(i)];
  }
  out.fixings[0] = rates[0];  // L_0 fixes at t = 0

  const double h = config.tenor;
  const double h_e = config.substep();
  const double sqrt_h_e = std::sqrt(h_e);
  std::vector<double> accum(static_cast<std::size_t>(n_f));

  for (int n = 0; n < n_steps; ++n) {
    const int eta = config.eta_at_substep(n);
    const double* z_step = z.data() + static_cast<std::size_t>(n) * n_f;
    for (int f = 0; f < n_f; ++f) accum[static_cast<std::size_t>(f)] = 0.0;
    next = rates;
    for (int i = eta; i < n_rates; ++i) {
      const int k = i - eta + 1;
      const double* sig = vol.data() + static_cast<std::size_t>(k) * n_f;
      const double hl = h * rates[static_cast<std::size_t>(i)];
      const double w = hl / (1.0 + hl);
      double drift = 0.0;
      double diffusion = 0.0;
      for (int f = 0; f < n_f; ++f) {
        accum[static_cast<std::size_t>(f)] += sig[f] * w;
        drift += sig[f] * accum[static_cast<std::size_t>(f)];
        diffusion += sig[f] * z_step[f];
      }
      if (!config.enable_drift) drift = 0.0;
      next[static_cast<std::size_t>(i)] =
          rates[static_cast<std::size_t>(i)] *
          std::exp((drift - 0.5 * vol_normsq[static_cast<std::size_t>(k)]) * h_e +
                   diffusion * sqrt_h_e);
    }
    rates.swap(next);
    double* row = out.grid.data() + static_cast<std::size_t>(n + 1) * n_rates;
    for (int i = 0; i < n_rates; ++i) row[i] = rates[static_cast<std::size_t>(i)];
    if ((n + 1) % config.euler_substeps == 0) {
      const int m = (n + 1) / config.euler_substeps;
      if (m < n_rates) out.fixings[static_cast<std::size_t>(m)] = rates[static_cast<std::size_t>(m)];
    }
  }
}

RatePath evolve_path(const LmmConfig& config, std::span<const double> z) {
  RatePath path;
  evolve_path(config, z, path);
  return path;
}

}  // namespace lsis
