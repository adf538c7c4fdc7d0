#include "lsis/lsq_optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lsis/normal_sampling.hpp"

namespace lsis {

namespace {

constexpr double kDampingLimit = 1e12;

// Solves A x = b for symmetric positive definite A (dense, row-major) by
// Cholesky factorization. Returns false if the factorization breaks down.
bool solve_spd(std::vector<double> a, std::vector<double> b, int n,
               std::vector<double>& x) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = a[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k) {
        sum -= a[static_cast<std::size_t>(i) * n + k] *
               a[static_cast<std::size_t>(j) * n + k];
      }
      if (i == j) {
        if (!(sum > 0.0)) return false;
        a[static_cast<std::size_t>(i) * n + j] = std::sqrt(sum);
      } else {
        a[static_cast<std::size_t>(i) * n + j] =
            sum / a[static_cast<std::size_t>(j) * n + j];
      }
    }
  }
  // Forward then backward substitution in place.
  for (int i = 0; i < n; ++i) {
    double sum = b[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) {
      sum -= a[static_cast<std::size_t>(i) * n + k] * b[static_cast<std::size_t>(k)];
    }
    b[static_cast<std::size_t>(i)] = sum / a[static_cast<std::size_t>(i) * n + i];
  }
  x.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double sum = b[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) {
      sum -= a[static_cast<std::size_t>(k) * n + i] * x[static_cast<std::size_t>(k)];
    }
    x[static_cast<std::size_t>(i)] = sum / a[static_cast<std::size_t>(i) * n + i];
  }
  return true;
}

double mean_square(std::span<const double> r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s / static_cast<double>(r.size());
}

}  // namespace

PresimSample make_presim(const Payoff& payoff, int count, const RngStream& base) {
  if (count < 1) {
    throw std::invalid_argument("make_presim: count must be positive");
  }
  PresimSample presim;
  presim.dim = payoff.dim;
  presim.draws.resize(static_cast<std::size_t>(count) * payoff.dim);
  presim.payouts.resize(static_cast<std::size_t>(count));
  presim.log_abs_payouts.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    RngStream stream = base.substream(static_cast<std::uint64_t>(i));
    std::span<double> z{presim.draws.data() + static_cast<std::size_t>(i) * payoff.dim,
                        static_cast<std::size_t>(payoff.dim)};
    fill_standard_normal(stream, z);
    const double g = payoff(z);
    presim.payouts[static_cast<std::size_t>(i)] = g;
    presim.log_abs_payouts[static_cast<std::size_t>(i)] =
        g == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::fabs(g));
  }
  return presim;
}

double resolve_target(const LsqConfig& config, const PresimSample& presim) {
  if (config.target_mode == LsqTarget::SecondMoment) return 0.0;
  if (config.v_t) return *config.v_t;
  double sum = 0.0;
  for (double g : presim.payouts) sum += g;
  return sum / static_cast<double>(presim.size());
}

void residuals(const DensityFamily& family, std::span<const double> theta,
               const PresimSample& presim, const LsqConfig& config,
               std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(presim.size())) {
    throw std::invalid_argument("residuals: output size mismatch");
  }
  const double target = resolve_target(config, presim);
  const TrialDensity density = family.decode(theta);
  for (int i = 0; i < presim.size(); ++i) {
    const double g = presim.payouts[static_cast<std::size_t>(i)];
    if (g < 0.0 && config.target_mode == LsqTarget::SecondMoment) {
      throw std::invalid_argument(
          "residuals: negative payout in SecondMoment mode; use PseudoVariance "
          "or split the payout");
    }
    double value = 0.0;
    if (g != 0.0) {
      const double lw = log_weight(density, presim.draw(i));
      value = lw == 0.0
                  ? g
                  : std::copysign(std::exp(presim.log_abs_payouts[static_cast<std::size_t>(i)] +
                                           0.5 * lw),
                                  g);
    }
    out[static_cast<std::size_t>(i)] = value - target;
  }
}

double objective_value(const DensityFamily& family, std::span<const double> theta,
                       const PresimSample& presim, const LsqConfig& config) {
  std::vector<double> r(static_cast<std::size_t>(presim.size()));
  residuals(family, theta, presim, config, r);
  return mean_square(r);
}

OptimizationResult minimize_least_squares(const ResidualFn& fn, int n_points,
                                          int n_params, const LsqConfig& config,
                                          std::vector<double> theta0) {
  if (static_cast<int>(theta0.size()) != n_params) {
    throw std::invalid_argument("optimize: theta0 size mismatch");
  }
  if (n_points < n_params) {
    throw std::invalid_argument("optimize: fewer residuals than parameters");
  }

  std::vector<double> r(static_cast<std::size_t>(n_points));
  fn(theta0, r);
  double obj = mean_square(r);
  if (!std::isfinite(obj)) {
    throw std::invalid_argument("optimize: objective not finite at theta0");
  }

  OptimizationResult result;
  result.theta_star = theta0;
  result.objective_trace.push_back(obj);

  std::vector<double> theta = std::move(theta0);
  std::vector<double> jac(static_cast<std::size_t>(n_points) * n_params);
  std::vector<double> r_bumped(static_cast<std::size_t>(n_points));
  std::vector<double> r_trial(static_cast<std::size_t>(n_points));
  std::vector<double> gradient(static_cast<std::size_t>(n_params));
  std::vector<double> hessian(static_cast<std::size_t>(n_params) * n_params);
  std::vector<double> step;
  double damping = config.initial_damping;
  const double tiny = std::numeric_limits<double>::min();

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    result.iterations_used = iter;

    // Forward-difference Jacobian on the frozen residuals.
    for (int k = 0; k < n_params; ++k) {
      const double h = 1e-6 * (1.0 + std::fabs(theta[static_cast<std::size_t>(k)]));
      std::vector<double> bumped = theta;
      bumped[static_cast<std::size_t>(k)] += h;
      fn(bumped, r_bumped);
      for (int i = 0; i < n_points; ++i) {
        jac[static_cast<std::size_t>(i) * n_params + k] =
            (r_bumped[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)]) / h;
      }
    }
    for (int a = 0; a < n_params; ++a) {
      double g = 0.0;
      for (int i = 0; i < n_points; ++i) {
        g += jac[static_cast<std::size_t>(i) * n_params + a] * r[static_cast<std::size_t>(i)];
      }
      gradient[static_cast<std::size_t>(a)] = g;
      for (int b = 0; b <= a; ++b) {
        double s = 0.0;
        for (int i = 0; i < n_points; ++i) {
          s += jac[static_cast<std::size_t>(i) * n_params + a] *
               jac[static_cast<std::size_t>(i) * n_params + b];
        }
        hessian[static_cast<std::size_t>(a) * n_params + b] = s;
        hessian[static_cast<std::size_t>(b) * n_params + a] = s;
      }
    }

    bool accepted = false;
    while (true) {
      // Marquardt scaling of the diagonal.
      std::vector<double> damped = hessian;
      double max_diag = 0.0;
      for (int a = 0; a < n_params; ++a) {
        max_diag = std::max(max_diag, hessian[static_cast<std::size_t>(a) * n_params + a]);
      }
      const double floor = std::max(1e-30, 1e-14 * max_diag);
      for (int a = 0; a < n_params; ++a) {
        double d = hessian[static_cast<std::size_t>(a) * n_params + a];
        if (d < floor) d = floor;
        damped[static_cast<std::size_t>(a) * n_params + a] = d * (1.0 + damping);
      }
      std::vector<double> rhs(static_cast<std::size_t>(n_params));
      for (int a = 0; a < n_params; ++a) rhs[static_cast<std::size_t>(a)] = -gradient[static_cast<std::size_t>(a)];

      double obj_trial = std::numeric_limits<double>::infinity();
      std::vector<double> theta_trial;
      if (solve_spd(std::move(damped), std::move(rhs), n_params, step)) {
        theta_trial = theta;
        for (int a = 0; a < n_params; ++a) theta_trial[static_cast<std::size_t>(a)] += step[static_cast<std::size_t>(a)];
        fn(theta_trial, r_trial);
        obj_trial = mean_square(r_trial);
      }

      // Declare convergence only off a near-Gauss-Newton step: with escalated
      // damping a tiny objective change just means the step was short.
      if (damping <= config.initial_damping * (1.0 + 1e-12) &&
          std::isfinite(obj_trial) &&
          std::fabs(obj - obj_trial) <= config.relative_tolerance * std::max(obj, tiny)) {
        if (obj_trial <= obj) {
          theta = std::move(theta_trial);
          obj = obj_trial;
          r.swap(r_trial);
          result.objective_trace.push_back(obj);
        }
        result.theta_star = theta;
        result.converged = true;
        return result;
      }
      if (std::isfinite(obj_trial) && obj_trial < obj) {
        theta = std::move(theta_trial);
        obj = obj_trial;
        r.swap(r_trial);
        damping = std::max(damping / 10.0, 1e-15);
        accepted = true;
        result.objective_trace.push_back(obj);
        break;
      }
      damping *= 10.0;
      if (damping > kDampingLimit) {
        // No descent direction found; report the best point seen.
        result.theta_star = theta;
        result.converged = false;
        return result;
      }
    }
    (void)accepted;
    result.theta_star = theta;
  }
  result.converged = false;
  return result;
}

OptimizationResult optimize(const PresimSample& presim, const DensityFamily& family,
                            const LsqConfig& config, std::vector<double> theta0) {
  const ResidualFn fn = [&](std::span<const double> theta, std::span<double> out) {
    residuals(family, theta, presim, config, out);
  };
  return minimize_least_squares(fn, presim.size(), family.num_params(), config,
                                std::move(theta0));
}

std::vector<double> warm_start(const OptimizationResult& previous,
                               const DensityFamily& family) {
  if (static_cast<int>(previous.theta_star.size()) != family.num_params()) {
    throw std::invalid_argument("warm_start: parameter count mismatch");
  }
  return previous.theta_star;
}

}  // namespace lsis
