#include "lsis/trial_density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lsis {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(std::span<const double> z, std::span<const double> mu) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double d = z[i] - mu[i];
    s += d * d;
  }
  return s;
}

void check_dimension(const TrialDensity& density, std::size_t got) {
  if (static_cast<std::size_t>(dimension(density)) != got) {
    throw std::invalid_argument("trial density: dimension mismatch");
  }
}

}  // namespace

DriftVector expand_knots(const KnotDriftSpec& spec) {
  if (spec.num_factors < 1 || spec.knots_per_factor < 1 || spec.num_steps < 1) {
    throw std::invalid_argument("expand_knots: counts must be positive");
  }
  if (spec.knots_per_factor > spec.num_steps) {
    throw std::invalid_argument("expand_knots: more knots than Euler steps");
  }
  if (spec.knot_values.size() !=
      static_cast<std::size_t>(spec.num_factors) * spec.knots_per_factor) {
    throw std::invalid_argument("expand_knots: knot value shape mismatch");
  }
  const int n_f = spec.num_factors;
  const int n_k = spec.knots_per_factor;
  const int n_s = spec.num_steps;
  DriftVector out(static_cast<std::size_t>(n_f) * n_s);
  for (int f = 0; f < n_f; ++f) {
    const double* knots = spec.knot_values.data() + static_cast<std::size_t>(f) * n_k;
    for (int n = 0; n < n_s; ++n) {
      double value;
      if (n_k == 1) {
        value = knots[0];
      } else {
        // Knot j sits at step position j * (n_s - 1) / (n_k - 1).
        const double pos = static_cast<double>(n) * (n_k - 1) / (n_s - 1);
        int j = std::min(static_cast<int>(pos), n_k - 2);
        const double t = pos - j;
        value = knots[j] * (1.0 - t) + knots[j + 1] * t;
      }
      out[static_cast<std::size_t>(n) * n_f + f] = value;
    }
  }
  return out;
}

int dimension(const TrialDensity& density) {
  return std::visit(
      [](const auto& d) -> int {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ShiftedGaussian>) {
          return static_cast<int>(d.mu.size());
        } else if constexpr (std::is_same_v<T, ShiftedScaledGaussian>) {
          return 1;
        } else {
          return static_cast<int>(d.mu_a.size());
        }
      },
      density);
}

void validate(const TrialDensity& density) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ShiftedGaussian>) {
          if (d.mu.empty()) {
            throw std::invalid_argument("ShiftedGaussian: empty drift");
          }
        } else if constexpr (std::is_same_v<T, ShiftedScaledGaussian>) {
          if (!(d.sigma > 0.0)) {
            throw std::invalid_argument("ShiftedScaledGaussian: sigma must be positive");
          }
        } else {
          if (d.mu_a.empty() || d.mu_a.size() != d.mu_b.size()) {
            throw std::invalid_argument("TwoModeMixture: mode dimension mismatch");
          }
          if (!(d.w_a > 0.0 && d.w_a < 1.0)) {
            throw std::invalid_argument("TwoModeMixture: w_a must lie in (0,1)");
          }
        }
      },
      density);
}

void sample(const TrialDensity& density, RngStream& stream, std::span<double> out) {
  check_dimension(density, out.size());
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ShiftedGaussian>) {
          fill_standard_normal(stream, out);
          for (std::size_t i = 0; i < out.size(); ++i) out[i] += d.mu[i];
        } else if constexpr (std::is_same_v<T, ShiftedScaledGaussian>) {
          out[0] = d.mu + d.sigma * sample_normal(stream);
        } else {
          // Pick a component with the auxiliary uniform, then shift.
          const bool mode_a = stream.next_uniform() < d.w_a;
          const DriftVector& mu = mode_a ? d.mu_a : d.mu_b;
          fill_standard_normal(stream, out);
          for (std::size_t i = 0; i < out.size(); ++i) out[i] += mu[i];
        }
      },
      density);
}

GaussianSample sample(const TrialDensity& density, RngStream& stream) {
  GaussianSample s;
  s.values.resize(static_cast<std::size_t>(dimension(density)));
  sample(density, stream, s.values);
  return s;
}

double log_weight(const TrialDensity& density, std::span<const double> z) {
  check_dimension(density, z.size());
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ShiftedGaussian>) {
          return -dot(d.mu, z) + 0.5 * dot(d.mu, d.mu);
        } else if constexpr (std::is_same_v<T, ShiftedScaledGaussian>) {
          const double x = z[0];
          const double s = (x - d.mu) / d.sigma;
          return std::log(d.sigma) - 0.5 * x * x + 0.5 * s * s;
        } else {
          const double ea = std::log(d.w_a) - 0.5 * squared_distance(z, d.mu_a);
          const double eb = std::log1p(-d.w_a) - 0.5 * squared_distance(z, d.mu_b);
          const double hi = std::max(ea, eb);
          const double log_trial = hi + std::log(std::exp(ea - hi) + std::exp(eb - hi));
          double zsq = 0.0;
          for (double v : z) zsq += v * v;
          return -0.5 * zsq - log_trial;
        }
      },
      density);
}

TrialDensity ShiftedGaussianFamily::decode(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != dim_) {
    throw std::invalid_argument("ShiftedGaussianFamily: theta size mismatch");
  }
  return ShiftedGaussian{DriftVector(theta.begin(), theta.end())};
}

std::vector<double> ShiftedGaussianFamily::encode(const TrialDensity& density) const {
  const auto& d = std::get<ShiftedGaussian>(density);
  if (static_cast<int>(d.mu.size()) != dim_) {
    throw std::invalid_argument("ShiftedGaussianFamily: dimension mismatch");
  }
  return d.mu;
}

TrialDensity ShiftedScaledFamily::decode(std::span<const double> theta) const {
  if (theta.size() != 2) {
    throw std::invalid_argument("ShiftedScaledFamily: theta size mismatch");
  }
  return ShiftedScaledGaussian{theta[0], std::exp(theta[1])};
}

std::vector<double> ShiftedScaledFamily::encode(const TrialDensity& density) const {
  const auto& d = std::get<ShiftedScaledGaussian>(density);
  return {d.mu, std::log(d.sigma)};
}

KnotDriftFamily::KnotDriftFamily(int num_factors, int knots_per_factor, int num_steps)
    : num_factors_(num_factors),
      knots_per_factor_(knots_per_factor),
      num_steps_(num_steps) {
  if (num_factors < 1 || knots_per_factor < 1 || num_steps < 1) {
    throw std::invalid_argument("KnotDriftFamily: counts must be positive");
  }
  if (knots_per_factor > num_steps) {
    throw std::invalid_argument("KnotDriftFamily: more knots than steps");
  }
}

TrialDensity KnotDriftFamily::decode(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != num_params()) {
    throw std::invalid_argument("KnotDriftFamily: theta size mismatch");
  }
  KnotDriftSpec spec{num_factors_, knots_per_factor_,
                     std::vector<double>(theta.begin(), theta.end()), num_steps_};
  return ShiftedGaussian{expand_knots(spec)};
}

std::vector<double> KnotDriftFamily::encode(const TrialDensity& density) const {
  const auto& d = std::get<ShiftedGaussian>(density);
  if (d.mu.size() != static_cast<std::size_t>(num_factors_) * num_steps_) {
    throw std::invalid_argument("KnotDriftFamily: drift dimension mismatch");
  }
  // Read the expanded vector back at the knot positions; exact for members
  // of the family since the interpolant passes through its knots.
  std::vector<double> theta(static_cast<std::size_t>(num_params()));
  for (int f = 0; f < num_factors_; ++f) {
    for (int j = 0; j < knots_per_factor_; ++j) {
      int step = 0;
      if (knots_per_factor_ > 1) {
        step = static_cast<int>(std::lround(
            static_cast<double>(j) * (num_steps_ - 1) / (knots_per_factor_ - 1)));
      }
      theta[static_cast<std::size_t>(f) * knots_per_factor_ + j] =
          d.mu[static_cast<std::size_t>(step) * num_factors_ + f];
    }
  }
  return theta;
}

MixtureKnotFamily::MixtureKnotFamily(int num_factors, int knots_per_factor,
                                     int num_steps)
    : num_factors_(num_factors),
      knots_per_factor_(knots_per_factor),
      num_steps_(num_steps) {
  if (num_factors < 1 || knots_per_factor < 1 || num_steps < 1) {
    throw std::invalid_argument("MixtureKnotFamily: counts must be positive");
  }
  if (knots_per_factor > num_steps) {
    throw std::invalid_argument("MixtureKnotFamily: more knots than steps");
  }
}

TrialDensity MixtureKnotFamily::decode(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != num_params()) {
    throw std::invalid_argument("MixtureKnotFamily: theta size mismatch");
  }
  const int block = num_factors_ * knots_per_factor_;
  KnotDriftSpec spec_a{num_factors_, knots_per_factor_,
                       std::vector<double>(theta.begin(), theta.begin() + block),
                       num_steps_};
  KnotDriftSpec spec_b{
      num_factors_, knots_per_factor_,
      std::vector<double>(theta.begin() + block, theta.begin() + 2 * block),
      num_steps_};
  const double w_a = 1.0 / (1.0 + std::exp(-theta[static_cast<std::size_t>(2 * block)]));
  return TwoModeMixture{expand_knots(spec_a), expand_knots(spec_b), w_a};
}

std::vector<double> MixtureKnotFamily::encode(const TrialDensity& density) const {
  const auto& d = std::get<TwoModeMixture>(density);
  KnotDriftFamily sub(num_factors_, knots_per_factor_, num_steps_);
  const auto a = sub.encode(ShiftedGaussian{d.mu_a});
  const auto b = sub.encode(ShiftedGaussian{d.mu_b});
  std::vector<double> theta;
  theta.reserve(static_cast<std::size_t>(num_params()));
  theta.insert(theta.end(), a.begin(), a.end());
  theta.insert(theta.end(), b.begin(), b.end());
  theta.push_back(std::log(d.w_a / (1.0 - d.w_a)));
  return theta;
}

}  // namespace lsis
