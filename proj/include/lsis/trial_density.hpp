#pragma once

#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "lsis/normal_sampling.hpp"
#include "lsis/rng.hpp"

namespace lsis {

using DriftVector = std::vector<double>;

// Piecewise-linear drift in the Euler-step index, one interpolant per factor,
// parameterized by its values at equally spaced knots. With a single knot the
// factor drift is a constant shift; with N_k >= 2 the first and last knots sit
// on the first and last step.
struct KnotDriftSpec {
  int num_factors = 1;
  int knots_per_factor = 1;
  std::vector<double> knot_values;  // num_factors x knots_per_factor, factor-major
  int num_steps = 1;
};

// Expands knot values to the full drift vector, component (step n, factor j)
// at index n * num_factors + j. Throws std::invalid_argument on shape errors
// or when knots outnumber steps.
DriftVector expand_knots(const KnotDriftSpec& spec);

// Standard normal shifted by a drift vector.
struct ShiftedGaussian {
  DriftVector mu;
};

// One-dimensional normal with both location and scale free.
struct ShiftedScaledGaussian {
  double mu = 0.0;
  double sigma = 1.0;
};

// Equal-covariance two-mode Gaussian mixture; w_b = 1 - w_a is implied.
struct TwoModeMixture {
  DriftVector mu_a;
  DriftVector mu_b;
  double w_a = 0.5;
};

using TrialDensity = std::variant<ShiftedGaussian, ShiftedScaledGaussian, TwoModeMixture>;

// Dimension of draws from the density.
int dimension(const TrialDensity& density);

// Throws std::invalid_argument when the density parameters are out of range
// (non-positive sigma, weight outside (0,1), mode dimension mismatch).
void validate(const TrialDensity& density);

// Draws one sample into `out` (size must match the density dimension).
void sample(const TrialDensity& density, RngStream& stream, std::span<double> out);
GaussianSample sample(const TrialDensity& density, RngStream& stream);

// log of the likelihood ratio P(z) / P_trial(z), evaluated stably (log-sum-exp
// for the mixture). Throws std::invalid_argument on dimension mismatch.
double log_weight(const TrialDensity& density, std::span<const double> z);

// Maps a flat optimization vector theta to a density and back. Encodings keep
// the parameters unconstrained: sigma enters through its log, the mixture
// weight through its logit.
class DensityFamily {
 public:
  virtual ~DensityFamily() = default;
  virtual int num_params() const = 0;
  virtual TrialDensity decode(std::span<const double> theta) const = 0;
  virtual std::vector<double> encode(const TrialDensity& density) const = 0;
};

// theta = the drift vector itself.
class ShiftedGaussianFamily final : public DensityFamily {
 public:
  explicit ShiftedGaussianFamily(int dim) : dim_(dim) {}
  int num_params() const override { return dim_; }
  TrialDensity decode(std::span<const double> theta) const override;
  std::vector<double> encode(const TrialDensity& density) const override;

 private:
  int dim_;
};

// theta = (mu, log sigma), d = 1.
class ShiftedScaledFamily final : public DensityFamily {
 public:
  int num_params() const override { return 2; }
  TrialDensity decode(std::span<const double> theta) const override;
  std::vector<double> encode(const TrialDensity& density) const override;
};

// theta = knot values, factor-major; decodes to a ShiftedGaussian with the
// expanded drift.
class KnotDriftFamily final : public DensityFamily {
 public:
  KnotDriftFamily(int num_factors, int knots_per_factor, int num_steps);
  int num_params() const override { return num_factors_ * knots_per_factor_; }
  TrialDensity decode(std::span<const double> theta) const override;
  std::vector<double> encode(const TrialDensity& density) const override;
  int num_factors() const { return num_factors_; }
  int knots_per_factor() const { return knots_per_factor_; }
  int num_steps() const { return num_steps_; }

 private:
  int num_factors_;
  int knots_per_factor_;
  int num_steps_;
};

// theta = (knots of mode a, knots of mode b, logit of w_a).
class MixtureKnotFamily final : public DensityFamily {
 public:
  MixtureKnotFamily(int num_factors, int knots_per_factor, int num_steps);
  int num_params() const override { return 2 * num_factors_ * knots_per_factor_ + 1; }
  TrialDensity decode(std::span<const double> theta) const override;
  std::vector<double> encode(const TrialDensity& density) const override;

 private:
  int num_factors_;
  int knots_per_factor_;
  int num_steps_;
};

}  // namespace lsis
