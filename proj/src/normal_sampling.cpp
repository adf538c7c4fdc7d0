#include "lsis/normal_sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace lsis {

namespace {

// Wichura's AS241 (PPND16) rational approximation to the normal quantile.
double quantile_as241(double u) {
  const double q = u - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kInvSqrt2 = 0.7071067811865475244008444;

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double inverse_normal_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("inverse_normal_cdf: argument must lie in (0,1)");
  }
  double x = quantile_as241(u);
  // One Halley step against the full-precision CDF. Work on the smaller tail
  // so the residual is not swamped by cancellation near 1.
  const double pdf = normal_pdf(x);
  if (pdf > 1e-300) {
    double residual;
    if (u <= 0.5) {
      residual = 0.5 * std::erfc(-x * kInvSqrt2) - u;
    } else {
      residual = (1.0 - u) - 0.5 * std::erfc(x * kInvSqrt2);
    }
    const double r = residual / pdf;
    x -= r / (1.0 + 0.5 * x * r);
  }
  return x;
}

double sample_normal(RngStream& stream) {
  return inverse_normal_cdf(stream.next_uniform());
}

void fill_standard_normal(RngStream& stream, std::span<double> out) {
  for (double& v : out) {
    v = inverse_normal_cdf(stream.next_uniform());
  }
}

GaussianSample sample_standard_normal(RngStream& stream, int d) {
  if (d < 1) {
    throw std::invalid_argument("sample_standard_normal: d must be positive");
  }
  GaussianSample sample;
  sample.values.resize(static_cast<std::size_t>(d));
  fill_standard_normal(stream, sample.values);
  return sample;
}

std::vector<double> stratified_normal_1d(RngStream& stream, int num_strata) {
  if (num_strata < 1) {
    throw std::invalid_argument("stratified_normal_1d: need at least one stratum");
  }
  const double m = static_cast<double>(num_strata);
  std::vector<double> out(static_cast<std::size_t>(num_strata));
  for (int i = 0; i < num_strata; ++i) {
    const double v = (static_cast<double>(i) + stream.next_uniform()) / m;
    out[static_cast<std::size_t>(i)] = inverse_normal_cdf(v);
  }
  return out;
}

void validate_plan(const StratificationPlan& plan, int d) {
  if (plan.num_strata < 1 || plan.samples_per_stratum < 1) {
    throw std::invalid_argument("stratification plan: counts must be positive");
  }
  if (static_cast<int>(plan.direction.size()) != d) {
    throw std::invalid_argument("stratification plan: direction dimension mismatch");
  }
  double norm_sq = 0.0;
  for (double c : plan.direction) norm_sq += c * c;
  if (std::fabs(std::sqrt(norm_sq) - 1.0) > 1e-12) {
    throw std::invalid_argument("stratification plan: direction must be a unit vector");
  }
}

std::vector<double> project_orthogonal(std::span<const double> direction,
                                       std::span<const double> v) {
  if (direction.size() != v.size()) {
    throw std::invalid_argument("project_orthogonal: dimension mismatch");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) dot += direction[i] * v[i];
  std::vector<double> out(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] -= direction[i] * dot;
  return out;
}

std::vector<GaussianSample> stratified_normal_directional(
    RngStream& stream, const StratificationPlan& plan, int d) {
  validate_plan(plan, d);
  const double m = static_cast<double>(plan.num_strata);
  std::vector<GaussianSample> out;
  out.reserve(static_cast<std::size_t>(plan.total_samples()));
  std::vector<double> y(static_cast<std::size_t>(d));
  for (int k = 0; k < plan.num_strata; ++k) {
    for (long j = 0; j < plan.samples_per_stratum; ++j) {
      const double v = (static_cast<double>(k) + stream.next_uniform()) / m;
      const double x = inverse_normal_cdf(v);
      fill_standard_normal(stream, y);
      double dot = 0.0;
      for (int i = 0; i < d; ++i) dot += plan.direction[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
      GaussianSample z;
      z.values.resize(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        z.values[static_cast<std::size_t>(i)] =
            y[static_cast<std::size_t>(i)] +
            plan.direction[static_cast<std::size_t>(i)] * (x - dot);
      }
      out.push_back(std::move(z));
    }
  }
  return out;
}

}  // namespace lsis
