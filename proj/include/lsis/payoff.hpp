#pragma once

#include <functional>
#include <span>

namespace lsis {

// A discounted payout as a deterministic map from the full normal draw that
// drives one path. `dim` is the number of normals the map consumes.
struct Payoff {
  int dim = 1;
  std::function<double(std::span<const double>)> eval;

  double operator()(std::span<const double> z) const { return eval(z); }
};

}  // namespace lsis
