#pragma once

// Primitive distributions: densities, quantile functions and Wiener-process
// realizations.

#include <cstdint>
#include <vector>

#include "dppl/ast.hpp"

namespace dppl {

struct DistParams {
  PrimDist dist;
  std::vector<double> params;
};

bool valid_params(const DistParams& d);

// Generalized inverse CDF. Throws RuntimeAbort on invalid parameters.
double quantile(const DistParams& d, double p);
// Density; zero for invalid parameters or points outside the support.
double pdf(const DistParams& d, double x);

double normal_quantile(double p);
double normal_cdf(double x);
double pdf_gaussian(double mu, double sigma, double x);
double pdf_beta(double a, double b, double x);
// Regularized incomplete beta I_x(a, b).
double beta_cdf(double a, double b, double x);
double beta_quantile(double a, double b, double p);

// One realization of the double-sided Wiener process.
//
// The realization key is derived from the seed head. Values at the dyadic
// nodes 2^m (m >= 0) come from independent increments; every other node is a
// Levy midpoint refinement of its enclosing dyadic interval, down to a finest
// spacing of 2^-20. A node is a pure function of (key, node), so queries can
// arrive in any order from any thread. Between finest nodes the path is
// linearly interpolated. Negative times use an independent sub-key.
class WienerPath {
 public:
  static constexpr int kFinestLevel = 20;

  explicit WienerPath(double handle);

  double handle() const { return handle_; }
  std::uint64_t key() const { return key_; }

  // Throws RuntimeAbort for non-finite or out-of-range x.
  double operator()(double x) const;

 private:
  double one_sided(std::uint64_t key, double t) const;

  double handle_;
  std::uint64_t key_;
};

}  // namespace dppl
