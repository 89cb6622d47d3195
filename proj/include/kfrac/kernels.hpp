#pragma once

// Power-law kernels of the regularized fractional calculus:
//   k(t) = t^(-alpha) / Gamma(1-alpha)    (differentiation kernel)
//   l(t) = t^(alpha-1) / Gamma(alpha)     (integration kernel)
// Their convolution is identically one; the test suite checks that through
// the Beta-function identity.

#include <kfrac/gamma.hpp>

#include <cmath>
#include <stdexcept>

namespace kfrac {

// Validated pair of fractional orders: alpha in time, s in space, both
// strictly inside (0,1).
struct FractionalOrders {
  double alpha;
  double s;

  FractionalOrders(double alpha_, double s_) : alpha(alpha_), s(s_) {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::domain_error("FractionalOrders: alpha must lie in (0,1)");
    if (!(s > 0.0 && s < 1.0))
      throw std::domain_error("FractionalOrders: s must lie in (0,1)");
  }
};

inline double kernel_k(double t, double alpha) {
  if (!(t > 0.0)) throw std::domain_error("kernel_k: t must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("kernel_k: alpha must lie in (0,1)");
  return std::pow(t, -alpha) / gamma_fn(1.0 - alpha);
}

// alpha = 1 is allowed here: l degenerates to the constant 1 and the
// fractional integral becomes the classical one.
inline double kernel_l(double t, double alpha) {
  if (!(t > 0.0)) throw std::domain_error("kernel_l: t must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("kernel_l: alpha must lie in (0,1]");
  return std::pow(t, alpha - 1.0) / gamma_fn(alpha);
}

}
