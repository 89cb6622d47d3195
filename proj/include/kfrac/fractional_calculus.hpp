#pragma once

// Product-integration discretizations of the Riemann-Liouville integral and
// the Caputo derivative on uniform grids, plus the Adams-Bashforth-Moulton
// quadrature weights the time stepper is built on.

#include <kfrac/errors.hpp>
#include <kfrac/gamma.hpp>
#include <kfrac/kernels.hpp>
#include <kfrac/time_grid.hpp>

#include <boost/math/special_functions/beta.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace kfrac {

namespace detail {

// k^a for k = 0..n_max
inline Eigen::VectorXd power_table(double a, int n_max) {
  Eigen::VectorXd p(n_max + 1);
  for (int k = 0; k <= n_max; ++k) p(k) = std::pow(static_cast<double>(k), a);
  return p;
}

// Corrector row for the integral up to t_{target}: coefficients of g_0..g_target
// in h^a/(a(a+1)) * sum c_j g_j ~ int_0^{t_target} (t-τ)^{a-1} ghat(τ) dτ with
// ghat the piecewise-linear interpolant (exact for linear g). pa1 holds k^{a+1}.
inline Eigen::VectorXd corrector_row(double alpha, double h, int target,
                                     const Eigen::VectorXd& pa1) {
  const int m = target - 1;
  const double scale = std::pow(h, alpha) / (alpha * (alpha + 1.0));
  Eigen::VectorXd c(target + 1);
  c(0) = scale * (std::pow(static_cast<double>(m), alpha + 1.0) -
                  (m - alpha) * std::pow(static_cast<double>(m + 1), alpha));
  for (int j = 1; j < target; ++j)
    c(j) = scale * (pa1(target - j + 1) + pa1(target - j - 1) - 2.0 * pa1(target - j));
  c(target) = scale;
  return c;
}

inline void check_path(const SampledPath& path, const char* who) {
  if (path.values.cols() != path.grid.size())
    throw contract_violation(std::string(who) + ": values length must be n_steps + 1");
  if (!path.values.allFinite())
    throw contract_violation(std::string(who) + ": path values must be finite");
}

}  // namespace detail

struct AdamsWeights {
  Eigen::VectorXd predictor;  // b_j, j = 0..n
  Eigen::VectorXd corrector;  // a_j, j = 0..n+1
};

// Quadrature weights for int_0^{t_{n+1}} (t_{n+1}-τ)^{a-1} g(τ) dτ; the caller
// supplies the 1/Gamma(a) prefactor. Predictor is the product-rectangle rule,
// corrector the product-trapezoid rule.
inline AdamsWeights adams_weights(double alpha, int n, double h) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("adams_weights: alpha must lie in (0,1]");
  if (n < 0) throw std::domain_error("adams_weights: n must be nonnegative");
  if (!(h > 0.0)) throw std::domain_error("adams_weights: h must be positive");

  const Eigen::VectorXd pa = detail::power_table(alpha, n + 2);
  const Eigen::VectorXd pa1 = detail::power_table(alpha + 1.0, n + 2);

  AdamsWeights w;
  const double ha = std::pow(h, alpha);
  w.predictor.resize(n + 1);
  for (int j = 0; j <= n; ++j)
    w.predictor(j) = ha / alpha * (pa(n + 1 - j) - pa(n - j));
  w.corrector = detail::corrector_row(alpha, h, n + 1, pa1);
  return w;
}

// Fractional integral I^a g at every node; node 0 is 0. Exact for linear g.
inline SampledPath rl_integral(const SampledPath& path, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::domain_error("rl_integral: alpha must lie in (0,1]");
  detail::check_path(path, "rl_integral");

  const int N = path.grid.n_steps;
  const Eigen::VectorXd pa1 = detail::power_table(alpha + 1.0, N + 1);
  const double inv_gamma = 1.0 / gamma_fn(alpha);

  SampledPath out(path.grid, path.modes());
  for (int n = 1; n <= N; ++n) {
    const Eigen::VectorXd c = detail::corrector_row(alpha, path.grid.h, n, pa1);
    out.values.col(n) = inv_gamma * (path.values.leftCols(n + 1) * c);
  }
  return out;
}

// L1 discretization of the Caputo derivative at nodes 1..n_steps. The value
// at node 0 is not defined by the scheme and is emitted as NaN.
inline SampledPath caputo_apply(const SampledPath& path, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("caputo_apply: alpha must lie in (0,1)");
  detail::check_path(path, "caputo_apply");
  if (path.grid.n_steps < 1)
    throw contract_violation("caputo_apply: need at least 2 nodes");

  const int N = path.grid.n_steps;
  Eigen::VectorXd w(N);  // w_k = (k+1)^{1-a} - k^{1-a}
  for (int k = 0; k < N; ++k)
    w(k) = std::pow(k + 1.0, 1.0 - alpha) - std::pow(static_cast<double>(k), 1.0 - alpha);

  const double pref = std::pow(path.grid.h, -alpha) / gamma_fn(2.0 - alpha);
  const Eigen::MatrixXd diff =
      path.values.rightCols(N) - path.values.leftCols(N);

  SampledPath out(path.grid, path.modes());
  out.values.col(0).setConstant(std::numeric_limits<double>::quiet_NaN());
  for (int n = 1; n <= N; ++n)
    out.values.col(n) = pref * (diff.leftCols(n) * w.head(n).reverse());
  return out;
}

// max_n |(k*l)(t_n) - 1| with each subinterval of the convolution integrated
// exactly through the regularized incomplete beta function; the only residual
// left is accumulated round-off.
inline double convolution_identity_residual(double alpha, const UniformTimeGrid& grid) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("convolution_identity_residual: alpha must lie in (0,1)");

  double worst = 0.0;
  for (int n = 1; n <= grid.n_steps; ++n) {
    double conv = 0.0;
    double prev = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double cur =
          boost::math::ibeta(alpha, 1.0 - alpha, static_cast<double>(j) / n);
      conv += cur - prev;
      prev = cur;
    }
    worst = std::max(worst, std::fabs(conv - 1.0));
  }
  return worst;
}

// Same quantity by endpoint-clamped trapezoid across the double singularity;
// kept as a demonstration of why the exact piecewise evaluation is required.
inline double convolution_identity_residual_naive(double alpha,
                                                  const UniformTimeGrid& grid) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("convolution_identity_residual_naive: alpha must lie in (0,1)");

  double worst = 0.0;
  for (int n = 2; n <= grid.n_steps; ++n) {
    const double tn = grid.t(n);
    auto integrand = [&](int j) {
      const double tau = grid.t(j);
      return kernel_k(tn - tau, alpha) * kernel_l(tau, alpha);
    };
    double sum = 0.5 * (integrand(1) + integrand(n - 1));  // clamped endpoints
    for (int j = 1; j < n; ++j) sum += integrand(j);
    worst = std::max(worst, std::fabs(grid.h * sum - 1.0));
  }
  return worst;
}

}  // namespace kfrac
