#pragma once

// Quantitative checks on computed histories: the three a priori bounds, the
// decay/growth envelopes, the Holder-in-time exponent, the linear relaxation
// oracle, and the spectral regularity series. Bounds with hidden constants are
// reported as calibrated ratios; fixed tolerances apply only where an exact
// oracle exists.

#include <kfrac/fractional_calculus.hpp>
#include <kfrac/mittag_leffler.hpp>
#include <kfrac/problem.hpp>
#include <kfrac/solver.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace kfrac {

namespace detail {

// |f(t_n)|_{L2} restricted to the modes the history carries
inline SampledPath source_norm_path(const SolutionHistory& hist, const ProblemData& pd) {
  SampledPath path(hist.grid, 1);
  for (int n = 0; n < hist.grid.size(); ++n)
    path.values(0, n) = pd.source_at(hist.grid.t(n)).head(hist.modes()).norm();
  return path;
}

inline SampledPath scalar_path(const UniformTimeGrid& grid, const Eigen::VectorXd& v) {
  SampledPath path(grid, 1);
  path.values.row(0) = v.transpose();
  return path;
}

// int_0^T g dt by the product-trapezoid rule (rl_integral at alpha = 1)
inline double time_integral(const UniformTimeGrid& grid, const Eigen::VectorXd& g) {
  return rl_integral(scalar_path(grid, g), 1.0).values(0, grid.n_steps);
}

inline double floored_ratio(double lhs, double rhs) {
  return lhs / std::max(rhs, std::numeric_limits<double>::epsilon());
}

inline double rhs_l2_data(const SolutionHistory& hist, const ProblemData& pd) {
  const double f = l2alpha_norm(source_norm_path(hist, pd), pd.orders.alpha);
  return hist.coefficients.col(0).squaredNorm() + f * f;
}

inline double rhs_x0_data(const SolutionHistory& hist, const ProblemData& pd) {
  const double f = l2alpha_norm(source_norm_path(hist, pd), pd.orders.alpha);
  return hist.x0_norm_sq(0) + f * f;
}

inline void require_unforced(const SolutionHistory& hist, const ProblemData& pd,
                             const char* who) {
  if (pd.memory.beta != 0.0 || pd.b0_bound != 0.0)
    throw contract_violation(std::string(who) + ": memory term must be off");
  if (source_norm_path(hist, pd).values.maxCoeff() != 0.0)
    throw contract_violation(std::string(who) + ": source term must vanish");
}

}  // namespace detail

// sup_n |u|^2 + sup_n (l * |u|^2_X0)(t_n) against |u0|^2 + |f|^2_{L2_alpha}
inline double check_apriori_1(const SolutionHistory& hist, const ProblemData& pd) {
  const Eigen::VectorXd l2sq = hist.coefficients.colwise().squaredNorm().transpose();
  const SampledPath conv =
      rl_integral(detail::scalar_path(hist.grid, hist.x0_norm_sq), pd.orders.alpha);
  const double lhs = l2sq.maxCoeff() + conv.values.maxCoeff();
  return detail::floored_ratio(lhs, detail::rhs_l2_data(hist, pd));
}

struct Apriori2Ratios {
  double ratio;        // sup |u|^2_X0 + sup (l * |(-D)^s u|^2)
  double plain_ratio;  // |(-D)^s u|^2_{L2(0,T;L2)}
};

inline Apriori2Ratios check_apriori_2(const SolutionHistory& hist, const ProblemData& pd) {
  const int m = hist.modes();
  const Eigen::VectorXd lam_sq = pd.assembly.eigenvalues.head(m).array().square();
  Eigen::VectorXd lap_sq(hist.grid.size());
  for (int n = 0; n < hist.grid.size(); ++n)
    lap_sq(n) = (lam_sq.array() * hist.coefficients.col(n).array().square()).sum();

  const SampledPath conv =
      rl_integral(detail::scalar_path(hist.grid, lap_sq), pd.orders.alpha);
  const double rhs = detail::rhs_x0_data(hist, pd);
  return {detail::floored_ratio(hist.x0_norm_sq.maxCoeff() + conv.values.maxCoeff(), rhs),
          detail::floored_ratio(detail::time_integral(hist.grid, lap_sq), rhs)};
}

// |D_t^alpha u|^2_{L2(0,T;L2)} via the L1 derivative of each modal row; the
// undefined node-0 value is clamped to node 1 for the time quadrature
inline double check_apriori_3(const SolutionHistory& hist, const ProblemData& pd) {
  SampledPath path(hist.grid, hist.coefficients);
  const SampledPath dalpha = caputo_apply(path, pd.orders.alpha);
  Eigen::VectorXd sq = dalpha.values.colwise().squaredNorm().transpose();
  sq(0) = sq(1);
  return detail::floored_ratio(detail::time_integral(hist.grid, sq),
                               detail::rhs_x0_data(hist, pd));
}

// Max relative excursion of |a_i(t_n)| above its envelope on unforced runs.
// The fractional Gronwall envelope |a_i(0)| E_alpha(lambda_i C t^alpha) is
// >= |a_i(0)| for nonnegative arguments, so the decay bound |a_i(t)| <=
// |a_i(0)| is the binding one and is what gets checked.
inline double gronwall_envelope(const SolutionHistory& hist, const ProblemData& pd) {
  detail::require_unforced(hist, pd, "gronwall_envelope");
  double worst = 0.0;
  for (int i = 0; i < hist.modes(); ++i) {
    const double env = std::fabs(hist.coefficients(i, 0));
    for (int n = 0; n < hist.grid.size(); ++n) {
      const double v = std::fabs(hist.coefficients(i, n));
      if (env == 0.0) {
        if (v != 0.0) return std::numeric_limits<double>::infinity();
      } else {
        worst = std::max(worst, v / env - 1.0);
      }
    }
  }
  return worst;
}

// Least-squares exponent of |u(t_n) - u(t*)|_{L2} ~ |t_n - t*|^p over the 12
// nearest nodes, excluding coincident nodes and the pair straddling t*
inline double fit_holder(const SolutionHistory& hist, double t_star) {
  const auto& grid = hist.grid;
  if (t_star < 0.0 || t_star > grid.T)
    throw std::domain_error("fit_holder: t_star outside the time horizon");

  Eigen::VectorXd u_star(hist.modes());
  const double xi = t_star / grid.h;
  const int cell = std::min(static_cast<int>(xi), grid.n_steps - 1);
  const double frac = xi - cell;
  u_star = (1.0 - frac) * hist.coefficients.col(cell) +
           frac * hist.coefficients.col(cell + 1);

  std::vector<int> nodes;
  const bool on_node = frac < 1e-12 || frac > 1.0 - 1e-12;
  for (int n = 0; n < grid.size(); ++n) {
    const double d = std::fabs(grid.t(n) - t_star);
    if (d < 0.5 * grid.h) continue;                      // coincident
    if (!on_node && (n == cell || n == cell + 1)) continue;  // straddling pair
    nodes.push_back(n);
  }
  std::sort(nodes.begin(), nodes.end(), [&](int a, int b) {
    return std::fabs(grid.t(a) - t_star) < std::fabs(grid.t(b) - t_star);
  });
  if (nodes.size() < 12)
    throw contract_violation("fit_holder: fewer than 12 usable nodes around t_star");
  nodes.resize(12);

  std::vector<double> xs, ys;
  for (int n : nodes) {
    const double d = (hist.coefficients.col(n) - u_star).norm();
    if (d < 1e-14) continue;
    xs.push_back(std::log(std::fabs(grid.t(n) - t_star)));
    ys.push_back(std::log(d));
  }
  if (xs.size() < 2)
    throw std::domain_error("fit_holder: differences below 1e-14, fit is degenerate");

  const double n = static_cast<double>(xs.size());
  const double sx = std::accumulate(xs.begin(), xs.end(), 0.0);
  const double sy = std::accumulate(ys.begin(), ys.end(), 0.0);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// sup_n |u(t_n)| / (1 + t_n^alpha)
inline double check_growth(const SolutionHistory& hist, const ProblemData& pd) {
  double sup = 0.0;
  for (int n = 0; n < hist.grid.size(); ++n)
    sup = std::max(sup, hist.coefficients.col(n).norm() /
                            (1.0 + std::pow(hist.grid.t(n), pd.orders.alpha)));
  return sup;
}

// largest single-step increase of |u(t_n)|; dissipative runs keep this <= 0
inline double decay_defect(const SolutionHistory& hist) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < hist.grid.n_steps; ++n)
    worst = std::max(worst, hist.coefficients.col(n + 1).norm() -
                                hist.coefficients.col(n).norm());
  return worst;
}

// max |a_i(t_n) - a_i(0) E_alpha(-lambda_i M t_n^alpha)| for constant M,
// no memory, no forcing
inline double linear_oracle_error(const SolutionHistory& hist, const ProblemData& pd) {
  if (pd.law.kind != KirchhoffKind::Constant)
    throw contract_violation("linear_oracle_error: diffusion law must be constant");
  detail::require_unforced(hist, pd, "linear_oracle_error");

  const double M = pd.law.evaluator(0.0);
  const double alpha = pd.orders.alpha;
  double worst = 0.0;
  for (int i = 0; i < hist.modes(); ++i) {
    const double lam = pd.assembly.eigenvalues(i);
    const double a0 = hist.coefficients(i, 0);
    if (a0 == 0.0) continue;
    for (int n = 0; n < hist.grid.size(); ++n) {
      const double exact =
          a0 * mittag_leffler(alpha, -lam * M * std::pow(hist.grid.t(n), alpha));
      worst = std::max(worst, std::fabs(hist.coefficients(i, n) - exact));
    }
  }
  return worst;
}

// sup_n |u_1(t_n) - u_2(t_n)| / delta for a first-mode perturbation of u0
inline double stability_probe(const ProblemData& pd, const SolverConfig& cfg,
                              double delta) {
  if (!(delta > 0.0))
    throw std::domain_error("stability_probe: delta must be positive");
  ModalVector bumped;
  bumped.coefficients = pd.u0.coefficients;
  bumped.coefficients(0) += delta;
  ProblemData perturbed(pd.orders, pd.assembly, pd.law, pd.memory, pd.source, bumped,
                        pd.T);
  const auto base = run(pd, cfg);
  const auto other = run(perturbed, cfg);
  double sup = 0.0;
  for (int n = 0; n < cfg.grid.size(); ++n)
    sup = std::max(sup,
                   (base.coefficients.col(n) - other.coefficients.col(n)).norm());
  return sup / delta;
}

// L2-in-time aggregate of the weighted modal norm, a discrete proxy for the
// H^{s+nu} regularity of the solution; spectral eigenbasis only
inline double regularity_series(const SolutionHistory& hist,
                                const OperatorAssembly& assembly, double nu) {
  if (assembly.mode != OperatorMode::SpectralSine)
    throw unsupported_mode("regularity_series: defined for the spectral mode only");
  if (!(nu >= 0.0))
    throw std::domain_error("regularity_series: nu must be nonnegative");
  const int m = hist.modes();
  const Eigen::VectorXd weights =
      assembly.eigenvalues.head(m).array().pow((assembly.s + nu) / assembly.s);
  Eigen::VectorXd sq(hist.grid.size());
  for (int n = 0; n < hist.grid.size(); ++n)
    sq(n) = (weights.array() * hist.coefficients.col(n).array().square()).sum();
  return std::sqrt(detail::time_integral(hist.grid, sq));
}

struct CheckRecord {
  std::string id;
  std::string claim;
  double value;
  double reference;  // tolerance or target the verdict used; NaN = finiteness only
  bool pass;
};

struct NormReport {
  Eigen::VectorXd times;
  Eigen::VectorXd l2, x0, laplacian_s;  // per-node norms
  Eigen::VectorXd x0_weighted;          // (l * |u|^2_X0)(t_n)
  double sup_l2, sup_x0, sup_laplacian_s;
  double u0_l2, u0_x0, f_l2alpha;
  std::vector<CheckRecord> checks;
};

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> ids = {
      "h2",       "apriori1", "apriori2", "apriori2_plain", "apriori3",  "growth",
      "decay",    "gronwall", "holder",   "linear_oracle",  "regularity"};
  return ids;
}

// Runs the requested checks (default: every check applicable to the problem)
// and aggregates the norm series. Requesting a check whose preconditions the
// problem does not meet is a contract violation.
inline NormReport build_norm_report(const SolutionHistory& hist, const ProblemData& pd,
                                    std::vector<std::string> requested = {}) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double alpha = pd.orders.alpha;
  const int m = hist.modes();

  NormReport rep;
  rep.times.resize(hist.grid.size());
  for (int n = 0; n < hist.grid.size(); ++n) rep.times(n) = hist.grid.t(n);
  rep.l2 = hist.coefficients.colwise().norm().transpose();
  rep.x0 = hist.x0_norm_sq.array().sqrt();
  const Eigen::VectorXd lam_sq = pd.assembly.eigenvalues.head(m).array().square();
  rep.laplacian_s.resize(hist.grid.size());
  for (int n = 0; n < hist.grid.size(); ++n)
    rep.laplacian_s(n) = std::sqrt(
        (lam_sq.array() * hist.coefficients.col(n).array().square()).sum());
  rep.x0_weighted =
      rl_integral(detail::scalar_path(hist.grid, hist.x0_norm_sq), alpha)
          .values.row(0)
          .transpose();
  rep.sup_l2 = rep.l2.maxCoeff();
  rep.sup_x0 = rep.x0.maxCoeff();
  rep.sup_laplacian_s = rep.laplacian_s.maxCoeff();
  rep.u0_l2 = rep.l2(0);
  rep.u0_x0 = rep.x0(0);
  rep.f_l2alpha = l2alpha_norm(detail::source_norm_path(hist, pd), alpha);

  const bool f_zero = detail::source_norm_path(hist, pd).values.maxCoeff() == 0.0;
  const bool memory_off = pd.memory.beta == 0.0 && pd.b0_bound == 0.0;
  const bool law_const = pd.law.kind == KirchhoffKind::Constant;
  const bool spectral = pd.assembly.mode == OperatorMode::SpectralSine;

  if (requested.empty()) {
    for (const auto& id : known_checks()) {
      // holder stays opt-in: the exponent fit is meaningful only on grids
      // fine enough to resolve the initial layer, which the caller must choose
      const bool applicable =
          !((id == "gronwall" && !(f_zero && memory_off)) ||
            (id == "decay" && !(f_zero && memory_off)) ||
            (id == "linear_oracle" && !(f_zero && memory_off && law_const)) ||
            (id == "regularity" && !spectral) || id == "holder");
      if (applicable) requested.push_back(id);
    }
  }

  auto record = [&](const std::string& id, const std::string& claim, double value,
                    double reference, bool pass) {
    rep.checks.push_back({id, claim, value, reference, pass});
  };

  for (const auto& id : requested) {
    if (id == "h2") {
      const auto h2 = check_h2(pd.law, rep.u0_x0, rep.f_l2alpha);
      record(id, "m0 - 4 L_M (|u0|_X0 + |f|_L2a)^2 > 0", h2.margin, 0.0, h2.pass);
    } else if (id == "apriori1") {
      const double r = check_apriori_1(hist, pd);
      record(id, "sup|u|^2 + sup l*|u|_X0^2 <= C (|u0|^2 + |f|_L2a^2)", r, nan,
             std::isfinite(r));
    } else if (id == "apriori2") {
      const double r = check_apriori_2(hist, pd).ratio;
      record(id, "sup|u|_X0^2 + sup l*|Lap^s u|^2 <= C (|u0|_X0^2 + |f|_L2a^2)", r,
             nan, std::isfinite(r));
    } else if (id == "apriori2_plain") {
      const double r = check_apriori_2(hist, pd).plain_ratio;
      record(id, "int_0^T |Lap^s u|^2 <= C (|u0|_X0^2 + |f|_L2a^2)", r, nan,
             std::isfinite(r));
    } else if (id == "apriori3") {
      const double r = check_apriori_3(hist, pd);
      record(id, "int_0^T |D_t^a u|^2 <= C (|u0|_X0^2 + |f|_L2a^2)", r, nan,
             std::isfinite(r));
    } else if (id == "growth") {
      const double v = check_growth(hist, pd);
      record(id, "|u(t)| <= C (1 + t^a)", v, nan, std::isfinite(v));
    } else if (id == "decay") {
      const double v = decay_defect(hist);
      record(id, "|u(t_n)| nonincreasing for unforced runs", v, 1e-10, v <= 1e-10);
    } else if (id == "gronwall") {
      const double v = gronwall_envelope(hist, pd);
      record(id, "|a_i(t)| <= |a_i(0)| for unforced runs", v, 1e-6, v <= 1e-6);
    } else if (id == "holder") {
      try {
        const double p = fit_holder(hist, 0.0);
        record(id, "|u(t) - u(0)| ~ t^alpha near 0", p, alpha,
               std::fabs(p - alpha) <= 0.15);
      } catch (const std::domain_error&) {
        // constant solution: no exponent to fit, nothing to verify
      }
    } else if (id == "linear_oracle") {
      const double v = linear_oracle_error(hist, pd);
      record(id, "a_i(t) = a_i(0) E_a(-lambda_i M t^a) for constant M", v, 1e-3,
             v <= 1e-3);
    } else if (id == "regularity") {
      const double nu = std::min(pd.orders.s, 0.499);
      const double agg = regularity_series(hist, pd.assembly, nu);
      const double r = detail::floored_ratio(agg, rep.u0_x0 + rep.f_l2alpha);
      record(id, "L2-in-time H^{s+nu} series bounded by the data", r, nan,
             std::isfinite(r));
    } else {
      throw contract_violation("build_norm_report: unknown check id '" + id + "'");
    }
  }
  return rep;
}

}  // namespace kfrac
