#pragma once

// Time stepper for the coupled modal system
//   D^alpha a_i = -lambda_i M(sigma) a_i + f_i(t)
//              + int_0^t [beta mu_i a_i(tau) + (G(t,tau) a(tau))_i] dtau,
// sigma = sum_j lambda_j a_j^2, advanced by the fractional Adams
// predictor-corrector in Volterra form a(t) = a(0) + I^alpha[F](t). The stiff
// diagonal -lambda_i M a_i is solved implicitly inside each corrector sweep;
// the Kirchhoff scalar and the memory endpoint are relaxed by fixed point.

#include <kfrac/errors.hpp>
#include <kfrac/fractional_calculus.hpp>
#include <kfrac/problem.hpp>
#include <kfrac/spatial_operator.hpp>
#include <kfrac/time_grid.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <ostream>
#include <sstream>
#include <utility>

namespace kfrac {

struct SolverConfig {
  UniformTimeGrid grid;
  int mode_count;
  int corrector_iterations;
  double fixed_point_tol;

  SolverConfig(UniformTimeGrid grid_, int mode_count_, int corrector_iterations_ = 2,
               double fixed_point_tol_ = 1e-12)
      : grid(grid_),
        mode_count(mode_count_),
        corrector_iterations(corrector_iterations_),
        fixed_point_tol(fixed_point_tol_) {
    if (mode_count < 1)
      throw std::domain_error("SolverConfig: mode_count must be positive");
    if (corrector_iterations < 1)
      throw std::domain_error("SolverConfig: corrector_iterations must be positive");
    if (!(fixed_point_tol > 0.0))
      throw std::domain_error("SolverConfig: fixed_point_tol must be positive");
  }
};

struct SolutionHistory {
  UniformTimeGrid grid;
  Eigen::MatrixXd coefficients;  // a_i(t_n), modes x nodes
  Eigen::VectorXd x0_norm_sq;    // sigma_n = sum lambda_i a_i(t_n)^2
  Eigen::VectorXd kirchhoff;     // M_n = M(sigma_n)
  Eigen::MatrixXd memory;        // trapezoid memory integral at each node

  SolutionHistory(UniformTimeGrid grid_, int m)
      : grid(grid_),
        coefficients(Eigen::MatrixXd::Zero(m, grid_.size())),
        x0_norm_sq(Eigen::VectorXd::Zero(grid_.size())),
        kirchhoff(Eigen::VectorXd::Zero(grid_.size())),
        memory(Eigen::MatrixXd::Zero(m, grid_.size())) {
    if (m < 1) throw contract_violation("SolutionHistory: need at least one mode");
  }

  int modes() const { return static_cast<int>(coefficients.rows()); }
};

namespace detail {

// sigma and M(sigma), with the declared floor enforced at the point of use
inline std::pair<double, double> kirchhoff_at(const ProblemData& pd,
                                              const Eigen::VectorXd& lambda,
                                              const Eigen::VectorXd& a) {
  const double sigma = (lambda.array() * a.array().square()).sum();
  const double value = pd.law.evaluator(sigma);
  if (!(value >= pd.law.m0 * (1.0 - 1e-12)))
    throw contract_violation("kirchhoff law returned " + std::to_string(value) +
                             " below its declared floor at sigma = " +
                             std::to_string(sigma));
  return {sigma, value};
}

// Trapezoid-in-tau memory integral with per-node caches: one column per
// accepted time node. The beta channel works on the coefficients directly;
// the b0 channel caches H a(tau) when separable and the point values of
// u(.,tau) on a fixed composite Gauss grid otherwise, so one outer evaluation
// costs O(n) kernel calls instead of O(n) matrix assemblies.
class MemoryEvaluator {
 public:
  MemoryEvaluator(const ProblemData& pd, int m, const UniformTimeGrid& grid)
      : grid_(grid), m_(m), beta_(pd.memory.beta) {
    mu_ = pd.memory_eigenvalues.head(m);
    beta_live_ = beta_ != 0.0;
    b0_live_ = pd.b0_bound > 0.0;
    separable_ = pd.memory.separable;
    coeff_cols_.resize(m_, grid_.size());
    if (!b0_live_) return;
    if (separable_) {
      g_ = pd.memory.g;
      H_ = assemble_spatial_coupling(pd.memory.h, pd.assembly).topLeftCorner(m, m);
      ha_cols_.resize(m_, grid_.size());
    } else {
      b0_ = pd.memory.general;
      const GaussRule rule = gauss_rule(10);
      const auto& op = pd.assembly;
      const int cells = op.mode == OperatorMode::SpectralSine
                            ? std::max(32, 4 * op.modes())
                            : op.n_elems;
      const double hc = op.domain.length() / cells;
      const int q = cells * static_cast<int>(rule.x.size());
      qx_.resize(q);
      qw_.resize(q);
      mode_vals_.resize(q, m_);
      int idx = 0;
      for (int cell = 0; cell < cells; ++cell) {
        for (std::size_t k = 0; k < rule.x.size(); ++k, ++idx) {
          qx_(idx) = op.domain.a + (cell + rule.x[k]) * hc;
          qw_(idx) = rule.w[k] * hc;
          for (int i = 0; i < m_; ++i) mode_vals_(idx, i) = eval_mode_function(op, i, qx_(idx));
        }
      }
      uq_cols_.resize(q, grid_.size());
    }
  }

  bool active() const { return beta_live_ || b0_live_; }

  void push(const Eigen::VectorXd& a) {
    coeff_cols_.col(count_) = a;
    if (b0_live_) {
      if (separable_)
        ha_cols_.col(count_) = H_ * a;
      else
        uq_cols_.col(count_) = mode_vals_ * a;
    }
    ++count_;
  }

  // sum over pushed columns 0..upto of w_j B(t, tau_j) a(tau_j); w_0 = h/2,
  // interior h, and the last node gets h/2 when it closes the interval
  Eigen::VectorXd integral(double t, int upto, bool closed) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m_);
    if (!active() || (closed && upto == 0)) return out;
    const double h = grid_.h;
    Eigen::VectorXd w = Eigen::VectorXd::Constant(upto + 1, h);
    w(0) = 0.5 * h;
    if (closed) w(upto) = 0.5 * h;
    if (beta_live_)
      out += beta_ * (mu_.array() * (coeff_cols_.leftCols(upto + 1) * w).array()).matrix();
    if (b0_live_) {
      if (separable_) {
        Eigen::VectorXd gw(upto + 1);
        for (int j = 0; j <= upto; ++j) gw(j) = w(j) * g_(t, grid_.t(j));
        out += ha_cols_.leftCols(upto + 1) * gw;
      } else {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(qx_.size());
        for (int j = 0; j <= upto; ++j) {
          const double tau = grid_.t(j);
          for (Eigen::Index q = 0; q < qx_.size(); ++q)
            acc(q) += w(j) * b0_(qx_(q), t, tau) * uq_cols_(q, j);
        }
        out += mode_vals_.transpose() * qw_.cwiseProduct(acc);
      }
    }
    return out;
  }

  // h/2 times the integrand at the outer endpoint tau = t for a trial state a
  Eigen::VectorXd endpoint(double t, const Eigen::VectorXd& a) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m_);
    if (!active()) return out;
    if (beta_live_) out += beta_ * (mu_.array() * a.array()).matrix();
    if (b0_live_) {
      if (separable_) {
        out += g_(t, t) * (H_ * a);
      } else {
        Eigen::VectorXd uq = mode_vals_ * a;
        for (Eigen::Index q = 0; q < qx_.size(); ++q) uq(q) *= qw_(q) * b0_(qx_(q), t, t);
        out += mode_vals_.transpose() * uq;
      }
    }
    return 0.5 * grid_.h * out;
  }

 private:
  UniformTimeGrid grid_;
  int m_;
  double beta_;
  bool beta_live_ = false;
  bool b0_live_ = false;
  bool separable_ = true;
  int count_ = 0;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd coeff_cols_;
  std::function<double(double, double)> g_;
  Eigen::MatrixXd H_;
  Eigen::MatrixXd ha_cols_;
  std::function<double(double, double, double)> b0_;
  Eigen::VectorXd qx_, qw_;
  Eigen::MatrixXd mode_vals_;
  Eigen::MatrixXd uq_cols_;
};

// Per-run workspace: truncated spectra, the source table, the running table of
// right-hand sides F(t_j), power tables feeding the Adams weights, and the
// memory caches.
struct StepContext {
  int m;
  double alpha;
  double inv_gamma;
  Eigen::VectorXd lambda;
  Eigen::VectorXd a0;
  Eigen::MatrixXd fsrc;
  Eigen::MatrixXd F;
  Eigen::VectorXd pa, pa1;
  MemoryEvaluator mem;
  bool startup_ready = false;
  double startup_h = 0.0;
  Eigen::MatrixXd startup_cols;  // coarse-node values inside the startup window
  Eigen::MatrixXd startup_F;     // right-hand sides at the fine startup nodes

  StepContext(const ProblemData& pd, const SolverConfig& cfg)
      : m(cfg.mode_count),
        alpha(pd.orders.alpha),
        inv_gamma(1.0 / gamma_fn(pd.orders.alpha)),
        lambda(pd.assembly.eigenvalues.head(cfg.mode_count)),
        a0(pd.u0.coefficients.head(cfg.mode_count)),
        fsrc(cfg.mode_count, cfg.grid.size()),
        F(Eigen::MatrixXd::Zero(cfg.mode_count, cfg.grid.size())),
        pa(power_table(pd.orders.alpha, cfg.grid.n_steps + 2)),
        pa1(power_table(pd.orders.alpha + 1.0, cfg.grid.n_steps + 2)),
        mem(pd, cfg.mode_count, cfg.grid) {
    for (int n = 0; n <= cfg.grid.n_steps; ++n)
      fsrc.col(n) = pd.source_at(cfg.grid.t(n)).head(m);
    if (!fsrc.allFinite())
      throw solver_failure("source term produced non-finite modal values");
  }
};

inline std::string step_dump(int n, double t, int sweep, double iterate_norm,
                             double update_norm) {
  std::ostringstream os;
  os << " [step " << n << " -> " << n + 1 << ", t = " << t << ", sweep " << sweep
     << ", |a| = " << iterate_norm << ", |delta| = " << update_norm << "]";
  return os.str();
}

// F(tau) inherits the tau^alpha cusp of the solution at t = 0, which caps the
// product-trapezoid rule at O(h^{2 alpha}) near the origin. The startup window
// [0, startup_cells*h] is therefore solved once by the same scheme on a fine
// auxiliary grid: its nodes supply the first coarse columns, and the retained
// fine right-hand sides let every later step integrate the cusp region at fine
// resolution. Outside the window the classic uniform rule is untouched.
constexpr int startup_cells = 4;
constexpr int startup_substeps = 256;

inline SolutionHistory run_impl(const ProblemData& pd, const SolverConfig& cfg,
                                bool refine_startup);

inline void ensure_startup_window(StepContext& ctx, const ProblemData& pd,
                                  const SolverConfig& cfg) {
  if (ctx.startup_ready) return;
  const int cells = std::min(startup_cells, cfg.grid.n_steps);
  const int sub = startup_substeps * cells;
  const SolverConfig fine(UniformTimeGrid(cfg.grid.t(cells), sub), cfg.mode_count,
                          cfg.corrector_iterations, cfg.fixed_point_tol);
  const SolutionHistory hist = run_impl(pd, fine, false);

  ctx.startup_cols.resize(ctx.m, cells);
  for (int k = 1; k <= cells; ++k)
    ctx.startup_cols.col(k - 1) = hist.coefficients.col(startup_substeps * k);

  ctx.startup_F.resize(ctx.m, sub + 1);
  for (int q = 0; q <= sub; ++q)
    ctx.startup_F.col(q) =
        pd.source_at(fine.grid.t(q)).head(ctx.m) + hist.memory.col(q) -
        hist.kirchhoff(q) *
            (ctx.lambda.array() * hist.coefficients.col(q).array()).matrix();
  ctx.startup_h = fine.grid.h;
  ctx.startup_ready = true;
}

// int_0^{K h} (t - tau)^{alpha - 1} F(tau) dtau with F piecewise linear on the
// fine startup ladder; the hat-pair moments of each cell are exact
inline Eigen::VectorXd startup_quadrature(const StepContext& ctx, double t) {
  const double alpha = ctx.alpha;
  const double hf = ctx.startup_h;
  const int nodes = static_cast<int>(ctx.startup_F.cols());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(nodes);
  double d0 = t;
  double p0 = std::pow(d0, alpha);
  double q0 = p0 * d0;
  for (int j = 0; j + 1 < nodes; ++j) {
    const double d1 = t - hf * (j + 1);
    const double p1 = std::pow(d1, alpha);
    const double q1 = p1 * d1;
    const double ia = (p0 - p1) / alpha;
    const double ia1 = (q0 - q1) / (alpha + 1.0);
    w(j) += (ia1 - d1 * ia) / hf;
    w(j + 1) += (d0 * ia - ia1) / hf;
    d0 = d1;
    p0 = p1;
    q0 = q1;
  }
  return ctx.startup_F * w;
}

inline Eigen::VectorXd step_impl(SolutionHistory& hist, int n, const ProblemData& pd,
                                 const SolverConfig& cfg, StepContext& ctx,
                                 bool refine_startup = true) {
  const double h = hist.grid.h;
  const double t_next = hist.grid.t(n + 1);
  const double alpha = ctx.alpha;

  const Eigen::VectorXd mem_hist = ctx.mem.integral(t_next, n, false);
  const Eigen::VectorXd fn = ctx.fsrc.col(n + 1);

  Eigen::VectorXd a;
  if (refine_startup && n < startup_cells) {
    ensure_startup_window(ctx, pd, cfg);
    a = ctx.startup_cols.col(n);
  } else {
    // product-rectangle weights for the predictor, product-trapezoid row for
    // the corrector, both reading the precomputed power tables; cells inside
    // a live startup window are replaced by the fine-rule history integral
    const double ha = std::pow(h, alpha);
    const int k0 = refine_startup ? startup_cells : 0;
    Eigen::VectorXd base = ctx.a0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    Eigen::VectorXd c(n + 2);
    if (k0 == 0) {
      for (int j = 0; j <= n; ++j)
        b(j) = ha / alpha * (ctx.pa(n + 1 - j) - ctx.pa(n - j));
      c = corrector_row(alpha, h, n + 1, ctx.pa1);
    } else {
      ensure_startup_window(ctx, pd, cfg);
      base += ctx.inv_gamma * startup_quadrature(ctx, t_next);
      c.setZero();
      for (int j = k0; j <= n; ++j) {
        const int i0 = n + 1 - j, i1 = n - j;
        const double dpa = (ctx.pa(i0) - ctx.pa(i1)) / alpha;
        const double dpa1 = (ctx.pa1(i0) - ctx.pa1(i1)) / (alpha + 1.0);
        b(j) = ha * dpa;
        c(j) += ha * (dpa1 - i1 * dpa);
        c(j + 1) += ha * (i0 * dpa - dpa1);
      }
    }

    const Eigen::VectorXd r =
        base + ctx.inv_gamma * (ctx.F.leftCols(n + 1) * c.head(n + 1));
    const double w = ctx.inv_gamma * c(n + 1);

    a = base + ctx.inv_gamma * (ctx.F.leftCols(n + 1) * b);
    if (!a.allFinite())
      throw solver_failure("predictor produced non-finite coefficients" +
                           step_dump(n, t_next, -1, a.norm(), 0.0));

    double prev_norm = a.norm();
    int doublings = 0;
    for (int sweep = 0; sweep < cfg.corrector_iterations; ++sweep) {
      const double M = kirchhoff_at(pd, ctx.lambda, a).second;
      const Eigen::VectorXd rhs_free =
          r + w * (fn + mem_hist + ctx.mem.endpoint(t_next, a));
      const Eigen::VectorXd next =
          (rhs_free.array() / (1.0 + w * M * ctx.lambda.array())).matrix();
      if (!next.allFinite())
        throw solver_failure("corrector produced non-finite coefficients" +
                             step_dump(n, t_next, sweep, prev_norm, 0.0));
      const double delta = (next - a).lpNorm<Eigen::Infinity>();
      const double norm = next.norm();
      if (prev_norm > 0.0 && norm > 2.0 * prev_norm) {
        if (++doublings >= 2)
          throw solver_failure("corrector iteration diverged" +
                               step_dump(n, t_next, sweep, norm, delta));
      } else {
        doublings = 0;
      }
      a = next;
      prev_norm = norm;
      if (delta <= cfg.fixed_point_tol * (1.0 + norm)) break;
    }
  }

  const auto [sigma, M] = kirchhoff_at(pd, ctx.lambda, a);
  hist.coefficients.col(n + 1) = a;
  hist.x0_norm_sq(n + 1) = sigma;
  hist.kirchhoff(n + 1) = M;
  hist.memory.col(n + 1) = mem_hist + ctx.mem.endpoint(t_next, a);
  ctx.mem.push(a);
  ctx.F.col(n + 1) =
      fn + hist.memory.col(n + 1) - M * (ctx.lambda.array() * a.array()).matrix();
  return a;
}

inline SolutionHistory run_impl(const ProblemData& pd, const SolverConfig& cfg,
                                bool refine_startup) {
  SolutionHistory hist(cfg.grid, cfg.mode_count);
  StepContext ctx(pd, cfg);

  hist.coefficients.col(0) = ctx.a0;
  const auto [sigma0, m0val] = kirchhoff_at(pd, ctx.lambda, ctx.a0);
  hist.x0_norm_sq(0) = sigma0;
  hist.kirchhoff(0) = m0val;
  ctx.mem.push(ctx.a0);
  ctx.F.col(0) =
      ctx.fsrc.col(0) - m0val * (ctx.lambda.array() * ctx.a0.array()).matrix();

  for (int n = 0; n < cfg.grid.n_steps; ++n)
    step_impl(hist, n, pd, cfg, ctx, refine_startup);
  return hist;
}

inline void check_config(const ProblemData& pd, const SolverConfig& cfg) {
  if (cfg.mode_count > pd.assembly.modes())
    throw contract_violation("solver: mode_count exceeds the assembled basis");
  if (cfg.grid.T != pd.T)
    throw contract_violation("solver: grid horizon differs from the problem horizon");
}

}  // namespace detail

// F(t_n) evaluated from recorded history, memory integral by full trapezoid
// over [0, t_n]
inline Eigen::VectorXd solver_rhs(int n, const SolutionHistory& hist,
                                  const ProblemData& pd) {
  if (n < 0 || n >= hist.grid.size())
    throw contract_violation("solver_rhs: node index out of range");
  if (hist.modes() > pd.assembly.modes())
    throw contract_violation("solver_rhs: history does not conform to the problem");
  if (!hist.coefficients.leftCols(n + 1).allFinite())
    throw contract_violation("solver_rhs: history carries non-finite coefficients");

  const int m = hist.modes();
  const Eigen::VectorXd lambda = pd.assembly.eigenvalues.head(m);
  const double t = hist.grid.t(n);
  const Eigen::VectorXd a = hist.coefficients.col(n);
  const double M = detail::kirchhoff_at(pd, lambda, a).second;

  detail::MemoryEvaluator mem(pd, m, hist.grid);
  for (int j = 0; j <= n; ++j) mem.push(hist.coefficients.col(j));
  return pd.source_at(t).head(m) + mem.integral(t, n, true) -
         M * (lambda.array() * a.array()).matrix();
}

// One predictor-corrector step from node n; fills column n+1 of the history
inline Eigen::VectorXd step(SolutionHistory& hist, int n, const ProblemData& pd,
                            const SolverConfig& cfg) {
  detail::check_config(pd, cfg);
  if (n < 0 || n >= hist.grid.n_steps)
    throw contract_violation("step: node index out of range");
  if (hist.modes() != cfg.mode_count)
    throw contract_violation("step: history does not conform to the configuration");
  if (!hist.coefficients.leftCols(n + 1).allFinite() ||
      !hist.memory.leftCols(n + 1).allFinite())
    throw contract_violation("step: history carries non-finite state");

  detail::StepContext ctx(pd, cfg);
  for (int j = 0; j <= n; ++j) {
    const Eigen::VectorXd a = hist.coefficients.col(j);
    ctx.mem.push(a);
    ctx.F.col(j) = ctx.fsrc.col(j) + hist.memory.col(j) -
                   hist.kirchhoff(j) * (ctx.lambda.array() * a.array()).matrix();
  }
  return detail::step_impl(hist, n, pd, cfg, ctx);
}

inline SolutionHistory run(const ProblemData& pd, const SolverConfig& cfg) {
  detail::check_config(pd, cfg);
  return detail::run_impl(pd, cfg, true);
}

// time column followed by one column per mode, full double precision
inline void write_modes_table(const SolutionHistory& hist, std::ostream& os) {
  os.precision(17);
  os << "t";
  for (int i = 0; i < hist.modes(); ++i) os << "\ta" << i + 1;
  os << "\n";
  for (int n = 0; n < hist.grid.size(); ++n) {
    os << hist.grid.t(n);
    for (int i = 0; i < hist.modes(); ++i) os << "\t" << hist.coefficients(i, n);
    os << "\n";
  }
}

// companion norm table: L2 and X0 norms plus the recorded Kirchhoff values
inline void write_norms_table(const SolutionHistory& hist, std::ostream& os) {
  os.precision(17);
  os << "t\tl2\tx0\tkirchhoff\n";
  for (int n = 0; n < hist.grid.size(); ++n) {
    os << hist.grid.t(n) << "\t" << hist.coefficients.col(n).norm() << "\t"
       << std::sqrt(hist.x0_norm_sq(n)) << "\t" << hist.kirchhoff(n) << "\n";
  }
}

}  // namespace kfrac
