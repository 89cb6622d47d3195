#pragma once

// Problem data for the Kirchhoff-type fractional evolution: the diffusion
// law M, the memory channel (beta, b0), the source, the initial datum, and
// the feasibility checks on them.

#include <kfrac/errors.hpp>
#include <kfrac/fractional_calculus.hpp>
#include <kfrac/kernels.hpp>
#include <kfrac/spatial_operator.hpp>
#include <kfrac/time_grid.hpp>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <functional>
#include <random>
#include <utility>

namespace kfrac {

enum class KirchhoffKind { Constant, Affine, Saturating, Custom };

// M maps the squared X0 norm to a diffusion coefficient; m0 is the declared
// uniform lower bound, lipschitz the declared Lipschitz constant. Built-in
// laws have exact constants; custom declarations are spot-checked only.
struct KirchhoffLaw {
  KirchhoffKind kind;
  std::function<double(double)> evaluator;
  double m0;
  double lipschitz;

  static KirchhoffLaw constant(double m0) {
    require(m0);
    return {KirchhoffKind::Constant, [m0](double) { return m0; }, m0, 0.0};
  }
  static KirchhoffLaw affine(double m0, double c) {
    require(m0, c);
    return {KirchhoffKind::Affine, [m0, c](double sig) { return m0 + c * sig; }, m0, c};
  }
  static KirchhoffLaw saturating(double m0, double c) {
    require(m0, c);
    return {KirchhoffKind::Saturating,
            [m0, c](double sig) { return m0 + c * sig / (1.0 + sig); }, m0, c};
  }
  static KirchhoffLaw custom(std::function<double(double)> fn, double m0, double L) {
    require(m0, L);
    return {KirchhoffKind::Custom, std::move(fn), m0, L};
  }

 private:
  static void require(double m0, double c = 0.0) {
    if (!(m0 > 0.0)) throw std::domain_error("KirchhoffLaw: m0 must be positive");
    if (!(c >= 0.0)) throw std::domain_error("KirchhoffLaw: constant must be nonnegative");
  }
};

// Samples the declared bounds: evaluator >= m0 on a log grid and the Lipschitz
// bound on neighboring and random pairs. A check, not a proof.
inline bool kirchhoff_spot_check(const KirchhoffLaw& law, double sigma_max = 100.0,
                                 int n_samples = 64) {
  std::vector<double> sigma{0.0};
  for (int k = 0; k < n_samples; ++k)
    sigma.push_back(1e-6 * std::pow(sigma_max / 1e-6, k / (n_samples - 1.0)));
  for (double s : sigma) {
    if (!(law.evaluator(s) >= law.m0 * (1.0 - 1e-12))) return false;
  }
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> pick(0.0, sigma_max);
  const auto lip_ok = [&](double s1, double s2) {
    return std::fabs(law.evaluator(s1) - law.evaluator(s2)) <=
           law.lipschitz * std::fabs(s1 - s2) * (1.0 + 1e-9) + 1e-12;
  };
  for (std::size_t k = 0; k + 1 < sigma.size(); ++k) {
    if (!lip_ok(sigma[k], sigma[k + 1])) return false;
  }
  for (int k = 0; k < n_samples; ++k) {
    if (!lip_ok(pick(rng), pick(rng))) return false;
  }
  return true;
}

// Memory kernel b0(x,t,tau), either separable g(t,tau) h(x) or a general
// continuous evaluator; beta scales the fractional-Laplacian memory channel.
// s_memory is the memory diffusion order (NaN = same as the main operator).
struct MemorySpec {
  double beta = 0.0;
  bool separable = true;
  std::function<double(double, double)> g;       // (t, tau)
  std::function<double(double)> h;               // (x)
  std::function<double(double, double, double)> general;  // (x, t, tau)
  double s_memory = std::numeric_limits<double>::quiet_NaN();

  static MemorySpec none() {
    MemorySpec m;
    m.g = [](double, double) { return 0.0; };
    m.h = [](double) { return 0.0; };
    return m;
  }
  static MemorySpec make_separable(double beta, std::function<double(double, double)> g,
                                   std::function<double(double)> h) {
    MemorySpec m;
    m.beta = beta;
    m.g = std::move(g);
    m.h = std::move(h);
    return m;
  }
  static MemorySpec make_general(double beta,
                                 std::function<double(double, double, double)> b0) {
    MemorySpec m;
    m.beta = beta;
    m.separable = false;
    m.general = std::move(b0);
    return m;
  }

  double b0(double x, double t, double tau) const {
    return separable ? g(t, tau) * h(x) : general(x, t, tau);
  }
};

// sup |b0| over a sample lattice of Omega x [0,T]^2; also the finiteness check
inline double sample_b0_bound(const MemorySpec& memory, const Domain1D& domain,
                              double T, int n = 9) {
  double worst = 0.0;
  for (int ix = 1; ix < n; ++ix) {
    const double x = domain.a + domain.length() * ix / n;
    for (int it = 0; it <= n; ++it) {
      for (int itau = 0; itau <= n; ++itau) {
        const double v = memory.b0(x, T * it / n, T * itau / n);
        if (!std::isfinite(v))
          throw contract_violation("MemorySpec: b0 is not finite on the sample lattice");
        worst = std::max(worst, std::fabs(v));
      }
    }
  }
  return worst;
}

struct H2Report {
  double K;
  double margin;
  bool pass;
};

// (H2) feasibility: K = |u0|_X0 + |f|_{L2_alpha}, margin = m0 - 4 L_M K^2
inline H2Report check_h2(const KirchhoffLaw& law, double u0_x0_norm,
                         double f_l2alpha_norm) {
  if (!(u0_x0_norm >= 0.0) || !(f_l2alpha_norm >= 0.0))
    throw std::domain_error("check_h2: norms must be nonnegative");
  const double K = u0_x0_norm + f_l2alpha_norm;
  const double margin = law.m0 - 4.0 * law.lipschitz * K * K;
  return {K, margin, margin > 0.0};
}

// sup_t ( int_0^t (t-tau)^{alpha-1} |f(tau)|^2 dtau )^{1/2} on the grid; the
// kernel carries no 1/Gamma(alpha), so scale the discrete fractional integral
// back up by Gamma(alpha).
inline double l2alpha_norm(const SampledPath& path, double alpha) {
  if (path.modes() != 1)
    throw contract_violation("l2alpha_norm: expected a single row of |f(t)| samples");
  if ((path.values.array() < 0.0).any())
    throw std::domain_error("l2alpha_norm: samples must be nonnegative");
  SampledPath sq(path.grid, path.values.array().square().matrix());
  const SampledPath integ = rl_integral(sq, alpha);
  return std::sqrt(gamma_fn(alpha) * integ.values.maxCoeff());
}

// H_ij = (h phi_j, phi_i) for a pure spatial multiplier h
inline Eigen::MatrixXd assemble_spatial_coupling(const std::function<double(double)>& h,
                                                 const OperatorAssembly& op) {
  const int m = op.modes();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
  const detail::GaussRule rule = detail::gauss_rule(10);
  const int cells = op.mode == OperatorMode::SpectralSine
                        ? std::max(32, 4 * m)
                        : op.n_elems;
  const double hc = op.domain.length() / cells;
  Eigen::VectorXd phi(m);
  for (int cell = 0; cell < cells; ++cell) {
    for (std::size_t k = 0; k < rule.x.size(); ++k) {
      const double x = op.domain.a + (cell + rule.x[k]) * hc;
      for (int i = 0; i < m; ++i) phi(i) = eval_mode_function(op, i, x);
      H.selfadjointView<Eigen::Upper>().rankUpdate(phi, rule.w[k] * hc * h(x));
    }
  }
  Eigen::MatrixXd full = H.selfadjointView<Eigen::Upper>();
  if (!full.allFinite())
    throw solver_failure("assemble_spatial_coupling: quadrature produced non-finite entries");
  return full;
}

// G_ij(t,tau) = (b0(.,t,tau) phi_j, phi_i); for separable kernels this is
// g(t,tau) H with H assembled once per call site
inline Eigen::MatrixXd memory_coupling_matrix(const MemorySpec& memory,
                                              const OperatorAssembly& op, double t,
                                              double tau) {
  if (memory.separable)
    return memory.g(t, tau) * assemble_spatial_coupling(memory.h, op);
  return assemble_spatial_coupling(
      [&](double x) { return memory.general(x, t, tau); }, op);
}

// B0 estimate: |beta| + sup over a (t,tau) lattice of |G(t,tau)|_2 / lambda_1.
// The division transports the L2 operator norm into the X0 pairing.
inline double estimate_b0_constant(const MemorySpec& memory, const OperatorAssembly& op,
                                   double T, int n_grid = 4) {
  const double lam1 = op.eigenvalues(0);
  double sup = 0.0;
  if (memory.separable) {
    const double hnorm =
        assemble_spatial_coupling(memory.h, op).jacobiSvd().singularValues()(0);
    for (int it = 0; it <= n_grid; ++it)
      for (int itau = 0; itau <= n_grid; ++itau)
        sup = std::max(sup,
                       std::fabs(memory.g(T * it / n_grid, T * itau / n_grid)) * hnorm);
  } else {
    for (int it = 0; it <= n_grid; ++it) {
      for (int itau = 0; itau <= n_grid; ++itau) {
        const Eigen::MatrixXd G =
            memory_coupling_matrix(memory, op, T * it / n_grid, T * itau / n_grid);
        sup = std::max(sup, G.jacobiSvd().singularValues()(0));
      }
    }
  }
  return std::fabs(memory.beta) + sup / lam1;
}

// Source term: zero, separable g(t) h(x), pre-projected modal samples, or a
// pointwise f(x,t) projected at each call.
struct SourceTerm {
  enum class Kind { Zero, Separable, Modal, Pointwise } kind = Kind::Zero;
  std::function<double(double)> g;                      // (t)
  std::function<double(double)> h;                      // (x)
  std::function<Eigen::VectorXd(double)> modal;         // (t) -> coefficients
  std::function<double(double, double)> pointwise;      // (x, t)

  static SourceTerm zero() { return {}; }
  static SourceTerm separable(std::function<double(double)> g,
                              std::function<double(double)> h) {
    SourceTerm s;
    s.kind = Kind::Separable;
    s.g = std::move(g);
    s.h = std::move(h);
    return s;
  }
  static SourceTerm modal_fn(std::function<Eigen::VectorXd(double)> fn) {
    SourceTerm s;
    s.kind = Kind::Modal;
    s.modal = std::move(fn);
    return s;
  }
  static SourceTerm pointwise_fn(std::function<double(double, double)> fn) {
    SourceTerm s;
    s.kind = Kind::Pointwise;
    s.pointwise = std::move(fn);
    return s;
  }
};

struct ProblemData {
  FractionalOrders orders;
  OperatorAssembly assembly;
  KirchhoffLaw law;
  MemorySpec memory;
  SourceTerm source;
  ModalVector u0;
  double T;
  double b0_bound;                 // sampled sup |b0|
  Eigen::VectorXd h_projected;     // separable source: (h, phi_i), cached
  Eigen::VectorXd memory_eigenvalues;  // mu_i for the beta channel

  ProblemData(FractionalOrders orders_, OperatorAssembly assembly_, KirchhoffLaw law_,
              MemorySpec memory_, SourceTerm source_, ModalVector u0_, double T_)
      : orders(orders_),
        assembly(std::move(assembly_)),
        law(std::move(law_)),
        memory(std::move(memory_)),
        source(std::move(source_)),
        u0(std::move(u0_)),
        T(T_) {
    if (!(T > 0.0)) throw std::domain_error("ProblemData: T must be positive");
    if (u0.size() != assembly.modes())
      throw contract_violation("ProblemData: u0 does not conform to the assembly");
    if (assembly.s != orders.s)
      throw contract_violation("ProblemData: assembly order differs from orders.s");
    if (!kirchhoff_spot_check(law))
      throw contract_violation("ProblemData: Kirchhoff law violates its declared bounds");
    b0_bound = sample_b0_bound(memory, assembly.domain, T);

    const double s_mem = std::isnan(memory.s_memory) ? orders.s : memory.s_memory;
    if (s_mem > orders.s)
      throw std::domain_error("ProblemData: memory order must not exceed the diffusion order");
    if (s_mem != orders.s && assembly.mode != OperatorMode::SpectralSine)
      throw unsupported_mode(
          "ProblemData: mixed memory order is available in spectral mode only");
    // mu_i = lambda_i^{s_mem/s}: exact spectral identity; trivial when equal
    memory_eigenvalues = assembly.eigenvalues.array().pow(s_mem / orders.s);

    if (source.kind == SourceTerm::Kind::Separable)
      h_projected = project(source.h, assembly).coefficients;
  }

  // modal coefficients of f(t)
  Eigen::VectorXd source_at(double t) const {
    switch (source.kind) {
      case SourceTerm::Kind::Zero:
        return Eigen::VectorXd::Zero(assembly.modes());
      case SourceTerm::Kind::Separable:
        return source.g(t) * h_projected;
      case SourceTerm::Kind::Modal:
        return source.modal(t);
      case SourceTerm::Kind::Pointwise:
      default:
        return project([&](double x) { return source.pointwise(x, t); }, assembly)
            .coefficients;
    }
  }
};

}  // namespace kfrac
