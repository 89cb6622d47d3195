#pragma once

// Two discretizations of the fractional Laplacian (-Δ)^s on an interval with
// zero exterior condition: an explicit sine spectral basis (exact eigenpairs,
// used where oracles need closed forms) and a faithful P1 finite-element
// assembly of the singular integral form. Both expose L2-orthonormal modes.

#include <kfrac/errors.hpp>
#include <kfrac/gamma.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace kfrac {

struct Domain1D {
  double a;
  double b;

  Domain1D(double left, double right) : a(left), b(right) {
    if (!(std::isfinite(left) && std::isfinite(right) && right > left))
      throw std::domain_error("Domain1D: need finite endpoints with b > a");
  }
  double length() const { return b - a; }
};

enum class OperatorMode { SpectralSine, FemP1Integral };

// C_{1,s} = 2^{2s} s Gamma(s + 1/2) / (sqrt(pi) Gamma(1 - s))
inline double normalizing_constant(double s, int d = 1) {
  if (d != 1) throw std::domain_error("normalizing_constant: only d = 1 is built");
  if (!(s > 0.0 && s < 1.0))
    throw std::domain_error("normalizing_constant: s must lie in (0,1)");
  return std::pow(2.0, 2.0 * s) * s * gamma_fn(s + 0.5) /
         (std::sqrt(M_PI) * gamma_fn(1.0 - s));
}

struct OperatorAssembly {
  OperatorMode mode;
  Domain1D domain;
  double s;
  int n_elems;                 // FEM mesh size; 0 in spectral mode
  Eigen::VectorXd eigenvalues; // ascending
  Eigen::MatrixXd eigenvectors;// columns, L2(=Mm)-orthonormal nodal coords
  Eigen::MatrixXd A;           // X0 inner products of the working basis
  Eigen::MatrixXd Mm;          // L2 mass matrix of the working basis
  double c1s;

  int modes() const { return static_cast<int>(eigenvalues.size()); }
};

struct ModalVector {
  Eigen::VectorXd coefficients;
  int size() const { return static_cast<int>(coefficients.size()); }
};

// phi_i evaluated at a point (i is 0-based; spectral k = i+1)
inline double eval_mode_function(const OperatorAssembly& op, int i, double x) {
  const double L = op.domain.length();
  if (x <= op.domain.a || x >= op.domain.b) return 0.0;
  if (op.mode == OperatorMode::SpectralSine) {
    return std::sqrt(2.0 / L) * std::sin((i + 1) * M_PI * (x - op.domain.a) / L);
  }
  // piecewise-linear interpolation of the nodal eigenvector (interior nodes)
  const double h = L / op.n_elems;
  const double xi = (x - op.domain.a) / h;
  const int cell = std::min(static_cast<int>(xi), op.n_elems - 1);
  const double frac = xi - cell;
  const auto nodal = [&](int node) -> double {
    return (node >= 1 && node <= op.n_elems - 1) ? op.eigenvectors(node - 1, i) : 0.0;
  };
  return (1.0 - frac) * nodal(cell) + frac * nodal(cell + 1);
}

inline OperatorAssembly build_spectral(const Domain1D& domain, double s, int m) {
  if (m < 1) throw std::domain_error("build_spectral: need at least one mode");
  if (!(s > 0.0 && s < 1.0))
    throw std::domain_error("build_spectral: s must lie in (0,1)");

  OperatorAssembly op{OperatorMode::SpectralSine, domain, s, 0,
                      Eigen::VectorXd(m),
                      Eigen::MatrixXd::Identity(m, m),
                      Eigen::MatrixXd::Zero(m, m),
                      Eigen::MatrixXd::Identity(m, m),
                      normalizing_constant(s)};
  const double L = domain.length();
  for (int k = 1; k <= m; ++k)
    op.eigenvalues(k - 1) = std::pow(k * M_PI / L, 2.0 * s);
  op.A = op.eigenvalues.asDiagonal();
  return op;
}

namespace detail {

// int_{vl}^{vr} v^e dv, stable when e is at or near -1 (s near 1/2)
inline double power_moment(double vl, double vr, double e) {
  const double p = e + 1.0;
  if (vl == 0.0) return std::pow(vr, p) / p;  // callers guarantee p > 0 here
  if (p == 0.0) return std::log(vr / vl);
  if (std::fabs(p) < 1e-8) {
    return (std::expm1(p * std::log(vr)) - std::expm1(p * std::log(vl))) / p;
  }
  return (std::pow(vr, p) - std::pow(vl, p)) / p;
}

struct GaussRule {
  std::vector<double> x;  // nodes on (0,1)
  std::vector<double> w;
};

// Gauss-Legendre mapped to (0,1)
inline GaussRule gauss_rule(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double off = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule r;
  for (int k = 0; k < n; ++k) {
    r.x.push_back(0.5 * (es.eigenvalues()(k) + 1.0));
    r.w.push_back(es.eigenvectors()(0, k) * es.eigenvectors()(0, k));
  }
  return r;
}

}  // namespace detail

// Assembles A_ij = C/2 \iint_Q (phi_i(x)-phi_i(y))(phi_j(x)-phi_j(y)) |x-y|^{-1-2s}
// over Q = R^2 minus the exterior square, for interior hat functions. The
// domain splits into element-pair integrals over Omega x Omega plus the
// exterior tail 2 int phi_i phi_j rho with rho(x) = ((b-x)^{-2s}+(x-a)^{-2s})/(2s);
// identical pairs have a closed form, vertex-touching pairs reduce by scaling
// to a smooth 1-D integral, the tail reduces to power moments.
inline OperatorAssembly assemble_fem_integral(const Domain1D& domain, double s,
                                              int n_elems) {
  if (n_elems < 2) throw std::domain_error("assemble_fem_integral: need n_elems >= 2");
  if (!(s > 0.0 && s < 1.0))
    throw std::domain_error("assemble_fem_integral: s must lie in (0,1)");

  const int n = n_elems;
  const int dim = n - 1;
  const double L = domain.length();
  const double h = L / n;
  const double c = normalizing_constant(s);
  const double p13 = 3.0 - 2.0 * s;

  // slope of hat_i (1-based node) on element e = (x_e, x_{e+1}), e = 0..n-1
  const auto slope = [&](int i, int e) -> double {
    if (e == i - 1) return 1.0 / h;
    if (e == i) return -1.0 / h;
    return 0.0;
  };
  const auto hat = [&](int i, double x) -> double {
    const double v = 1.0 - std::fabs(x - (domain.a + i * h)) / h;
    return v > 0.0 ? v : 0.0;
  };
  const auto interior_nodes = [&](int e, int f, int (&out)[4]) -> int {
    int cnt = 0;
    for (int cand : {e, e + 1, f, f + 1}) {
      if (cand < 1 || cand > dim) continue;
      bool dup = false;
      for (int k = 0; k < cnt; ++k) dup = dup || out[k] == cand;
      if (!dup) out[cnt++] = cand;
    }
    return cnt;
  };

  const detail::GaussRule g24 = detail::gauss_rule(24);
  const detail::GaussRule g16 = detail::gauss_rule(16);
  const detail::GaussRule g10 = detail::gauss_rule(10);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
  const auto gather = [&](int i, int j, double v) {
    A(std::min(i, j) - 1, std::max(i, j) - 1) += v;
  };

  // Omega x Omega over all element pairs e <= f; every pair touching the
  // support of either hat contributes because the integrand is a difference
  // product. Mirrored pairs (f, e) double the off-diagonal ones.
  for (int e = 0; e < n; ++e) {
    // e == f: differences are slope*(x-y), closed form of |x-y|^{1-2s}
    const double ident = 2.0 * std::pow(h, p13) / ((2.0 - 2.0 * s) * p13);
    int nodes[4];
    int cnt = interior_nodes(e, e, nodes);
    for (int ii = 0; ii < cnt; ++ii)
      for (int jj = ii; jj < cnt; ++jj)
        gather(nodes[ii], nodes[jj],
               slope(nodes[ii], e) * slope(nodes[jj], e) * ident);

    if (e + 1 < n) {
      // vertex-touching pair (e, e+1): with x = x_v - h u, y = x_v + h w the
      // difference product is (s_e u + s_f w)-bilinear and the kernel depends
      // on u + w only; the integrand is homogeneous of degree 1-2s, so scaling
      // out the radius leaves smooth edge integrals over the unit square
      const int f = e + 1;
      cnt = interior_nodes(e, f, nodes);
      // slopes were folded into the dimensionless sigma/tau, leaving h^{1-2s}
      const double scale = 2.0 * std::pow(h, 1.0 - 2.0 * s) / p13;  // x2: mirror
      for (int ii = 0; ii < cnt; ++ii) {
        for (int jj = ii; jj < cnt; ++jj) {
          const double si = h * slope(nodes[ii], e), ti = h * slope(nodes[ii], f);
          const double sj = h * slope(nodes[jj], e), tj = h * slope(nodes[jj], f);
          double q = 0.0;
          for (std::size_t k = 0; k < g24.x.size(); ++k) {
            const double r = g24.x[k];
            const double kern = std::pow(1.0 + r, -1.0 - 2.0 * s);
            q += g24.w[k] * kern *
                 ((si * r + ti) * (sj * r + tj) + (si + ti * r) * (sj + tj * r));
          }
          gather(nodes[ii], nodes[jj], scale * q);
        }
      }
    }

    for (int f = e + 2; f < n; ++f) {
      // separated pair: smooth kernel, shared tensor Gauss evaluation
      const auto& rule = f - e < 5 ? g16 : g10;
      const int npts = static_cast<int>(rule.x.size());
      cnt = interior_nodes(e, f, nodes);
      double hx[4][16], hy[4][16];
      for (int a_ = 0; a_ < cnt; ++a_) {
        for (int k = 0; k < npts; ++k) {
          hx[a_][k] = hat(nodes[a_], domain.a + (e + rule.x[k]) * h);
          hy[a_][k] = hat(nodes[a_], domain.a + (f + rule.x[k]) * h);
        }
      }
      double kern[16][16];
      for (int kx = 0; kx < npts; ++kx)
        for (int ky = 0; ky < npts; ++ky)
          kern[kx][ky] = std::pow((f - e) * h + h * (rule.x[ky] - rule.x[kx]),
                                  -1.0 - 2.0 * s);
      for (int ii = 0; ii < cnt; ++ii) {
        for (int jj = ii; jj < cnt; ++jj) {
          double q = 0.0;
          for (int kx = 0; kx < npts; ++kx) {
            double row = 0.0;
            for (int ky = 0; ky < npts; ++ky)
              row += rule.w[ky] * (hx[ii][kx] - hy[ii][ky]) *
                     (hx[jj][kx] - hy[jj][ky]) * kern[kx][ky];
            q += rule.w[kx] * row;
          }
          gather(nodes[ii], nodes[jj], 2.0 * h * h * q);  // x2: mirrored pair
        }
      }
    }
  }

  // exterior tail: 2 int_Omega phi_i phi_j rho(x) dx, with phi_i phi_j a
  // quadratic on each shared element; expressed in v = x-a (resp. b-x) both
  // rho parts reduce to exact power moments
  for (int i = 1; i <= dim; ++i) {
    for (int j = i; j <= std::min(i + 1, dim); ++j) {
      double acc = 0.0;
      for (int e = j - 1; e <= std::min(i, n - 1); ++e) {
        // phi_i on element e as a + b*u, u = local coordinate in (0,h)
        const auto local = [&](int idx) -> std::pair<double, double> {
          if (e == idx - 1) return {0.0, 1.0 / h};
          if (e == idx) return {1.0, -1.0 / h};
          return {0.0, 0.0};
        };
        const auto [ai, bi] = local(i);
        const auto [aj, bj] = local(j);
        if (ai == 0.0 && bi == 0.0) continue;
        if (aj == 0.0 && bj == 0.0) continue;
        // quadratic in u: q0 + q1 u + q2 u^2
        const double q0 = ai * aj, q1 = ai * bj + aj * bi, q2 = bi * bj;
        for (int side = 0; side < 2; ++side) {
          // v = x - a on the left weight, v = b - x on the right weight; the
          // element maps to (vl, vr) and u = v - vl (left) or u = vr - v (right)
          const double vl = side == 0 ? e * h : (n - 1 - e) * h;
          const double vr = vl + h;
          double r0, r1, r2;  // quadratic rewritten in v
          if (side == 0) {
            r0 = q0 - q1 * vl + q2 * vl * vl;
            r1 = q1 - 2.0 * q2 * vl;
            r2 = q2;
          } else {
            r0 = q0 + q1 * vr + q2 * vr * vr;
            r1 = -q1 - 2.0 * q2 * vr;
            r2 = q2;
          }
          double m0 = 0.0;
          if (r0 != 0.0) m0 = detail::power_moment(vl, vr, -2.0 * s);
          acc += (r0 * m0 + r1 * detail::power_moment(vl, vr, 1.0 - 2.0 * s) +
                  r2 * detail::power_moment(vl, vr, 2.0 - 2.0 * s)) /
                 (2.0 * s);
        }
      }
      A(i - 1, j - 1) += 2.0 * acc;
    }
  }

  A *= c / 2.0;
  A = Eigen::MatrixXd(A.selfadjointView<Eigen::Upper>());  // mirror once

  if (!A.allFinite())
    throw solver_failure("assemble_fem_integral: non-finite entry from singular quadrature");

  Eigen::MatrixXd Mm = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    Mm(i, i) = 2.0 * h / 3.0;
    if (i + 1 < dim) Mm(i, i + 1) = Mm(i + 1, i) = h / 6.0;
  }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Mm);
  if (es.info() != Eigen::Success)
    throw solver_failure("assemble_fem_integral: generalized eigensolve failed");
  if (!(es.eigenvalues()(0) > 0.0))
    throw solver_failure("assemble_fem_integral: operator lost positive definiteness");

  OperatorAssembly op{OperatorMode::FemP1Integral, domain, s, n,
                      es.eigenvalues(), es.eigenvectors(), A, Mm, c};
  return op;
}

// modal coefficients (u0, phi_i)
inline ModalVector project(const std::function<double(double)>& u0,
                           const OperatorAssembly& op) {
  const double L = op.domain.length();
  ModalVector out;
  out.coefficients.setZero(op.modes());

  if (op.mode == OperatorMode::SpectralSine) {
    const int cells = std::max(32, 4 * op.modes());
    const detail::GaussRule rule = detail::gauss_rule(10);
    const double hc = L / cells;
    for (int cell = 0; cell < cells; ++cell) {
      const double x0 = op.domain.a + cell * hc;
      for (std::size_t k = 0; k < rule.x.size(); ++k) {
        const double x = x0 + hc * rule.x[k];
        const double uw = u0(x) * rule.w[k] * hc;
        for (int i = 0; i < op.modes(); ++i)
          out.coefficients(i) += uw * eval_mode_function(op, i, x);
      }
    }
    return out;
  }

  // FEM: load vector against hats, then modal coefficients through the
  // L2-orthonormal eigenvectors: (u0, psi_i) = psi_i . load
  const int dim = op.n_elems - 1;
  const double h = L / op.n_elems;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(dim);
  const detail::GaussRule rule = detail::gauss_rule(10);
  for (int e = 0; e < op.n_elems; ++e) {
    const double x0 = op.domain.a + e * h;
    for (std::size_t k = 0; k < rule.x.size(); ++k) {
      const double frac = rule.x[k];
      const double uw = u0(x0 + h * frac) * rule.w[k] * h;
      if (e >= 1) load(e - 1) += uw * (1.0 - frac);       // hat_e falling part
      if (e + 1 <= dim) load(e) += uw * frac;             // hat_{e+1} rising part
    }
  }
  out.coefficients = op.eigenvectors.transpose() * load;
  return out;
}

struct NormTriple {
  double l2;
  double x0;
  double laplacian_s;
};

inline NormTriple norms(const ModalVector& v, const OperatorAssembly& op) {
  if (v.size() != op.modes())
    throw contract_violation("norms: modal vector does not conform to assembly");
  const auto& a = v.coefficients;
  const auto& lam = op.eigenvalues;
  return {std::sqrt(a.squaredNorm()),
          std::sqrt((lam.array() * a.array().square()).sum()),
          std::sqrt((lam.array().square() * a.array().square()).sum())};
}

// (sum_i lambda_i^{(s+nu)/s} a_i^2)^{1/2}; exact only against the spectral
// eigenbasis, so the FEM mode refuses rather than approximates
inline double spectral_regularity_norm(const ModalVector& v,
                                       const OperatorAssembly& op, double nu) {
  if (op.mode != OperatorMode::SpectralSine)
    throw unsupported_mode("spectral_regularity_norm: defined for the spectral mode only");
  if (v.size() != op.modes())
    throw contract_violation("spectral_regularity_norm: modal vector does not conform");
  if (!(nu >= 0.0))
    throw std::domain_error("spectral_regularity_norm: nu must be nonnegative");
  const double expo = (op.s + nu) / op.s;
  return std::sqrt(
      (op.eigenvalues.array().pow(expo) * v.coefficients.array().square()).sum());
}

// plain-text snapshot, row-major numbers at full double precision
inline void write_snapshot(const OperatorAssembly& op, std::ostream& os) {
  os.precision(17);
  os << "kfrac-assembly 1\n";
  os << "mode " << (op.mode == OperatorMode::SpectralSine ? "spectral" : "fem") << "\n";
  os << "domain " << op.domain.a << " " << op.domain.b << "\n";
  os << "s " << op.s << "\n";
  os << "n_elems " << op.n_elems << "\n";
  os << "c1s " << op.c1s << "\n";
  os << "modes " << op.modes() << "\n";
  const auto dump = [&](const char* tag, const Eigen::MatrixXd& m) {
    os << tag << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index cidx = 0; cidx < m.cols(); ++cidx)
        os << m(r, cidx) << (cidx + 1 == m.cols() ? "" : " ");
      os << "\n";
    }
  };
  dump("eigenvalues", op.eigenvalues.transpose());
  dump("eigenvectors", op.eigenvectors);
  dump("A", op.A);
  dump("Mm", op.Mm);
}

inline OperatorAssembly read_snapshot(std::istream& is) {
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (tag != "kfrac-assembly" || version != 1)
    throw contract_violation("read_snapshot: unrecognized snapshot header");
  std::string mode_name;
  double a, b, s, c1s;
  int n_elems, m;
  is >> tag >> mode_name >> tag >> a >> b >> tag >> s >> tag >> n_elems >> tag >>
      c1s >> tag >> m;
  const auto load = [&](Eigen::MatrixXd& dst) {
    Eigen::Index rows, cols;
    is >> tag >> rows >> cols;
    dst.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index cidx = 0; cidx < cols; ++cidx) is >> dst(r, cidx);
  };
  Eigen::MatrixXd ev, vecs, A, Mm;
  load(ev);
  load(vecs);
  load(A);
  load(Mm);
  if (!is) throw contract_violation("read_snapshot: truncated snapshot");
  OperatorAssembly op{mode_name == "spectral" ? OperatorMode::SpectralSine
                                              : OperatorMode::FemP1Integral,
                      Domain1D(a, b), s, n_elems, ev.row(0).transpose(), vecs, A, Mm, c1s};
  if (op.eigenvalues.size() != m)
    throw contract_violation("read_snapshot: inconsistent mode count");
  return op;
}

}  // namespace kfrac
