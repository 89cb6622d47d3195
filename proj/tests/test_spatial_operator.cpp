#include <catch2/catch_amalgamated.hpp>

#include <kfrac/spatial_operator.hpp>

#include "pinned_references.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

using kfrac::Domain1D;
using kfrac::ModalVector;
using kfrac::OperatorAssembly;
using kfrac::OperatorMode;

namespace {

// Independent evaluation of A_ij for the integral form: iterated 1-D adaptive
// quadrature with the inner integral split at y = x, where the only analytic
// step is the local slope-difference power integral on the two segments
// hugging the singularity. No pair decomposition, no scaling argument.
double oracle_fem_entry(const Domain1D& dom, double s, int n, int i, int j) {
  const double h = dom.length() / n;
  const auto hat = [&](int k, double x) -> double {
    const double v = 1.0 - std::fabs(x - (dom.a + k * h)) / h;
    return v > 0.0 ? v : 0.0;
  };
  const auto slope_at = [&](int k, double x) -> double {
    const int e = std::min(static_cast<int>((x - dom.a) / h), n - 1);
    if (e == k - 1) return 1.0 / h;
    if (e == k) return -1.0 / h;
    return 0.0;
  };

  const auto inner = [&](double x) -> double {
    std::vector<double> cuts;
    for (int k = 0; k <= n; ++k) cuts.push_back(dom.a + k * h);
    cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    const auto fy = [&](double y) {
      return (hat(i, x) - hat(i, y)) * (hat(j, x) - hat(j, y)) *
             std::pow(std::fabs(x - y), -1.0 - 2.0 * s);
    };
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double l = cuts[k], r = cuts[k + 1];
      if (r - l <= 0.0) continue;
      if (l == x || r == x) {
        // hats are linear here, so the difference product is exactly
        // slope_i slope_j (x-y)^2 against the kernel
        const double sij = slope_at(i, 0.5 * (l + r)) * slope_at(j, 0.5 * (l + r));
        acc += sij * std::pow(r - l, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
      } else {
        acc += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            fy, l, r, 10, 1e-10);
      }
    }
    return acc;
  };

  double dbl = 0.0;
  for (int e = 0; e < n; ++e) {
    dbl += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        inner, dom.a + e * h, dom.a + (e + 1) * h, 8, 1e-9);
  }

  boost::math::quadrature::tanh_sinh<double> ts;
  double tail = 0.0;
  for (int e = 0; e < n; ++e) {
    const auto fx = [&](double x) {
      const double da = x - dom.a, db = dom.b - x;
      // on boundary elements the hats vanish linearly, which tames the
      // boundary singularity; keep that cancellation in exact power form
      double part_a, part_b;
      if (e == 0) {
        part_a = (i == 1 && j == 1) ? std::pow(da, 2.0 - 2.0 * s) / (h * h) : 0.0;
      } else {
        part_a = hat(i, x) * hat(j, x) * std::pow(da, -2.0 * s);
      }
      if (e == n - 1) {
        part_b = (i == n - 1 && j == n - 1) ? std::pow(db, 2.0 - 2.0 * s) / (h * h) : 0.0;
      } else {
        part_b = hat(i, x) * hat(j, x) * std::pow(db, -2.0 * s);
      }
      return (part_a + part_b) / (2.0 * s);
    };
    tail += ts.integrate(fx, dom.a + e * h, dom.a + (e + 1) * h, 1e-10);
  }

  return 0.5 * kfrac::normalizing_constant(s) * (dbl + 2.0 * tail);
}

}  // namespace

TEST_CASE("normalizing constant matches the gamma formula") {
  REQUIRE(kfrac::normalizing_constant(0.5) == Catch::Approx(M_1_PI).epsilon(1e-13));
  REQUIRE(kfrac::normalizing_constant(0.25) ==
          Catch::Approx(0.19947114020071633897).epsilon(1e-13));
  REQUIRE(kfrac::normalizing_constant(0.75) ==
          Catch::Approx(0.29920671030107450845).epsilon(1e-13));
  const double near_one = kfrac::normalizing_constant(0.999);
  REQUIRE(std::isfinite(near_one));
  REQUIRE(near_one == Catch::Approx(0.0019963105601202859291).epsilon(1e-12));

  REQUIRE_THROWS_AS(kfrac::normalizing_constant(0.0), std::domain_error);
  REQUIRE_THROWS_AS(kfrac::normalizing_constant(1.0), std::domain_error);
  REQUIRE_THROWS_AS(kfrac::normalizing_constant(-0.1), std::domain_error);
  REQUIRE_THROWS_AS(kfrac::normalizing_constant(0.5, 2), std::domain_error);
}

TEST_CASE("spectral assembly has the closed-form eigenpairs") {
  auto op = kfrac::build_spectral(Domain1D(0.0, 1.0), 0.5, 4);
  REQUIRE(op.eigenvalues(0) == Catch::Approx(M_PI).epsilon(1e-14));
  REQUIRE(op.eigenvalues(1) == Catch::Approx(2.0 * M_PI).epsilon(1e-14));
  REQUIRE(op.A.isApprox(Eigen::MatrixXd(op.eigenvalues.asDiagonal())));
  REQUIRE(op.Mm.isIdentity(1e-15));

  // classical Laplacian recovered as s -> 1
  auto near = kfrac::build_spectral(Domain1D(0.0, 1.0), 0.999, 4);
  REQUIRE(near.eigenvalues(1) == Catch::Approx(4.0 * M_PI * M_PI).epsilon(0.005));
}

TEST_CASE("spectral modes are L2-orthonormal under quadrature") {
  Domain1D dom(-1.0, 1.5);
  auto op = kfrac::build_spectral(dom, 0.6, 6);
  const int cells = 200;
  const double hc = dom.length() / cells;
  for (int i = 0; i < 6; ++i) {
    for (int j = i; j < 6; ++j) {
      double acc = 0.0;
      for (int c = 0; c < cells; ++c) {
        // Simpson per cell
        const double x0 = dom.a + c * hc, x1 = x0 + 0.5 * hc, x2 = x0 + hc;
        acc += hc / 6.0 *
               (kfrac::eval_mode_function(op, i, x0) * kfrac::eval_mode_function(op, j, x0) +
                4.0 * kfrac::eval_mode_function(op, i, x1) *
                    kfrac::eval_mode_function(op, j, x1) +
                kfrac::eval_mode_function(op, i, x2) * kfrac::eval_mode_function(op, j, x2));
      }
      REQUIRE(acc == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-10));
    }
  }
}

TEST_CASE("fem assembly matches the adaptive-quadrature oracle") {
  Domain1D dom(0.0, 1.0);
  const int n = 4;
  auto op = kfrac::assemble_fem_integral(dom, 0.5, n);

  for (auto [i, j] : {std::pair{1, 1}, {2, 2}, {1, 2}, {1, 3}}) {
    const double ref = oracle_fem_entry(dom, 0.5, n, i, j);
    CAPTURE(i, j, ref);
    REQUIRE(op.A(i - 1, j - 1) == Catch::Approx(ref).epsilon(1e-6));
  }

  for (double s : {0.3, 0.75}) {
    auto ops = kfrac::assemble_fem_integral(dom, s, n);
    const double ref = oracle_fem_entry(dom, s, n, 2, 2);
    CAPTURE(s, ref);
    REQUIRE(ops.A(1, 1) == Catch::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("fem matrix is exactly symmetric and positive definite") {
  auto op = kfrac::assemble_fem_integral(Domain1D(0.0, 1.0), 0.6, 12);
  REQUIRE(op.A == op.A.transpose());
  REQUIRE(op.Mm == op.Mm.transpose());

  std::mt19937 rng(42);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(op.A.rows());
    for (int k = 0; k < x.size(); ++k) x(k) = dist(rng);
    if (x.norm() == 0.0) continue;
    REQUIRE(x.dot(op.A * x) > 0.0);
    REQUIRE(x.dot(op.Mm * x) > 0.0);
  }
}

TEST_CASE("fem eigenpairs solve the generalized problem") {
  auto op = kfrac::assemble_fem_integral(Domain1D(0.0, 1.0), 0.4, 16);
  REQUIRE(op.eigenvalues(0) > 0.0);
  for (int k = 1; k < op.modes(); ++k)
    REQUIRE(op.eigenvalues(k) >= op.eigenvalues(k - 1));
  for (int k = 0; k < op.modes(); ++k) {
    const Eigen::VectorXd psi = op.eigenvectors.col(k);
    const double res = (op.A * psi - op.eigenvalues(k) * op.Mm * psi).norm();
    REQUIRE(res <= 1e-8 * (op.A * psi).norm());
  }
  // L2 orthonormality of the eigenvectors
  Eigen::MatrixXd gram = op.eigenvectors.transpose() * op.Mm * op.eigenvectors;
  REQUIRE(gram.isIdentity(1e-10));
}

TEST_CASE("fem eigenvalues decrease with mesh refinement") {
  for (double s : {0.3, 0.7}) {
    auto coarse = kfrac::assemble_fem_integral(Domain1D(0.0, 1.0), s, 8);
    auto mid = kfrac::assemble_fem_integral(Domain1D(0.0, 1.0), s, 16);
    auto fine = kfrac::assemble_fem_integral(Domain1D(0.0, 1.0), s, 32);
    for (int k = 0; k < 5; ++k) {
      CAPTURE(s, k);
      REQUIRE(mid.eigenvalues(k) <= coarse.eigenvalues(k) * (1.0 + 1e-12));
      REQUIRE(fine.eigenvalues(k) <= mid.eigenvalues(k) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("fem lambda1 reproduces the mesh-refinement pin") {
  auto op = kfrac::assemble_fem_integral(Domain1D(-1.0, 1.0), 0.5, 128);
  REQUIRE(op.eigenvalues(0) ==
          Catch::Approx(pins::fem_lambda1_interval_half_n128).epsilon(1e-10));
  REQUIRE(op.eigenvalues(0) ==
          Catch::Approx(pins::fem_lambda1_interval_half).epsilon(0.02));
}

TEST_CASE("fem operator approaches the classical Laplacian as s -> 1") {
  auto op = kfrac::assemble_fem_integral(Domain1D(0.0, 1.0), 0.99, 128);
  REQUIRE(op.eigenvalues(0) == Catch::Approx(M_PI * M_PI).epsilon(0.15));
}

TEST_CASE("poincare inequality in modal coordinates") {
  auto spectral = kfrac::build_spectral(Domain1D(0.0, 2.0), 0.45, 12);
  auto fem = kfrac::assemble_fem_integral(Domain1D(0.0, 2.0), 0.45, 10);
  std::mt19937 rng(7);
  std::normal_distribution<double> dist;
  for (const auto* op : {&spectral, &fem}) {
    for (int trial = 0; trial < 20; ++trial) {
      ModalVector v;
      v.coefficients.resize(op->modes());
      for (int k = 0; k < v.size(); ++k) v.coefficients(k) = dist(rng);
      auto nm = kfrac::norms(v, *op);
      REQUIRE(nm.x0 * nm.x0 >=
              op->eigenvalues(0) * nm.l2 * nm.l2 * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("projection reproduces basis vectors and closed-form coefficients") {
  auto op = kfrac::build_spectral(Domain1D(0.0, 1.0), 0.5, 8);

  auto e1 = kfrac::project([&](double x) { return kfrac::eval_mode_function(op, 0, x); }, op);
  REQUIRE(e1.coefficients(0) == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(e1.coefficients.tail(7).cwiseAbs().maxCoeff() < 1e-12);

  auto zero = kfrac::project([](double) { return 0.0; }, op);
  REQUIRE(zero.coefficients.cwiseAbs().maxCoeff() == 0.0);

  // u0 = x(1-x): sine coefficients 4*sqrt(2)/(k pi)^3 for odd k, 0 for even
  auto para = kfrac::project([](double x) { return x * (1.0 - x); }, op);
  for (int k = 1; k <= 8; ++k) {
    const double exact =
        k % 2 == 1 ? 4.0 * std::sqrt(2.0) / std::pow(k * M_PI, 3.0) : 0.0;
    CAPTURE(k);
    REQUIRE(para.coefficients(k - 1) == Catch::Approx(exact).margin(1e-12));
  }

  auto fem = kfrac::assemble_fem_integral(Domain1D(0.0, 1.0), 0.5, 8);
  auto femE1 =
      kfrac::project([&](double x) { return kfrac::eval_mode_function(fem, 0, x); }, fem);
  REQUIRE(femE1.coefficients(0) == Catch::Approx(1.0).epsilon(1e-10));
  REQUIRE(femE1.coefficients.tail(fem.modes() - 1).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("norm triple in the eigenbasis") {
  auto op = kfrac::build_spectral(Domain1D(0.0, 1.0), 0.5, 5);
  ModalVector e1;
  e1.coefficients = Eigen::VectorXd::Unit(5, 0);
  auto nm = kfrac::norms(e1, op);
  REQUIRE(nm.l2 == Catch::Approx(1.0).epsilon(1e-14));
  REQUIRE(nm.x0 == Catch::Approx(std::sqrt(op.eigenvalues(0))).epsilon(1e-14));
  REQUIRE(nm.laplacian_s == Catch::Approx(op.eigenvalues(0)).epsilon(1e-14));

  ModalVector zero;
  zero.coefficients = Eigen::VectorXd::Zero(5);
  auto nz = kfrac::norms(zero, op);
  REQUIRE(nz.l2 == 0.0);
  REQUIRE(nz.x0 == 0.0);
  REQUIRE(nz.laplacian_s == 0.0);

  std::mt19937 rng(3);
  std::normal_distribution<double> dist;
  ModalVector v;
  v.coefficients.resize(5);
  for (int k = 0; k < 5; ++k) v.coefficients(k) = dist(rng);
  REQUIRE(kfrac::norms(v, op).x0 ==
          Catch::Approx(std::sqrt(v.coefficients.dot(op.A * v.coefficients)))
              .epsilon(1e-12));
}

TEST_CASE("spectral regularity norm exponents") {
  auto op = kfrac::build_spectral(Domain1D(0.0, 1.0), 0.5, 6);
  ModalVector v;
  v.coefficients.resize(6);
  for (int k = 0; k < 6; ++k) v.coefficients(k) = 1.0 / (k + 1.0);

  auto nm = kfrac::norms(v, op);
  REQUIRE(kfrac::spectral_regularity_norm(v, op, 0.0) == Catch::Approx(nm.x0).epsilon(1e-13));
  REQUIRE(kfrac::spectral_regularity_norm(v, op, op.s) ==
          Catch::Approx(nm.laplacian_s).epsilon(1e-13));

  ModalVector e1;
  e1.coefficients = Eigen::VectorXd::Unit(6, 0);
  REQUIRE(kfrac::spectral_regularity_norm(e1, op, 0.25) ==
          Catch::Approx(std::pow(op.eigenvalues(0), 0.75)).epsilon(1e-13));

  auto fem = kfrac::assemble_fem_integral(Domain1D(0.0, 1.0), 0.5, 6);
  ModalVector w;
  w.coefficients = Eigen::VectorXd::Ones(fem.modes());
  REQUIRE_THROWS_AS(kfrac::spectral_regularity_norm(w, fem, 0.25), kfrac::unsupported_mode);
  REQUIRE_THROWS_AS(kfrac::spectral_regularity_norm(v, op, -0.1), std::domain_error);
}

TEST_CASE("assembly snapshots round-trip exactly") {
  for (int mode = 0; mode < 2; ++mode) {
    OperatorAssembly op =
        mode == 0 ? kfrac::build_spectral(Domain1D(-0.5, 2.0), 0.55, 5)
                  : kfrac::assemble_fem_integral(Domain1D(-0.5, 2.0), 0.55, 6);
    std::stringstream ss;
    kfrac::write_snapshot(op, ss);
    auto back = kfrac::read_snapshot(ss);
    REQUIRE(back.mode == op.mode);
    REQUIRE(back.domain.a == op.domain.a);
    REQUIRE(back.domain.b == op.domain.b);
    REQUIRE(back.s == op.s);
    REQUIRE(back.n_elems == op.n_elems);
    REQUIRE(back.c1s == op.c1s);
    REQUIRE(back.eigenvalues == op.eigenvalues);
    REQUIRE(back.eigenvectors == op.eigenvectors);
    REQUIRE(back.A == op.A);
    REQUIRE(back.Mm == op.Mm);
  }
  std::stringstream junk("not-a-snapshot 9");
  REQUIRE_THROWS_AS(kfrac::read_snapshot(junk), kfrac::contract_violation);
}

TEST_CASE("spatial operator rejects bad input") {
  REQUIRE_THROWS_AS(Domain1D(1.0, 1.0), std::domain_error);
  REQUIRE_THROWS_AS(kfrac::build_spectral(Domain1D(0.0, 1.0), 0.5, 0), std::domain_error);
  REQUIRE_THROWS_AS(kfrac::build_spectral(Domain1D(0.0, 1.0), 1.2, 4), std::domain_error);
  REQUIRE_THROWS_AS(kfrac::assemble_fem_integral(Domain1D(0.0, 1.0), 0.5, 1),
                    std::domain_error);
  REQUIRE_THROWS_AS(kfrac::assemble_fem_integral(Domain1D(0.0, 1.0), 0.0, 8),
                    std::domain_error);
}
