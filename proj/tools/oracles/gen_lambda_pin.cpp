// One-off generator for the FEM lambda_1 regression pin: Richardson
// extrapolation of the first eigenvalue on (-1,1), s = 1/2, over
// n_elems in {32, 64, 128}. Build ad hoc; output is frozen into
// tests/pinned_references.hpp.

#include <kfrac/spatial_operator.hpp>

#include <cmath>
#include <cstdio>

int main() {
  const kfrac::Domain1D dom(-1.0, 1.0);
  const double s = 0.5;
  double lam[3];
  int meshes[3] = {32, 64, 128};
  for (int k = 0; k < 3; ++k) {
    auto op = kfrac::assemble_fem_integral(dom, s, meshes[k]);
    lam[k] = op.eigenvalues(0);
    std::printf("n=%3d  lambda1 = %.17g\n", meshes[k], lam[k]);
  }
  const double p = std::log2((lam[0] - lam[1]) / (lam[1] - lam[2]));
  const double star = lam[2] - (lam[1] - lam[2]) / (std::pow(2.0, p) - 1.0);
  std::printf("observed order p = %.6f\n", p);
  std::printf("richardson lambda1* = %.17g\n", star);
  std::printf("lambda1(128) = %.17g\n", lam[2]);
  return 0;
}
