// Generates the high-resolution (n_steps = 16384) reference ratios that the
// test suite pins production runs against: the single-mode linear relaxation
// and the built-in nonlinear memory scenario. Build standalone:
//   g++ -O2 -std=c++20 -Iinclude -I/usr/include/eigen3 \
//       tools/oracles/gen_solver_pins.cpp -o gen_solver_pins

#include <kfrac/verification.hpp>

#include <chrono>
#include <cstdio>

using namespace kfrac;

static void report(const char* tag, const SolutionHistory& hist, const ProblemData& pd) {
  const auto a2 = check_apriori_2(hist, pd);
  std::printf("%s_apriori1       = %.17g\n", tag, check_apriori_1(hist, pd));
  std::printf("%s_apriori2       = %.17g\n", tag, a2.ratio);
  std::printf("%s_apriori2_plain = %.17g\n", tag, a2.plain_ratio);
  std::printf("%s_apriori3       = %.17g\n", tag, check_apriori_3(hist, pd));
  std::printf("%s_growth         = %.17g\n", tag, check_growth(hist, pd));
}

int main() {
  const int n_ref = 16384;
  const auto t0 = std::chrono::steady_clock::now();

  {
    auto op = build_spectral(Domain1D(0.0, 1.0), 0.5, 1);
    ModalVector u0;
    u0.coefficients = Eigen::VectorXd::Ones(1);
    ProblemData pd(FractionalOrders(0.5, 0.5), op, KirchhoffLaw::constant(1.0),
                   MemorySpec::none(), SourceTerm::zero(), u0, 1.0);
    auto hist = run(pd, SolverConfig(UniformTimeGrid(1.0, n_ref), 1));
    report("lin", hist, pd);
    std::printf("lin_regularity     = %.17g\n",
                regularity_series(hist, op, std::min(op.s, 0.499)) /
                    (std::sqrt(hist.x0_norm_sq(0)) + 0.0));
  }

  {
    auto op = build_spectral(Domain1D(0.0, 1.0), 0.5, 16);
    auto mem = MemorySpec::make_separable(
        0.05, [](double t, double tau) { return std::exp(-(t - tau)); },
        [](double) { return 1.0; });
    auto src = SourceTerm::separable([](double) { return 1.0; },
                                     [](double x) { return std::sin(M_PI * x); });
    auto u0 = project([](double x) { return x * (1.0 - x); }, op);
    ProblemData pd(FractionalOrders(0.5, 0.5), op, KirchhoffLaw::saturating(1.0, 0.2),
                   mem, src, u0, 1.0);
    auto hist = run(pd, SolverConfig(UniformTimeGrid(1.0, n_ref), 16));
    report("mem", hist, pd);
  }

  const auto t1 = std::chrono::steady_clock::now();
  std::printf("# elapsed %.1f s\n",
              std::chrono::duration<double>(t1 - t0).count());
  return 0;
}
