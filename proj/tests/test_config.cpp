#include <catch2/catch_amalgamated.hpp>

#include <kfrac/config.hpp>

using kfrac::ExperimentConfig;
using kfrac::parse_config;

namespace {

const std::string kMinimal = R"(
problem:
  alpha: 0.5
  s: 0.5
  operator: spectral
  modes: 8
  kirchhoff: {kind: constant, m0: 1.0}
  source: {kind: zero}
  initial: {kind: mode, mode: 1, amplitude: 1.0}
solver:
  T: 1.0
  n_steps: 512
)";

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const kfrac::config_error& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("minimal config parses with defaults filled") {
  const auto c = parse_config(kMinimal);
  REQUIRE(c.alpha == 0.5);
  REQUIRE(c.s == 0.5);
  REQUIRE(c.op_mode == kfrac::OperatorMode::SpectralSine);
  REQUIRE(c.modes == 8);
  REQUIRE(c.law_kind == kfrac::LawKind::Constant);
  REQUIRE(c.m0 == 1.0);
  REQUIRE(c.beta == 0.0);
  REQUIRE(c.kernel == kfrac::KernelKind::None);
  REQUIRE(c.source_kind == kfrac::SourceKind::Zero);
  REQUIRE(c.init_kind == kfrac::InitialKind::Mode);
  REQUIRE(c.T == 1.0);
  REQUIRE(c.n_steps == 512);
  REQUIRE(c.mode_count == 8);  // 0 sentinel resolved to all modes
  REQUIRE(c.corrector_iterations == 2);
  REQUIRE(c.fixed_point_tol == 1e-12);
  REQUIRE(c.checks.empty());
  REQUIRE(c.out_dir == "out");
  REQUIRE(c.write_tables);
  REQUIRE(c.write_report);
  REQUIRE_FALSE(c.source_active());
  REQUIRE_FALSE(c.memory_active());
}

TEST_CASE("order constraints are enforced with named rules") {
  auto bad_alpha = kMinimal;
  bad_alpha.replace(bad_alpha.find("alpha: 0.5"), 10, "alpha: 1.0");
  REQUIRE(mentions(errors_of(bad_alpha), "(0,1)"));

  auto bad_s = kMinimal;
  bad_s.replace(bad_s.find("  s: 0.5"), 8, "  s: 0.0");
  REQUIRE(mentions(errors_of(bad_s), "(0,1)"));

  const std::string mixed = R"(
problem:
  alpha: 0.5
  s: 0.5
  operator: spectral
  modes: 8
  kirchhoff: {kind: constant, m0: 1.0}
  memory: {beta: 0.1, kernel: none, s_memory: 0.8}
  source: {kind: zero}
  initial: {kind: mode}
solver: {T: 1.0, n_steps: 16}
)";
  const auto errs = errors_of(mixed);
  REQUIRE(mentions(errs, "s_memory"));
  REQUIRE(mentions(errs, "reduced-order memory rule"));
}

TEST_CASE("unknown keys are rejected and all errors are collected") {
  const std::string broken = R"(
problem:
  alpha: 2.0
  s: 0.5
  operator: spectral
  modes: 0
  typo_key: 1
  kirchhoff: {kind: constant, m0: -1.0}
  source: {kind: zero}
  initial: {kind: mode}
solver: {T: 1.0, n_steps: 16}
)";
  const auto errs = errors_of(broken);
  REQUIRE(errs.size() >= 4);
  REQUIRE(mentions(errs, "typo_key"));
  REQUIRE(mentions(errs, "alpha"));
  REQUIRE(mentions(errs, "modes"));
  REQUIRE(mentions(errs, "m0"));

  REQUIRE(errors_of("solver: {T: 1.0, n_steps: 4}").size() == 1);  // missing problem
  REQUIRE_THROWS_AS(parse_config(": ["), kfrac::config_error);
}

TEST_CASE("kind-conditional keys are policed") {
  const std::string spectral_elements = R"(
problem:
  alpha: 0.5
  s: 0.5
  operator: spectral
  modes: 8
  elements: 64
  kirchhoff: {kind: constant, m0: 1.0}
  source: {kind: zero}
  initial: {kind: mode}
solver: {T: 1.0, n_steps: 16}
)";
  REQUIRE(mentions(errors_of(spectral_elements), "elements"));

  const std::string const_with_slope = R"(
problem:
  alpha: 0.5
  s: 0.5
  operator: spectral
  modes: 8
  kirchhoff: {kind: constant, m0: 1.0, c: 0.3}
  source: {kind: zero}
  initial: {kind: mode}
solver: {T: 1.0, n_steps: 16}
)";
  REQUIRE(mentions(errors_of(const_with_slope), "no slope parameter"));

  const std::string zero_src_amp = R"(
problem:
  alpha: 0.5
  s: 0.5
  operator: spectral
  modes: 8
  kirchhoff: {kind: constant, m0: 1.0}
  source: {kind: zero, amplitude: 2.0}
  initial: {kind: mode}
solver: {T: 1.0, n_steps: 16}
)";
  REQUIRE(mentions(errors_of(zero_src_amp), "amplitude"));
}

TEST_CASE("check list validation") {
  const std::string base = R"(
problem:
  alpha: 0.5
  s: 0.5
  operator: spectral
  modes: 4
  kirchhoff: {kind: saturating, m0: 1.0, c: 0.2}
  source: {kind: sine, amplitude: 1.0, mode: 1}
  initial: {kind: parabola, amplitude: 1.0}
solver: {T: 1.0, n_steps: 16}
checks: [h2, apriori1, gronwall, bogus]
)";
  const auto errs = errors_of(base);
  REQUIRE(mentions(errs, "bogus"));
  REQUIRE(mentions(errs, "gronwall"));  // forced run: envelope check inapplicable

  auto ok = base;
  ok.replace(ok.find("checks: [h2, apriori1, gronwall, bogus]"), 40,
             "checks: [h2, apriori1, holder]");
  const auto c = parse_config(ok);
  REQUIRE(c.checks == std::vector<std::string>{"h2", "apriori1", "holder"});
}

TEST_CASE("solver block limits") {
  auto text = kMinimal + "  mode_count: 9\n";
  REQUIRE(mentions(errors_of(text), "mode_count"));

  auto fine = kMinimal + "  mode_count: 3\n  corrector_iterations: 4\n";
  const auto c = parse_config(fine);
  REQUIRE(c.mode_count == 3);
  REQUIRE(c.corrector_iterations == 4);
  REQUIRE_NOTHROW(kfrac::make_solver_config(c));
}

TEST_CASE("resolved echo reparses to the identical configuration") {
  const std::string full = R"(
problem:
  domain: [0.0, 1.0]
  alpha: 0.3141592653589793
  s: 0.5
  operator: spectral
  modes: 16
  kirchhoff: {kind: saturating, m0: 1.0, c: 0.2}
  memory: {beta: 0.05, kernel: exponential, scale: 1.0, rate: 1.0, s_memory: 0.25}
  source: {kind: sine, amplitude: 0.1, mode: 2, decay: 0.7}
  initial: {kind: parabola, amplitude: 1.0}
solver:
  T: 1.0
  n_steps: 128
  fixed_point_tol: 1.0e-13
checks: [apriori1, apriori2, holder]
output:
  directory: scratch
  formats: [tsv, json]
)";
  const auto c = parse_config(full);
  const auto r = parse_config(kfrac::manifest_text(c));
  REQUIRE(r.alpha == c.alpha);  // bitwise round trip through the emitted text
  REQUIRE(r.s == c.s);
  REQUIRE(r.s_memory == c.s_memory);
  REQUIRE(r.beta == c.beta);
  REQUIRE(r.kernel_rate == c.kernel_rate);
  REQUIRE(r.amplitude == c.amplitude);
  REQUIRE(r.decay == c.decay);
  REQUIRE(r.fixed_point_tol == c.fixed_point_tol);
  REQUIRE(r.T == c.T);
  REQUIRE(r.n_steps == c.n_steps);
  REQUIRE(r.mode_count == c.mode_count);
  REQUIRE(r.checks == c.checks);
  REQUIRE(r.out_dir == c.out_dir);
  REQUIRE(kfrac::manifest_text(r) == kfrac::manifest_text(c));
}

TEST_CASE("make_problem realizes the declared scenario") {
  const std::string text = R"(
problem:
  alpha: 0.5
  s: 0.5
  operator: spectral
  modes: 16
  kirchhoff: {kind: saturating, m0: 1.0, c: 0.2}
  memory: {beta: 0.05, kernel: exponential, scale: 1.0, rate: 1.0}
  source: {kind: sine, amplitude: 1.0, mode: 1}
  initial: {kind: parabola, amplitude: 1.0}
solver: {T: 1.0, n_steps: 32}
)";
  const auto c = parse_config(text);
  const auto pd = kfrac::make_problem(c);
  REQUIRE(pd.assembly.modes() == 16);
  REQUIRE(pd.law.m0 == 1.0);
  REQUIRE(pd.memory.beta == 0.05);
  REQUIRE(pd.memory.separable);
  REQUIRE(pd.memory.g(1.0, 0.25) == Catch::Approx(std::exp(-0.75)));
  // parabola projects onto odd sine modes: 4 sqrt(2)/(k pi)^3
  const double a1 = 8.0 * std::sqrt(2.0) / std::pow(M_PI, 3) / 2.0;
  REQUIRE(pd.u0.coefficients(0) == Catch::Approx(a1).epsilon(1e-10));
  REQUIRE(std::fabs(pd.u0.coefficients(1)) < 1e-12);
  REQUIRE(pd.source_at(0.0)(0) == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));

  auto run = kfrac::run(pd, kfrac::make_solver_config(c));
  REQUIRE(run.coefficients.allFinite());

  const std::string fem = R"(
problem:
  alpha: 0.5
  s: 0.5
  operator: fem
  elements: 16
  kirchhoff: {kind: constant, m0: 1.0}
  source: {kind: zero}
  initial: {kind: mode, mode: 1, amplitude: 1.0}
solver: {T: 1.0, n_steps: 8, mode_count: 4}
)";
  const auto cf = parse_config(fem);
  REQUIRE(cf.available_modes() == 15);
  REQUIRE(cf.mode_count == 4);
  const auto pf = kfrac::make_problem(cf);
  REQUIRE(pf.assembly.mode == kfrac::OperatorMode::FemP1Integral);
  REQUIRE_NOTHROW(kfrac::run(pf, kfrac::make_solver_config(cf)));
}
