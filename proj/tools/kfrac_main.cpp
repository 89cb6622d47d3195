#include <CLI11.hpp>

#include <kfrac/experiment.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string path;
  std::string out_dir;
  std::vector<std::string> checks;
  int verbosity = 0;
};

void add_common(CLI::App* sub, Options& o, const char* path_help) {
  sub->add_option("path", o.path, path_help)->required();
  sub->add_option("-o,--output", o.out_dir, "output directory override");
  sub->add_option("--check", o.checks,
                  "restrict verification to these check ids (repeatable)");
  sub->add_flag("-v,--verbose", o.verbosity, "per-check detail");
}

kfrac::ExperimentConfig load_with_overrides(const Options& o) {
  auto config = kfrac::load_config_file(o.path);
  if (!o.out_dir.empty()) config.out_dir = o.out_dir;
  if (!o.checks.empty()) config.checks = o.checks;
  return config;
}

int do_run(const Options& o) {
  const auto config = load_with_overrides(o);
  const auto art = kfrac::run_experiment(config, &std::cout, o.verbosity);
  std::cout << "artifacts: " << art.directory.string() << "\n";
  return art.exit_code;
}

int do_verify(const Options& o) {
  const auto art = kfrac::verify_stored(o.path, o.checks, &std::cout, o.verbosity);
  std::cout << (art.exit_code == 0 ? "all checks pass\n" : "check failures\n");
  return art.exit_code;
}

int do_study(const Options& o) {
  const auto config = load_with_overrides(o);
  const auto study =
      kfrac::convergence_study(config, o.verbosity > 0 ? &std::cout : nullptr);
  fs::create_directories(config.out_dir);
  const fs::path table = fs::path(config.out_dir) / "study.tsv";
  kfrac::write_study_table(study, table);
  kfrac::detail::write_text(fs::path(config.out_dir) / "manifest.yaml",
                            kfrac::manifest_text(config));
  for (const auto& row : study.rows) {
    std::cout << "n_steps " << row.n_steps << ": error " << row.error;
    if (!std::isnan(row.order)) std::cout << ", order " << row.order;
    if (row.degenerate) std::cout << " (degenerate)";
    std::cout << "\n";
  }
  std::cout << (study.against_oracle ? "errors vs closed-form solution"
                                     : "self-convergence (Richardson pairs)")
            << " -> " << table.string() << "\n";
  return 0;
}

int do_oracle(const Options& o) {
  const auto config = load_with_overrides(o);
  fs::create_directories(config.out_dir);
  const fs::path table = fs::path(config.out_dir) / "oracle.tsv";
  const double err = kfrac::oracle_table(config, table);
  std::cout << "max |u_num - u_exact| = " << err << " -> " << table.string() << "\n";
  return err <= 1e-3 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "kfrac: spectral Galerkin solver and verification harness for a "
      "fractional-order Kirchhoff diffusion equation with memory"};
  app.require_subcommand(1);

  Options run_o, verify_o, study_o, oracle_o;
  auto* run_cmd = app.add_subcommand("run", "solve a configured experiment and emit artifacts");
  add_common(run_cmd, run_o, "experiment config (YAML)");
  auto* verify_cmd =
      app.add_subcommand("verify", "re-run verification checks on a stored run");
  add_common(verify_cmd, verify_o, "run directory or manifest.yaml");
  auto* study_cmd =
      app.add_subcommand("study", "convergence study at n_steps x {1,2,4,8}");
  add_common(study_cmd, study_o, "experiment config (YAML)");
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "compare a linear run against the closed-form modal solution");
  add_common(oracle_cmd, oracle_o, "experiment config (YAML)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return do_run(run_o);
    if (verify_cmd->parsed()) return do_verify(verify_o);
    if (study_cmd->parsed()) return do_study(study_o);
    return do_oracle(oracle_o);
  } catch (const kfrac::config_error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const kfrac::solver_failure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
