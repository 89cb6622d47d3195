#pragma once

// Experiment configuration: strict ingestion of the nested key-value config
// format, plus the fully resolved echo that manifests embed.  Parsing collects
// every violation before failing so a bad config is fixed in one pass, and
// unknown keys are errors rather than silently ignored.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <kfrac/problem.hpp>
#include <kfrac/solver.hpp>
#include <kfrac/verification.hpp>

namespace kfrac {

inline constexpr const char* version_string = "0.1.0";

class config_error : public std::runtime_error {
 public:
  explicit config_error(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& es) {
    std::string msg = "invalid configuration:";
    for (const auto& e : es) msg += "\n  - " + e;
    return msg;
  }
  std::vector<std::string> errors_;
};

enum class LawKind { Constant, Affine, Saturating };
enum class KernelKind { None, Exponential };
enum class SourceKind { Zero, Constant, Sine };
enum class InitialKind { Zero, Mode, Parabola };

struct ExperimentConfig {
  double domain_a = 0.0;
  double domain_b = 1.0;
  double alpha = 0.5;
  double s = 0.5;
  OperatorMode op_mode = OperatorMode::SpectralSine;
  int modes = 8;     // spectral resolution
  int elements = 64; // fem mesh cells

  LawKind law_kind = LawKind::Constant;
  double m0 = 1.0;
  double law_c = 0.0;

  double beta = 0.0;
  KernelKind kernel = KernelKind::None;
  double kernel_scale = 1.0;
  double kernel_rate = 1.0;
  double s_memory = std::numeric_limits<double>::quiet_NaN();  // NaN = same as s

  SourceKind source_kind = SourceKind::Zero;
  double amplitude = 1.0;
  int source_mode = 1;
  double decay = 0.0;

  InitialKind init_kind = InitialKind::Mode;
  int init_mode = 1;
  double init_amplitude = 1.0;

  double T = 1.0;
  int n_steps = 512;
  int mode_count = 0;  // resolved to available_modes() after validation
  int corrector_iterations = 2;
  double fixed_point_tol = 1e-12;

  std::vector<std::string> checks;  // empty = auto-select applicable checks

  std::string out_dir = "out";
  bool write_tables = true;
  bool write_report = true;

  int available_modes() const {
    return op_mode == OperatorMode::SpectralSine ? modes : elements - 1;
  }
  bool source_active() const {
    return source_kind != SourceKind::Zero && amplitude != 0.0;
  }
  bool memory_active() const {
    return beta != 0.0 || (kernel != KernelKind::None && kernel_scale != 0.0);
  }
  bool mixed_memory_order() const { return !std::isnan(s_memory); }
};

namespace detail {

inline void check_keys(const YAML::Node& node, const std::string& path,
                       std::initializer_list<const char*> allowed,
                       std::vector<std::string>& errors) {
  if (!node.IsDefined() || node.IsNull()) return;
  if (!node.IsMap()) {
    errors.push_back(path + ": expected a key-value section");
    return;
  }
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) errors.push_back(path + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_or(const YAML::Node& node, const char* key, const std::string& path, T fallback,
         std::vector<std::string>& errors) {
  if (!node.IsDefined() || node.IsNull() || !node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    errors.push_back(path + "." + key + ": cannot be read as " +
                     (std::is_same_v<T, int> ? "an integer"
                      : std::is_same_v<T, double> ? "a number"
                                                  : "a string"));
    return fallback;
  }
}

inline bool has_key(const YAML::Node& node, const char* key) {
  return node.IsDefined() && !node.IsNull() && node.IsMap() && node[key];
}

template <class Enum>
Enum parse_kind(const YAML::Node& node, const char* key, const std::string& path,
                std::initializer_list<std::pair<const char*, Enum>> table,
                Enum fallback, std::vector<std::string>& errors) {
  const std::string raw = get_or<std::string>(node, key, path, "", errors);
  if (raw.empty()) return fallback;
  for (const auto& [name, value] : table)
    if (raw == name) return value;
  std::string choices;
  for (const auto& [name, value] : table) {
    (void)value;
    choices += choices.empty() ? name : std::string(" | ") + name;
  }
  errors.push_back(path + "." + key + ": '" + raw + "' is not one of " + choices);
  return fallback;
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
  std::vector<std::string> errors;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw config_error({std::string("config is not well formed: ") + e.what()});
  }
  if (!root.IsMap()) throw config_error({"config must be a key-value document"});

  // a manifest embeds the config under a 'config' key next to the version tag
  if (root["config"]) {
    detail::check_keys(root, "manifest", {"version", "config", "generated_by"}, errors);
    root = root["config"];
    if (!root.IsMap()) throw config_error({"manifest: 'config' must be a section"});
  }

  detail::check_keys(root, "config", {"problem", "solver", "checks", "output"}, errors);
  if (!root["problem"]) errors.push_back("config: missing 'problem' section");
  if (!root["solver"]) errors.push_back("config: missing 'solver' section");
  if (!errors.empty()) throw config_error(std::move(errors));

  ExperimentConfig c;
  const YAML::Node problem = root["problem"];
  detail::check_keys(problem, "problem",
                     {"domain", "alpha", "s", "operator", "modes", "elements",
                      "kirchhoff", "memory", "source", "initial"},
                     errors);

  if (detail::has_key(problem, "domain")) {
    const YAML::Node dom = problem["domain"];
    if (!dom.IsSequence() || dom.size() != 2) {
      errors.push_back("problem.domain: expected a two-entry sequence [a, b]");
    } else {
      try {
        c.domain_a = dom[0].as<double>();
        c.domain_b = dom[1].as<double>();
      } catch (const YAML::Exception&) {
        errors.push_back("problem.domain: endpoints must be numbers");
      }
    }
  }
  if (!(c.domain_a < c.domain_b) || !std::isfinite(c.domain_a) ||
      !std::isfinite(c.domain_b))
    errors.push_back("problem.domain: endpoints must be finite with a < b");

  c.alpha = detail::get_or(problem, "alpha", "problem", c.alpha, errors);
  c.s = detail::get_or(problem, "s", "problem", c.s, errors);
  if (!(c.alpha > 0.0) || !(c.alpha < 1.0))
    errors.push_back("problem.alpha: the time order must lie in the open interval (0,1)");
  if (!(c.s > 0.0) || !(c.s < 1.0))
    errors.push_back("problem.s: the diffusion order must lie in the open interval (0,1)");

  c.op_mode = detail::parse_kind(problem, "operator", "problem",
                                 {std::pair{"spectral", OperatorMode::SpectralSine},
                                  std::pair{"fem", OperatorMode::FemP1Integral}},
                                 c.op_mode, errors);
  const bool spectral = c.op_mode == OperatorMode::SpectralSine;
  if (spectral && detail::has_key(problem, "elements"))
    errors.push_back("problem.elements: only meaningful for the fem operator");
  if (!spectral && detail::has_key(problem, "modes"))
    errors.push_back(
        "problem.modes: the fem operator derives its modes from 'elements'; "
        "truncate with solver.mode_count");
  c.modes = detail::get_or(problem, "modes", "problem", c.modes, errors);
  c.elements = detail::get_or(problem, "elements", "problem", c.elements, errors);
  if (spectral && c.modes < 1) errors.push_back("problem.modes: must be at least 1");
  if (!spectral && c.elements < 2)
    errors.push_back("problem.elements: must be at least 2");

  const YAML::Node law = problem["kirchhoff"];
  detail::check_keys(law, "problem.kirchhoff", {"kind", "m0", "c"}, errors);
  c.law_kind = detail::parse_kind(law, "kind", "problem.kirchhoff",
                                  {std::pair{"constant", LawKind::Constant},
                                   std::pair{"affine", LawKind::Affine},
                                   std::pair{"saturating", LawKind::Saturating}},
                                  c.law_kind, errors);
  c.m0 = detail::get_or(law, "m0", "problem.kirchhoff", c.m0, errors);
  c.law_c = detail::get_or(law, "c", "problem.kirchhoff", c.law_c, errors);
  if (!(c.m0 > 0.0))
    errors.push_back(
        "problem.kirchhoff.m0: the law must stay above a positive floor, m0 > 0");
  if (c.law_c < 0.0) errors.push_back("problem.kirchhoff.c: slope must be nonnegative");
  if (c.law_kind == LawKind::Constant && detail::has_key(law, "c") && c.law_c != 0.0)
    errors.push_back("problem.kirchhoff.c: a constant law takes no slope parameter");

  const YAML::Node mem = problem["memory"];
  detail::check_keys(mem, "problem.memory",
                     {"beta", "kernel", "scale", "rate", "s_memory"}, errors);
  c.beta = detail::get_or(mem, "beta", "problem.memory", c.beta, errors);
  c.kernel = detail::parse_kind(mem, "kernel", "problem.memory",
                                {std::pair{"none", KernelKind::None},
                                 std::pair{"exponential", KernelKind::Exponential}},
                                c.kernel, errors);
  c.kernel_scale = detail::get_or(mem, "scale", "problem.memory", c.kernel_scale, errors);
  c.kernel_rate = detail::get_or(mem, "rate", "problem.memory", c.kernel_rate, errors);
  if (detail::has_key(mem, "s_memory"))
    c.s_memory = detail::get_or(mem, "s_memory", "problem.memory", 0.0, errors);
  if (!(c.beta >= 0.0)) errors.push_back("problem.memory.beta: must be nonnegative");
  if (c.kernel == KernelKind::None) {
    if (detail::has_key(mem, "scale"))
      errors.push_back("problem.memory.scale: only meaningful for an exponential kernel");
    if (detail::has_key(mem, "rate"))
      errors.push_back("problem.memory.rate: only meaningful for an exponential kernel");
  }
  if (c.mixed_memory_order()) {
    if (!(c.s_memory > 0.0) || c.s_memory > c.s)
      errors.push_back(
          "problem.memory.s_memory: the memory order must satisfy 0 < s_memory <= s "
          "(reduced-order memory rule)");
    if (!spectral)
      errors.push_back("problem.memory.s_memory: mixed orders require the spectral operator");
    if (c.beta == 0.0 && c.kernel == KernelKind::None)
      errors.push_back("problem.memory.s_memory: set but the memory term is inactive");
  }

  const YAML::Node src = problem["source"];
  detail::check_keys(src, "problem.source", {"kind", "amplitude", "mode", "decay"},
                     errors);
  c.source_kind = detail::parse_kind(src, "kind", "problem.source",
                                     {std::pair{"zero", SourceKind::Zero},
                                      std::pair{"constant", SourceKind::Constant},
                                      std::pair{"sine", SourceKind::Sine}},
                                     c.source_kind, errors);
  c.amplitude = detail::get_or(src, "amplitude", "problem.source", c.amplitude, errors);
  c.source_mode = detail::get_or(src, "mode", "problem.source", c.source_mode, errors);
  c.decay = detail::get_or(src, "decay", "problem.source", c.decay, errors);
  if (c.source_kind == SourceKind::Zero) {
    for (const char* k : {"amplitude", "mode", "decay"})
      if (detail::has_key(src, k))
        errors.push_back(std::string("problem.source.") + k +
                         ": only meaningful for a nonzero source kind");
  }
  if (c.source_kind == SourceKind::Constant && detail::has_key(src, "mode"))
    errors.push_back("problem.source.mode: only meaningful for the sine source");
  if (c.source_mode < 1) errors.push_back("problem.source.mode: must be at least 1");
  if (!std::isfinite(c.amplitude) || !std::isfinite(c.decay))
    errors.push_back("problem.source: amplitude and decay must be finite");

  const YAML::Node init = problem["initial"];
  detail::check_keys(init, "problem.initial", {"kind", "mode", "amplitude"}, errors);
  c.init_kind = detail::parse_kind(init, "kind", "problem.initial",
                                   {std::pair{"zero", InitialKind::Zero},
                                    std::pair{"mode", InitialKind::Mode},
                                    std::pair{"parabola", InitialKind::Parabola}},
                                   c.init_kind, errors);
  c.init_mode = detail::get_or(init, "mode", "problem.initial", c.init_mode, errors);
  c.init_amplitude =
      detail::get_or(init, "amplitude", "problem.initial", c.init_amplitude, errors);
  if (c.init_kind == InitialKind::Zero)
    for (const char* k : {"mode", "amplitude"})
      if (detail::has_key(init, k))
        errors.push_back(std::string("problem.initial.") + k +
                         ": only meaningful for a nonzero initial kind");
  if (c.init_kind == InitialKind::Parabola && detail::has_key(init, "mode"))
    errors.push_back("problem.initial.mode: only meaningful for the mode initial kind");
  if (!std::isfinite(c.init_amplitude))
    errors.push_back("problem.initial.amplitude: must be finite");

  const YAML::Node solver = root["solver"];
  detail::check_keys(
      solver, "solver",
      {"T", "n_steps", "mode_count", "corrector_iterations", "fixed_point_tol"}, errors);
  c.T = detail::get_or(solver, "T", "solver", c.T, errors);
  c.n_steps = detail::get_or(solver, "n_steps", "solver", c.n_steps, errors);
  c.mode_count = detail::get_or(solver, "mode_count", "solver", c.mode_count, errors);
  c.corrector_iterations = detail::get_or(solver, "corrector_iterations", "solver",
                                          c.corrector_iterations, errors);
  c.fixed_point_tol =
      detail::get_or(solver, "fixed_point_tol", "solver", c.fixed_point_tol, errors);
  if (!(c.T > 0.0) || !std::isfinite(c.T))
    errors.push_back("solver.T: the horizon must be positive and finite");
  if (c.n_steps < 1) errors.push_back("solver.n_steps: must be at least 1");
  if (c.mode_count < 0)
    errors.push_back("solver.mode_count: must be nonnegative (0 = all modes)");
  if (c.corrector_iterations < 1)
    errors.push_back("solver.corrector_iterations: must be at least 1");
  if (!(c.fixed_point_tol > 0.0))
    errors.push_back("solver.fixed_point_tol: must be positive");

  const int available = c.available_modes();
  if (available >= 1) {
    if (c.mode_count > available)
      errors.push_back("solver.mode_count: exceeds the " + std::to_string(available) +
                       " available modes");
    if (c.init_kind == InitialKind::Mode && c.init_mode > available)
      errors.push_back("problem.initial.mode: exceeds the " +
                       std::to_string(available) + " available modes");
  }

  if (root["checks"]) {
    const YAML::Node checks = root["checks"];
    if (!checks.IsSequence() && !checks.IsNull()) {
      errors.push_back("checks: expected a sequence of check identifiers");
    } else if (checks.IsSequence()) {
      const auto known = known_checks();
      for (const auto& entry : checks) {
        std::string id;
        try {
          id = entry.as<std::string>();
        } catch (const YAML::Exception&) {
          errors.push_back("checks: entries must be strings");
          continue;
        }
        if (std::find(known.begin(), known.end(), id) == known.end()) {
          errors.push_back("checks: unknown check id '" + id + "'");
          continue;
        }
        c.checks.push_back(id);
      }
    }
  }
  const bool unforced = !c.source_active() && !c.memory_active();
  for (const auto& id : c.checks) {
    if ((id == "gronwall" || id == "decay" || id == "linear_oracle") && !unforced)
      errors.push_back("checks: '" + id + "' requires a zero source and inactive memory");
    if (id == "linear_oracle" && c.law_kind != LawKind::Constant)
      errors.push_back("checks: 'linear_oracle' requires a constant Kirchhoff law");
    if (id == "regularity" && !spectral)
      errors.push_back("checks: 'regularity' requires the spectral operator");
  }

  if (root["output"]) {
    const YAML::Node out = root["output"];
    detail::check_keys(out, "output", {"directory", "formats"}, errors);
    c.out_dir = detail::get_or<std::string>(out, "directory", "output", c.out_dir, errors);
    if (c.out_dir.empty()) errors.push_back("output.directory: must not be empty");
    if (out["formats"]) {
      const YAML::Node fm = out["formats"];
      if (!fm.IsSequence()) {
        errors.push_back("output.formats: expected a sequence drawn from tsv | json");
      } else {
        c.write_tables = false;
        c.write_report = false;
        for (const auto& entry : fm) {
          const std::string f = entry.as<std::string>("");
          if (f == "tsv")
            c.write_tables = true;
          else if (f == "json")
            c.write_report = true;
          else
            errors.push_back("output.formats: '" + f + "' is not one of tsv | json");
        }
      }
    }
  }

  if (!errors.empty()) throw config_error(std::move(errors));
  if (c.mode_count == 0) c.mode_count = available;
  return c;
}

inline ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error({"cannot open config file " + path.string()});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// fully resolved echo; kind-irrelevant keys are omitted so the echo re-parses
inline YAML::Node config_to_yaml(const ExperimentConfig& c) {
  YAML::Node problem;
  YAML::Node dom;
  dom.push_back(c.domain_a);
  dom.push_back(c.domain_b);
  dom.SetStyle(YAML::EmitterStyle::Flow);
  problem["domain"] = dom;
  problem["alpha"] = c.alpha;
  problem["s"] = c.s;
  const bool spectral = c.op_mode == OperatorMode::SpectralSine;
  problem["operator"] = spectral ? "spectral" : "fem";
  if (spectral)
    problem["modes"] = c.modes;
  else
    problem["elements"] = c.elements;

  YAML::Node law;
  law["kind"] = c.law_kind == LawKind::Constant   ? "constant"
                : c.law_kind == LawKind::Affine   ? "affine"
                                                  : "saturating";
  law["m0"] = c.m0;
  if (c.law_kind != LawKind::Constant) law["c"] = c.law_c;
  problem["kirchhoff"] = law;

  YAML::Node mem;
  mem["beta"] = c.beta;
  mem["kernel"] = c.kernel == KernelKind::None ? "none" : "exponential";
  if (c.kernel == KernelKind::Exponential) {
    mem["scale"] = c.kernel_scale;
    mem["rate"] = c.kernel_rate;
  }
  if (c.mixed_memory_order()) mem["s_memory"] = c.s_memory;
  problem["memory"] = mem;

  YAML::Node src;
  src["kind"] = c.source_kind == SourceKind::Zero       ? "zero"
                : c.source_kind == SourceKind::Constant ? "constant"
                                                        : "sine";
  if (c.source_kind != SourceKind::Zero) {
    src["amplitude"] = c.amplitude;
    if (c.source_kind == SourceKind::Sine) src["mode"] = c.source_mode;
    src["decay"] = c.decay;
  }
  problem["source"] = src;

  YAML::Node init;
  init["kind"] = c.init_kind == InitialKind::Zero   ? "zero"
                 : c.init_kind == InitialKind::Mode ? "mode"
                                                    : "parabola";
  if (c.init_kind == InitialKind::Mode) init["mode"] = c.init_mode;
  if (c.init_kind != InitialKind::Zero) init["amplitude"] = c.init_amplitude;
  problem["initial"] = init;

  YAML::Node solver;
  solver["T"] = c.T;
  solver["n_steps"] = c.n_steps;
  solver["mode_count"] = c.mode_count;
  solver["corrector_iterations"] = c.corrector_iterations;
  solver["fixed_point_tol"] = c.fixed_point_tol;

  YAML::Node out;
  out["directory"] = c.out_dir;
  YAML::Node formats;
  if (c.write_tables) formats.push_back("tsv");
  if (c.write_report) formats.push_back("json");
  formats.SetStyle(YAML::EmitterStyle::Flow);
  out["formats"] = formats;

  YAML::Node root;
  root["problem"] = problem;
  root["solver"] = solver;
  YAML::Node checks(YAML::NodeType::Sequence);
  for (const auto& id : c.checks) checks.push_back(id);
  checks.SetStyle(YAML::EmitterStyle::Flow);
  root["checks"] = checks;
  root["output"] = out;
  return root;
}

inline std::string manifest_text(const ExperimentConfig& c) {
  YAML::Node root;
  root["version"] = version_string;
  root["config"] = config_to_yaml(c);
  std::ostringstream out;
  out << root << "\n";
  return out.str();
}

inline ProblemData make_problem(const ExperimentConfig& c) {
  const Domain1D dom(c.domain_a, c.domain_b);
  OperatorAssembly op = c.op_mode == OperatorMode::SpectralSine
                            ? build_spectral(dom, c.s, c.modes)
                            : assemble_fem_integral(dom, c.s, c.elements);

  KirchhoffLaw law = c.law_kind == LawKind::Constant ? KirchhoffLaw::constant(c.m0)
                     : c.law_kind == LawKind::Affine
                         ? KirchhoffLaw::affine(c.m0, c.law_c)
                         : KirchhoffLaw::saturating(c.m0, c.law_c);

  MemorySpec mem = MemorySpec::none();
  if (c.kernel == KernelKind::Exponential) {
    const double scale = c.kernel_scale;
    const double rate = c.kernel_rate;
    mem = MemorySpec::make_separable(
        c.beta,
        [scale, rate](double t, double tau) { return scale * std::exp(-rate * (t - tau)); },
        [](double) { return 1.0; });
  } else {
    mem.beta = c.beta;
  }
  if (c.mixed_memory_order()) mem.s_memory = c.s_memory;

  SourceTerm source = SourceTerm::zero();
  if (c.source_kind != SourceKind::Zero) {
    const double amp = c.amplitude;
    const double rate = c.decay;
    auto g = [amp, rate](double t) { return amp * std::exp(-rate * t); };
    if (c.source_kind == SourceKind::Constant) {
      source = SourceTerm::separable(g, [](double) { return 1.0; });
    } else {
      const double a = c.domain_a;
      const double len = dom.length();
      const int k = c.source_mode;
      source = SourceTerm::separable(
          g, [a, len, k](double x) { return std::sin(k * M_PI * (x - a) / len); });
    }
  }

  ModalVector u0;
  u0.coefficients = Eigen::VectorXd::Zero(op.modes());
  if (c.init_kind == InitialKind::Mode) {
    u0.coefficients(c.init_mode - 1) = c.init_amplitude;
  } else if (c.init_kind == InitialKind::Parabola) {
    const double a = c.domain_a;
    const double len = dom.length();
    const double amp = c.init_amplitude;
    u0 = project(
        [a, len, amp](double x) {
          const double xi = (x - a) / len;
          return amp * xi * (1.0 - xi);
        },
        op);
  }

  return ProblemData(FractionalOrders(c.alpha, c.s), std::move(op), std::move(law),
                     std::move(mem), std::move(source), std::move(u0), c.T);
}

inline SolverConfig make_solver_config(const ExperimentConfig& c) {
  return SolverConfig(UniformTimeGrid(c.T, c.n_steps), c.mode_count,
                      c.corrector_iterations, c.fixed_point_tol);
}

}  // namespace kfrac
