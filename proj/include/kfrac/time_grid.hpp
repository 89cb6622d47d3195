#pragma once

#include <kfrac/errors.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <functional>

namespace kfrac {

struct UniformTimeGrid {
  double T;
  int n_steps;
  double h;

  UniformTimeGrid(double final_time, int steps)
      : T(final_time), n_steps(steps), h(final_time / steps) {
    if (!(std::isfinite(final_time) && final_time > 0.0))
      throw std::domain_error("UniformTimeGrid: T must be positive and finite");
    if (steps < 1)
      throw std::domain_error("UniformTimeGrid: n_steps must be at least 1");
  }

  // t_n = n/N * T lands on T exactly at the last node
  double t(int n) const { return T * (static_cast<double>(n) / n_steps); }
  int size() const { return n_steps + 1; }
};

// Node samples of one or more scalar trajectories; row = mode, col = node.
struct SampledPath {
  UniformTimeGrid grid;
  Eigen::MatrixXd values;

  SampledPath(const UniformTimeGrid& g, int modes)
      : grid(g), values(Eigen::MatrixXd::Zero(modes, g.size())) {}

  SampledPath(const UniformTimeGrid& g, Eigen::MatrixXd v)
      : grid(g), values(std::move(v)) {
    if (values.cols() != grid.size())
      throw contract_violation("SampledPath: values length must be n_steps + 1");
  }

  static SampledPath sample(const UniformTimeGrid& g,
                            const std::function<double(double)>& fn) {
    SampledPath p(g, 1);
    for (int n = 0; n < g.size(); ++n) p.values(0, n) = fn(g.t(n));
    return p;
  }

  int modes() const { return static_cast<int>(values.rows()); }
};

}  // namespace kfrac
