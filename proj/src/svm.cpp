// Copyright 2026 The Metakernel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "metakernel/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include "metakernel/error.hpp"
#include "metakernel/io.hpp"
#include "metakernel/random.hpp"

namespace metakernel {
namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_up(int y, double a, double c) { return (y > 0 && a < c) || (y < 0 && a > 0.0); }
bool in_low(int y, double a, double c) { return (y > 0 && a > 0.0) || (y < 0 && a < c); }

std::vector<double> axis(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = 0.5 * (lo + hi);
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

std::vector<int> binary_labels(std::span<const int> labels, int positive) {
  std::vector<int> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == positive ? 1 : -1;
  return y;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw InputError("train: C must be positive and finite");
  if (!(tolerance > 0.0)) throw InputError("train: tolerance must be positive");
  if (max_passes < 1) throw InputError("train: max_passes must be >= 1");
}

BinarySolution train_binary(const Eigen::MatrixXd& K, std::span<const int> labels, const TrainConfig& config) {
  config.validate();
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (K.rows() != n || K.cols() != n) throw InputError("train_binary: Gram size does not match label count");
  if (n < 2) throw InputError("train_binary: need at least two samples");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else throw InputError("train_binary: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw InputError("train_binary: both classes must be present");
  if (!K.allFinite()) throw NumericalError("train_binary: non-finite Gram entries");

  const double c = config.c;
  const double eps = config.tolerance;
  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
  std::vector<double> grad(static_cast<std::size_t>(n), -1.0);
  auto y = [&](Eigen::Index t) { return static_cast<double>(labels[static_cast<std::size_t>(t)]); };
  auto a = [&](Eigen::Index t) -> double& { return alpha[static_cast<std::size_t>(t)]; };
  auto g = [&](Eigen::Index t) -> double& { return grad[static_cast<std::size_t>(t)]; };

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(config.seed);
  rng.shuffle(std::span<Eigen::Index>(order));

  BinarySolution out;
  for (out.iterations = 0; out.iterations < config.max_passes; ++out.iterations) {
    // i: maximal -y G over the "up" set.
    double up_max = -kInf;
    Eigen::Index i = -1;
    for (Eigen::Index t : order) {
      if (!in_up(labels[static_cast<std::size_t>(t)], a(t), c)) continue;
      const double v = -y(t) * g(t);
      if (v > up_max) {
        up_max = v;
        i = t;
      }
    }
    // j: best second-order gain among "low" violators; also track min -y G.
    double low_min = kInf;
    double best_gain = kInf;
    Eigen::Index j = -1;
    for (Eigen::Index t : order) {
      if (!in_low(labels[static_cast<std::size_t>(t)], a(t), c)) continue;
      const double v = -y(t) * g(t);
      low_min = std::min(low_min, v);
      if (i < 0) continue;
      const double b = up_max - v;
      if (b > 0.0) {
        double quad = K(i, i) + K(t, t) - 2.0 * K(i, t);
        if (quad <= 0.0) quad = kTau;
        const double gain = -(b * b) / quad;
        if (gain < best_gain) {
          best_gain = gain;
          j = t;
        }
      }
    }
    if (i < 0 || j < 0 || up_max - low_min < eps) {
      out.converged = true;
      break;
    }

    const double old_ai = a(i);
    const double old_aj = a(j);
    double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
    if (quad <= 0.0) quad = kTau;
    if (labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)]) {
      const double delta = (-g(i) - g(j)) / quad;
      const double diff = old_ai - old_aj;
      a(i) += delta;
      a(j) += delta;
      if (diff > 0.0) {
        if (a(j) < 0.0) {
          a(j) = 0.0;
          a(i) = diff;
        }
      } else if (a(i) < 0.0) {
        a(i) = 0.0;
        a(j) = -diff;
      }
      if (diff > 0.0) {
        if (a(i) > c) {
          a(i) = c;
          a(j) = c - diff;
        }
      } else if (a(j) > c) {
        a(j) = c;
        a(i) = c + diff;
      }
    } else {
      const double delta = (g(i) - g(j)) / quad;
      const double sum = old_ai + old_aj;
      a(i) -= delta;
      a(j) += delta;
      if (sum > c) {
        if (a(i) > c) {
          a(i) = c;
          a(j) = sum - c;
        }
      } else if (a(j) < 0.0) {
        a(j) = 0.0;
        a(i) = sum;
      }
      if (sum > c) {
        if (a(j) > c) {
          a(j) = c;
          a(i) = sum - c;
        }
      } else if (a(i) < 0.0) {
        a(i) = 0.0;
        a(j) = sum;
      }
    }

    const double step_i = y(i) * (a(i) - old_ai);
    const double step_j = y(j) * (a(j) - old_aj);
    const auto col_i = K.col(i);
    const auto col_j = K.col(j);
    for (Eigen::Index t = 0; t < n; ++t) g(t) += y(t) * (col_i(t) * step_i + col_j(t) * step_j);
  }

  // Bias: mean of -y G over free vectors, else the midpoint of the feasible interval.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double upper = kInf, lower = -kInf;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * g(t);
    if (a(t) >= c) {
      if (y(t) < 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (a(t) <= 0.0) {
      if (y(t) > 0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (upper + lower);
  out.bias = -rho;
  out.alpha = std::move(alpha);
  out.dual_objective = dual_objective(K, labels, out.alpha);
  return out;
}

BinarySolution train_binary(const GramMatrix& gram, std::span<const int> labels, const TrainConfig& config) {
  return train_binary(gram.real_entries, labels, config);
}

double dual_objective(const Eigen::MatrixXd& K, std::span<const int> labels, std::span<const double> alpha) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  Eigen::VectorXd v(n);
  double linear = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = alpha[static_cast<std::size_t>(i)] * labels[static_cast<std::size_t>(i)];
    linear += alpha[static_cast<std::size_t>(i)];
  }
  return linear - 0.5 * v.dot(K * v);
}

KktReport verify_kkt(const Eigen::MatrixXd& K, std::span<const int> labels, std::span<const double> alpha,
                     double bias, double c, double tolerance) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  KktReport report;
  report.box_feasible = true;
  const double bound_slack = 1e-12 * c;
  Eigen::VectorXd v(n);
  double equality = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ai = alpha[static_cast<std::size_t>(i)];
    if (ai < -bound_slack || ai > c + bound_slack) report.box_feasible = false;
    v(i) = ai * labels[static_cast<std::size_t>(i)];
    equality += v(i);
  }
  report.equality_residual = std::abs(equality);
  const Eigen::VectorXd f = K * v + Eigen::VectorXd::Constant(n, bias);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ai = alpha[static_cast<std::size_t>(i)];
    const double margin = labels[static_cast<std::size_t>(i)] * f(i);
    double violation = 0.0;
    if (ai <= bound_slack) {
      violation = std::max(0.0, 1.0 - margin);
    } else if (ai >= c - bound_slack) {
      violation = std::max(0.0, margin - 1.0);
    } else {
      violation = std::abs(margin - 1.0);
    }
    if (violation > report.max_violation) {
      report.max_violation = violation;
      report.worst_index = i;
    }
  }
  report.ok = report.box_feasible && report.equality_residual <= 1e-8 * std::max(1.0, c) &&
              report.max_violation <= tolerance;
  return report;
}

std::size_t SvmModel::dimension() const {
  if (machines.empty()) throw InputError("model has no machines");
  return static_cast<std::size_t>(machines.front().support_vectors.cols());
}

std::vector<double> SvmModel::machine_values(std::span<const double> scaled_x) const {
  const Kernel kern(kernel_params);
  std::vector<double> out;
  out.reserve(machines.size());
  for (const auto& m : machines) {
    double f = m.bias;
    for (Eigen::Index i = 0; i < m.support_vectors.rows(); ++i) {
      f += m.dual_coefs[static_cast<std::size_t>(i)] * kern.real(row_span(m.support_vectors, i), scaled_x);
    }
    out.push_back(f);
  }
  return out;
}

std::vector<double> SvmModel::decision_values(std::span<const double> x) const {
  if (x.size() != dimension()) {
    throw InputError("predict: input has " + std::to_string(x.size()) + " features, model expects " +
                     std::to_string(dimension()));
  }
  std::vector<double> scaled;
  if (scaler) scaled = scaler->transform(x);
  const auto values = machine_values(scaler ? std::span<const double>(scaled) : x);
  if (classes.size() == 2) return {values[0], -values[0]};
  return values;
}

int SvmModel::predict(std::span<const double> x) const {
  const auto values = decision_values(x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < values.size(); ++c) {
    if (values[c] > values[best]) best = c;
  }
  return classes[best];
}

std::vector<int> SvmModel::predict(const RowMatrix& xs) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(xs.rows()));
  for (Eigen::Index i = 0; i < xs.rows(); ++i) out.push_back(predict(row_span(xs, i)));
  return out;
}

std::vector<std::size_t> canonical_order(const RowMatrix& xs, std::span<const int> labels) {
  std::vector<std::size_t> order(static_cast<std::size_t>(xs.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    const auto lr = row_span(xs, static_cast<Eigen::Index>(l));
    const auto rr = row_span(xs, static_cast<Eigen::Index>(r));
    if (std::lexicographical_compare(lr.begin(), lr.end(), rr.begin(), rr.end())) return true;
    if (std::lexicographical_compare(rr.begin(), rr.end(), lr.begin(), lr.end())) return false;
    return labels[l] < labels[r];
  });
  return order;
}

OvrSolution train_ovr(const Eigen::MatrixXd& gram, std::span<const int> labels, const TrainConfig& config,
                      unsigned threads) {
  OvrSolution out;
  {
    const std::set<int> unique(labels.begin(), labels.end());
    out.classes.assign(unique.begin(), unique.end());
  }
  if (out.classes.size() < 2) throw InputError("train: need at least two classes");
  const std::size_t problems = out.classes.size() == 2 ? 1 : out.classes.size();
  out.machines.resize(problems);

  auto solve = [&](std::size_t p) {
    const auto y = binary_labels(labels, out.classes[p]);
    out.machines[p] = train_binary(gram, y, config);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(problems)));
  if (threads == 1) {
    for (std::size_t p = 0; p < problems; ++p) solve(p);
  } else {
    std::vector<std::exception_ptr> failures(threads);
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          for (std::size_t p = t; p < problems; p += threads) solve(p);
        } catch (...) {
          failures[t] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }
  return out;
}

Eigen::MatrixXd ovr_decisions(const OvrSolution& solution, const Eigen::MatrixXd& cross,
                              std::span<const int> train_labels) {
  if (static_cast<std::size_t>(cross.cols()) != train_labels.size()) {
    throw InputError("ovr_decisions: cross kernel width does not match the training set");
  }
  Eigen::MatrixXd out(cross.rows(), static_cast<Eigen::Index>(solution.classes.size()));
  for (std::size_t p = 0; p < solution.machines.size(); ++p) {
    const auto& m = solution.machines[p];
    Eigen::VectorXd coef(cross.cols());
    for (Eigen::Index i = 0; i < cross.cols(); ++i) {
      const int y = train_labels[static_cast<std::size_t>(i)] == solution.classes[p] ? 1 : -1;
      coef(i) = m.alpha[static_cast<std::size_t>(i)] * y;
    }
    out.col(static_cast<Eigen::Index>(p)) = (cross * coef).array() + m.bias;
  }
  if (solution.classes.size() == 2) out.col(1) = -out.col(0);
  return out;
}

std::vector<int> argmax_labels(const Eigen::MatrixXd& decisions, std::span<const int> classes) {
  std::vector<int> out(static_cast<std::size_t>(decisions.rows()));
  for (Eigen::Index i = 0; i < decisions.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < decisions.cols(); ++c) {
      if (decisions(i, c) > decisions(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = classes[static_cast<std::size_t>(best)];
  }
  return out;
}

SvmModel train_multiclass(const RowMatrix& xs, std::span<const int> labels, const KernelParams& params,
                          const TrainConfig& config, unsigned threads) {
  if (static_cast<std::size_t>(xs.rows()) != labels.size()) throw InputError("train: feature/label count mismatch");
  const auto order = canonical_order(xs, labels);
  RowMatrix sorted(xs.rows(), xs.cols());
  std::vector<int> sorted_labels(labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.row(static_cast<Eigen::Index>(i)) = xs.row(static_cast<Eigen::Index>(order[i]));
    sorted_labels[i] = labels[order[i]];
  }
  const GramMatrix g = gram(sorted, params, threads);
  const OvrSolution solution = train_ovr(g.real_entries, sorted_labels, config, threads);

  SvmModel model;
  model.kernel_params = params;
  model.c = config.c;
  model.classes = solution.classes;
  for (std::size_t p = 0; p < solution.machines.size(); ++p) {
    const auto& sol = solution.machines[p];
    BinaryMachine machine;
    machine.bias = sol.bias;
    std::vector<Eigen::Index> support;
    for (std::size_t i = 0; i < sol.alpha.size(); ++i) {
      if (sol.alpha[i] > 0.0) support.push_back(static_cast<Eigen::Index>(i));
    }
    if (support.empty()) throw NumericalError("train: solver returned an empty support set");
    machine.support_vectors.resize(static_cast<Eigen::Index>(support.size()), xs.cols());
    for (std::size_t s = 0; s < support.size(); ++s) {
      machine.support_vectors.row(static_cast<Eigen::Index>(s)) = sorted.row(support[s]);
      const int y = sorted_labels[static_cast<std::size_t>(support[s])] == solution.classes[p] ? 1 : -1;
      machine.dual_coefs.push_back(sol.alpha[static_cast<std::size_t>(support[s])] * y);
    }
    model.machines.push_back(std::move(machine));
  }
  return model;
}

DecisionGrid decision_grid(const SvmModel& model, const std::array<double, 4>& bounds,
                           std::pair<std::size_t, std::size_t> resolution) {
  if (model.dimension() != 2) throw InputError("decision_grid: model must have exactly 2 features");
  auto [nx, ny] = resolution;
  if (nx < 1 || ny < 1) throw InputError("decision_grid: resolution must be >= 1 per axis");
  DecisionGrid grid;
  grid.nx = nx;
  grid.ny = ny;
  grid.x_values = axis(bounds[0], bounds[1], nx);
  grid.y_values = axis(bounds[2], bounds[3], ny);
  grid.values.reserve(nx * ny);
  grid.labels.reserve(nx * ny);
  for (double yv : grid.y_values) {
    for (double xv : grid.x_values) {
      const std::array<double, 2> point{xv, yv};
      const auto values = model.decision_values(point);
      std::size_t best = 0;
      for (std::size_t c = 1; c < values.size(); ++c) {
        if (values[c] > values[best]) best = c;
      }
      grid.values.push_back(model.classes.size() == 2 ? values[0] : values[best]);
      grid.labels.push_back(model.classes[best]);
    }
  }
  return grid;
}

void write_decision_grid_csv(std::ostream& out, const DecisionGrid& grid) {
  out << "row,col,x,y,decision,label\n";
  for (std::size_t r = 0; r < grid.ny; ++r) {
    for (std::size_t c = 0; c < grid.nx; ++c) {
      const std::size_t idx = r * grid.nx + c;
      out << r << ',' << c << ',' << format_double(grid.x_values[c]) << ',' << format_double(grid.y_values[r]) << ','
          << format_double(grid.values[idx]) << ',' << grid.labels[idx] << '\n';
    }
  }
}

}  // namespace metakernel
