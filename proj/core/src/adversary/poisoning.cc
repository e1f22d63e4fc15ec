// Copyright 2026 The vflsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "vflsim/adversary/poisoning.h"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace vflsim {
namespace {

double Objective(const RealMatrix& embeddings, const RealMatrix& anchors) {
  double total = 0.0;
  for (std::size_t j = 0; j < embeddings.rows(); ++j) {
    auto e = embeddings.row(j);
    auto a = anchors.row(j % anchors.rows());
    for (std::size_t k = 0; k < e.size(); ++k) {
      const double d = e[k] - a[k];
      total += d * d;
    }
  }
  return total / static_cast<double>(embeddings.rows());
}

void ProjectRows(RealMatrix& delta, double epsilon) {
  for (std::size_t j = 0; j < delta.rows(); ++j) {
    auto d = delta.row(j);
    const double norm = std::sqrt(SquaredNorm(d));
    if (norm > epsilon) {
      const double scale = norm > 0.0 ? epsilon / norm : 0.0;
      for (double& v : d) v *= scale;
    }
  }
}

RealMatrix Add(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix out = a;
  auto o = out.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bv[i];
  return out;
}

}  // namespace

double MeanPairwiseDistance(const RealMatrix& a, const RealMatrix& b) {
  if (a.rows() == 0 || b.rows() == 0) {
    throw std::invalid_argument("MeanPairwiseDistance: empty group");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto x = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto y = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
      }
      total += std::sqrt(s);
    }
  }
  return total / static_cast<double>(a.rows() * b.rows());
}

ClassPair SelectClasses(SelectionStrategy strategy, const RealMatrix& embeddings,
                        const LabelEstimates& estimates, std::mt19937_64& rng) {
  if (estimates.labels.size() != embeddings.rows()) {
    throw std::invalid_argument("SelectClasses: estimates and rows differ");
  }
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < estimates.labels.size(); ++i) {
    if (estimates.labels[i] != kUnrecognized) {
      members[estimates.labels[i]].push_back(i);
    }
  }
  if (members.size() < 2) {
    throw std::invalid_argument(
        "SelectClasses: fewer than 2 estimated classes have members");
  }
  std::vector<int> classes;
  for (const auto& [c, ids] : members) classes.push_back(c);

  if (strategy == SelectionStrategy::kRandom) {
    std::uniform_int_distribution<std::size_t> pick(0, classes.size() - 1);
    const std::size_t s = pick(rng);
    std::size_t t = pick(rng);
    while (t == s) t = pick(rng);
    return {classes[s], classes[t]};
  }

  std::map<int, RealMatrix> groups;
  for (const auto& [c, ids] : members) groups[c] = embeddings.GatherRows(ids);
  ClassPair best{};
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      const double d =
          MeanPairwiseDistance(groups[classes[a]], groups[classes[b]]);
      if (d < best_distance) {
        best_distance = d;
        best = {classes[a], classes[b]};
      }
    }
  }
  return best;
}

ClassPair SelectClasses(SelectionStrategy strategy, const DenseNet& bottom,
                        const RealMatrix& rows, const LabelEstimates& estimates,
                        std::mt19937_64& rng) {
  return SelectClasses(strategy, Forward(bottom, rows).output(), estimates, rng);
}

PoisonResult OptimizePoison(const DenseNet& bottom,
                            const RealMatrix& triggered_sources,
                            const RealMatrix& targets,
                            const PoisonOptions& options) {
  if (!(options.epsilon >= 0.0)) {
    throw std::invalid_argument("OptimizePoison: epsilon must be >= 0");
  }
  if (triggered_sources.rows() == 0 || targets.rows() == 0) {
    throw std::invalid_argument("OptimizePoison: empty source or target set");
  }
  if (triggered_sources.cols() != targets.cols()) {
    throw std::invalid_argument("OptimizePoison: source/target width mismatch");
  }
  const RealMatrix anchors = Forward(bottom, triggered_sources).output();
  const std::size_t p = targets.rows();
  RealMatrix delta(p, targets.cols());

  Activations acts = Forward(bottom, targets);
  double current = Objective(acts.output(), anchors);
  if (!std::isfinite(current)) {
    throw std::runtime_error("OptimizePoison: non-finite objective at start");
  }
  PoisonResult result;
  result.objective.push_back(current);
  if (options.epsilon == 0.0) {
    result.perturbed = targets;
    return result;
  }

  double lr = options.learning_rate;
  for (std::size_t step = 0; step < options.steps; ++step) {
    RealMatrix grad_out(p, anchors.cols());
    const RealMatrix& e = acts.output();
    const double scale = 2.0 / static_cast<double>(p);
    for (std::size_t j = 0; j < p; ++j) {
      auto a = anchors.row(j % anchors.rows());
      for (std::size_t k = 0; k < a.size(); ++k) {
        grad_out(j, k) = scale * (e(j, k) - a[k]);
      }
    }
    const RealMatrix grad = Backward(bottom, acts, grad_out).input_grad;

    bool accepted = false;
    for (std::size_t h = 0; h <= options.max_halvings; ++h, lr *= 0.5) {
      RealMatrix trial = delta;
      auto t = trial.values();
      auto g = grad.values();
      for (std::size_t i = 0; i < t.size(); ++i) t[i] -= lr * g[i];
      ProjectRows(trial, options.epsilon);
      Activations trial_acts = Forward(bottom, Add(targets, trial));
      const double value = Objective(trial_acts.output(), anchors);
      if (!std::isfinite(value)) {
        throw std::runtime_error("OptimizePoison: non-finite objective at step " +
                                 std::to_string(step));
      }
      if (value < current) {
        delta = std::move(trial);
        acts = std::move(trial_acts);
        current = value;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    result.objective.push_back(current);
    // Let the step size recover after a halving.
    lr = std::min(options.learning_rate, lr * 2.0);
  }
  result.perturbed = Add(targets, delta);
  return result;
}

}  // namespace vflsim
