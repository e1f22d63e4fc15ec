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

#ifndef VFLSIM_ADVERSARY_POISONING_H_
#define VFLSIM_ADVERSARY_POISONING_H_

#include <cstddef>
#include <random>
#include <vector>

#include "vflsim/adversary/label_inference.h"
#include "vflsim/nn/dense_net.h"
#include "vflsim/nn/matrix.h"

namespace vflsim {

enum class SelectionStrategy { kRandom, kOptimal };

struct ClassPair {
  int source = 0;
  int target = 0;
  friend bool operator==(const ClassPair&, const ClassPair&) = default;
};

// Mean L2 distance over all cross pairs of rows.
double MeanPairwiseDistance(const RealMatrix& a, const RealMatrix& b);

// Picks the (source, target) pair among estimated classes with at least one
// member. kRandom draws a uniform ordered pair of distinct classes; kOptimal
// takes the unordered pair with the smallest mean pairwise embedding distance
// and makes the lower class id the source.
ClassPair SelectClasses(SelectionStrategy strategy, const RealMatrix& embeddings,
                        const LabelEstimates& estimates, std::mt19937_64& rng);
ClassPair SelectClasses(SelectionStrategy strategy, const DenseNet& bottom,
                        const RealMatrix& rows, const LabelEstimates& estimates,
                        std::mt19937_64& rng);

struct PoisonOptions {
  double epsilon = 0.0;  // L2 bound per perturbation
  std::size_t steps = 50;
  double learning_rate = 0.5;
  std::size_t max_halvings = 20;
};

struct PoisonResult {
  RealMatrix perturbed;              // targets + delta
  std::vector<double> objective;     // accepted values, objective[0] at delta = 0
};

// Projected gradient descent on per-row noise delta_j for the target rows,
// minimising mean_j ||bottom(target_j + delta_j) - bottom(source_{j mod S})||^2
// subject to ||delta_j||_2 <= epsilon. A step is accepted only if it lowers
// the objective; otherwise the step size is halved.
PoisonResult OptimizePoison(const DenseNet& bottom,
                            const RealMatrix& triggered_sources,
                            const RealMatrix& targets,
                            const PoisonOptions& options);

}  // namespace vflsim

#endif  // VFLSIM_ADVERSARY_POISONING_H_
