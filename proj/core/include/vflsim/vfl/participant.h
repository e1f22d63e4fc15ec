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

#ifndef VFLSIM_VFL_PARTICIPANT_H_
#define VFLSIM_VFL_PARTICIPANT_H_

#include <functional>
#include <span>

#include "vflsim/nn/dense_net.h"
#include "vflsim/nn/matrix.h"
#include "vflsim/vfl/feature_shard.h"

namespace vflsim {

enum class Role { kHonest, kAdversary };

// A feature-hosting party. It holds its own shard and bottom model and
// nothing else: no labels, no other party's columns.
struct Participant {
  int id = 0;
  FeatureShard shard;
  DenseNet bottom;
  Role role = Role::kHonest;
};

// Lets an adversary-controlled participant replace its raw batch rows before
// its forward pass. Invoked only for participants with Role::kAdversary.
using PoisonHook = std::function<void(const Participant& self,
                                      std::span<const std::size_t> batch_ids,
                                      RealMatrix& rows)>;

}  // namespace vflsim

#endif  // VFLSIM_VFL_PARTICIPANT_H_
