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

#ifndef VFLSIM_COMMON_RANDOM_H_
#define VFLSIM_COMMON_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace vflsim {

// Independent generator per (seed, stream) so that consumers never perturb
// each other's random sequences.
std::mt19937_64 MakeStream(std::uint64_t seed, std::string_view stream);

}  // namespace vflsim

#endif  // VFLSIM_COMMON_RANDOM_H_
