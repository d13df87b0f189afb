// Copyright 2026 The seabal Authors
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

#ifndef SEABAL_MODELGEN_HPP_
#define SEABAL_MODELGEN_HPP_

#include <cstdint>

#include "seabal/model.hpp"
#include "seabal/state.hpp"

namespace seabal {

// Seeded random kinematic trees and states for fuzz-style tests and the CLI
// validate path.  Deterministic per seed; never used by scenario physics.
RobotModel random_model(int joints, uint64_t seed, int contacts = 1);
SimState random_state(const RobotModel& model, uint64_t seed,
                      double velocity_scale = 1.0);

}  // namespace seabal

#endif  // SEABAL_MODELGEN_HPP_
