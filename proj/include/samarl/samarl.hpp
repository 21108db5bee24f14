// Copyright 2026 The samarl Authors
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

#ifndef SAMARL_SAMARL_HPP
#define SAMARL_SAMARL_HPP

#include "samarl/allocation.hpp"
#include "samarl/baselines.hpp"
#include "samarl/errors.hpp"
#include "samarl/exp3.hpp"
#include "samarl/harness/config.hpp"
#include "samarl/harness/evaluate.hpp"
#include "samarl/harness/metrics.hpp"
#include "samarl/harness/scenario.hpp"
#include "samarl/harness/train.hpp"
#include "samarl/netmodel.hpp"
#include "samarl/neural/adam.hpp"
#include "samarl/neural/agent_space.hpp"
#include "samarl/neural/checkpoint.hpp"
#include "samarl/neural/ddqn.hpp"
#include "samarl/neural/mlp.hpp"
#include "samarl/neural/replay.hpp"
#include "samarl/neural/reward.hpp"
#include "samarl/oracle.hpp"
#include "samarl/random.hpp"

#endif  // SAMARL_SAMARL_HPP
