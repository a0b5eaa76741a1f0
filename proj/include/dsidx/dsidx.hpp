// Copyright 2026-present the dsidx authors
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

#pragma once

// Umbrella header.

#include "dsidx/error.hpp"

#include "dsidx/core/breakpoints.hpp"
#include "dsidx/core/dataset.hpp"
#include "dsidx/core/distance.hpp"
#include "dsidx/core/isax.hpp"
#include "dsidx/core/lower_bound.hpp"
#include "dsidx/core/normalize.hpp"
#include "dsidx/core/paa.hpp"
#include "dsidx/core/params.hpp"

#include "dsidx/index/buffers.hpp"
#include "dsidx/index/build.hpp"
#include "dsidx/index/flatten.hpp"
#include "dsidx/index/node.hpp"
#include "dsidx/index/tree.hpp"

#include "dsidx/engines/approximate.hpp"
#include "dsidx/engines/batched.hpp"
#include "dsidx/engines/brute_force.hpp"
#include "dsidx/engines/bsf.hpp"
#include "dsidx/engines/flatscan.hpp"
#include "dsidx/engines/tree_search.hpp"

#include "dsidx/io/dsix.hpp"
#include "dsidx/io/index_file.hpp"
#include "dsidx/io/random_walk.hpp"
#include "dsidx/io/stream_build.hpp"

#include "dsidx/distsim/cost_model.hpp"
#include "dsidx/distsim/measured.hpp"
#include "dsidx/distsim/partition.hpp"
#include "dsidx/distsim/report.hpp"
#include "dsidx/distsim/scenario.hpp"
#include "dsidx/distsim/schedule.hpp"
#include "dsidx/distsim/simulator.hpp"

#include "dsidx/util/hash.hpp"
