/*
 * Copyright (c) 2026, the symdetect authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "symdetect/bench.hpp"
#include "symdetect/config.hpp"
#include "symdetect/convergence.hpp"
#include "symdetect/core.hpp"
#include "symdetect/detect.hpp"
#include "symdetect/distance_matrix.hpp"
#include "symdetect/graph.hpp"
#include "symdetect/grow.hpp"
#include "symdetect/hdbscan.hpp"
#include "symdetect/icp.hpp"
#include "symdetect/mesh_io.hpp"
#include "symdetect/patches.hpp"
#include "symdetect/random.hpp"
#include "symdetect/sampling.hpp"
#include "symdetect/shape.hpp"
#include "symdetect/spatial_index.hpp"
