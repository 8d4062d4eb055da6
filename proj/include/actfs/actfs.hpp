// Copyright 2026 The actfs Authors
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

#ifndef ACTFS_ACTFS_HPP_
#define ACTFS_ACTFS_HPP_

#include "actfs/afs.hpp"
#include "actfs/baselines.hpp"
#include "actfs/config.hpp"
#include "actfs/confbounds.hpp"
#include "actfs/dataset.hpp"
#include "actfs/harness.hpp"
#include "actfs/random.hpp"
#include "actfs/single_feature.hpp"
#include "actfs/stats.hpp"

#endif  // ACTFS_ACTFS_HPP_
