// Copyright 2026 The nvdfq Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include "nvdfq/constants.hpp"
#include "nvdfq/dynamics.hpp"
#include "nvdfq/geometry.hpp"
#include "nvdfq/grape.hpp"
#include "nvdfq/io.hpp"
#include "nvdfq/linalg.hpp"
#include "nvdfq/logical.hpp"
#include "nvdfq/protocols.hpp"
#include "nvdfq/scheduler.hpp"
#include "nvdfq/spin_core.hpp"
