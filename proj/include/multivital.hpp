// SPDX-License-Identifier: Apache-2.0
//
// multivital: FMCW MIMO radar simulation and multi-point vital-sign extraction
// Copyright (C) 2026 The multivital authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MULTIVITAL_HPP
#define MULTIVITAL_HPP

#include "multivital/common.hpp"
#include "multivital/fft.hpp"
#include "multivital/radar_config.hpp"
#include "multivital/simulator.hpp"
#include "multivital/range_processing.hpp"
#include "multivital/doa.hpp"
#include "multivital/vitals.hpp"
#include "multivital/scg.hpp"
#include "multivital/metrics.hpp"
#include "multivital/io.hpp"
#include "multivital/pipeline.hpp"

#endif
