// Copyright 2026 The smartspin Authors
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


// Umbrella header for the simulation library (the CLI layer lives under
// smartspin/cli/ and is included separately).

#pragma once

#include "smartspin/analysis/fits.hpp"
#include "smartspin/benchmarking/clifford.hpp"
#include "smartspin/benchmarking/rb.hpp"
#include "smartspin/engine/evolve.hpp"
#include "smartspin/engine/lab_frame.hpp"
#include "smartspin/engine/noise.hpp"
#include "smartspin/engine/shots.hpp"
#include "smartspin/errors.hpp"
#include "smartspin/experiments/calibration.hpp"
#include "smartspin/experiments/experiments.hpp"
#include "smartspin/experiments/sweep.hpp"
#include "smartspin/numerics/bessel.hpp"
#include "smartspin/numerics/expm.hpp"
#include "smartspin/numerics/linalg.hpp"
#include "smartspin/numerics/nlls.hpp"
#include "smartspin/numerics/su2.hpp"
#include "smartspin/physics/constants.hpp"
#include "smartspin/physics/hamiltonian.hpp"
#include "smartspin/version.hpp"
#include "smartspin/waveform/modulated.hpp"
#include "smartspin/waveform/pulse.hpp"
#include "smartspin/waveform/sample.hpp"
