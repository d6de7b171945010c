/*
   Copyright 2026 The rfix authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef RFIX_PROBLEM_IO_HPP
#define RFIX_PROBLEM_IO_HPP

#include <cstdint>
#include <string>

#include "rfix/synth.hpp"
#include "rfix/verify.hpp"

namespace rfix {

/// Parsed problem file plus verification settings.
struct ProblemFile {
  SynthesisSpec spec;
  int verify_samples = kDefaultRandomSamples;
  std::uint64_t seed = kDefaultSeed;
  int grid_points = kDefaultGridPoints;
  // Original dB bounds, kept for reporting (spec holds linear rho).
  double s_bound_db = 0.0, t_bound_db = 0.0;
  // Sweep-grid band edges as given in the file (the LMI range uses the
  // kind-appropriate cutoff).
  double s_band_lo = 0.0, s_band_hi = 0.0;
  double t_band_lo = 0.0, t_band_hi = 0.0;
};

/// Throws std::runtime_error with a schema message on malformed input.
ProblemFile load_problem(const std::string& path);

Controller load_controller(const std::string& path, int expected_order);
void save_controller(const std::string& path, const Controller& ctrl);

}  // namespace rfix

#endif  // RFIX_PROBLEM_IO_HPP
