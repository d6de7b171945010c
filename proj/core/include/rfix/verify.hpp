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

#ifndef RFIX_VERIFY_HPP
#define RFIX_VERIFY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rfix/poly.hpp"
#include "rfix/realize.hpp"

namespace rfix {

constexpr std::uint64_t kDefaultSeed = 42;
constexpr int kDefaultRandomSamples = 1000;
constexpr int kDefaultGridPoints = 400;

/// One point of the interval-uncertainty box.
struct UncertaintySample {
  std::vector<double> delta_a;  // n entries in [-1,1]
  std::vector<double> delta_b;
  std::string provenance;  // "vertex" or "random(seed)"
};

/// All 2^(2n) vertices followed by `random_count` seeded interior samples.
std::vector<UncertaintySample> make_samples(int n, int random_count, std::uint64_t seed);

enum class SweepKind { Sensitivity, CompSensitivity };

struct SweepReport {
  std::vector<double> grid;        // rad/s, strictly inside the band
  std::vector<double> env_min_db;  // per grid point over samples
  std::vector<double> env_max_db;
  double worst_margin_db = 0.0;    // min over grid/samples of bound_db - mag_db
  bool pass = false;
  bool all_samples_stable = true;
  int failing_sample = -1;         // first unstable sample, if any
};

/// Characteristic polynomial a(delta)*x + b(delta)*y strictly Hurwitz
/// (eigenvalue check).
bool closed_loop_stable(const IntervalPlant& plant, const Controller& ctrl,
                        const UncertaintySample& sample);

/// |S| or |T| magnitudes computed as |G_p/G_s| (resp. |G_q/G_s|) with the
/// sampled interval rows added to the output matrices; grid is log-spaced
/// strictly inside (omega_lo, omega_hi).
SweepReport sweep_sensitivity(const IntervalPlant& plant, const Controller& ctrl,
                              const std::vector<UncertaintySample>& samples,
                              double omega_lo, double omega_hi, double bound_db,
                              SweepKind kind, const Polynomial& dc,
                              int grid_points = kDefaultGridPoints);

/// Pointwise agreement of |N/D| < gamma with Re((D - N/gamma)/(D + N/gamma)) > 0
/// on a log grid inside the band.
bool lemma2_transform_check(const Polynomial& N, const Polynomial& D, double gamma,
                            double omega_lo, double omega_hi,
                            int grid_points = kDefaultGridPoints);

struct StepResult {
  std::vector<double> t;
  std::vector<double> y;
  double dt = 0.0;
  double final_value = 0.0;
};

/// Unit-step response of the closed loop T(s) at a sampled plant, fixed-step
/// RK4 on the canonical realization. Refuses unstable samples.
StepResult step_response(const IntervalPlant& plant, const Controller& ctrl,
                         const UncertaintySample& sample, double t_end,
                         double dt_override = 0.0);

// CSV emitters (deterministic given inputs)
void write_bode_csv(std::ostream& os, const SweepReport& report);
void write_step_csv(std::ostream& os, const StepResult& result);
void write_stability_csv(std::ostream& os, const IntervalPlant& plant,
                         const Controller& ctrl,
                         const std::vector<UncertaintySample>& samples);

}  // namespace rfix

#endif  // RFIX_VERIFY_HPP
