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

#ifndef RFIX_SYNTH_HPP
#define RFIX_SYNTH_HPP

#include <optional>
#include <string>

#include "rfix/lmi.hpp"
#include "rfix/sdp.hpp"

namespace rfix {

/// One sensitivity-shaping bound: |H(jw)| < rho on the range.
struct PerfSpec {
  double rho = 1.0;  // linear scale
  FrequencyRange range;
};

struct SynthesisSpec {
  IntervalPlant plant;
  int m = 1;                                // controller order
  Polynomial dc;
  std::optional<PerfSpec> sensitivity;       // |S| bound
  std::optional<PerfSpec> comp_sensitivity;  // |T| bound
  Controller pins;                           // order + fixed coefficients

  void validate() const;
};

struct SynthesisResult {
  Controller controller;
  SdpOutcome outcome;
  std::vector<LmiEigReport> lmi_reports;
  /// On infeasibility: which LMI subset already fails ("stability",
  /// "stability+S", "stability+T", or "joint").
  std::string infeasible_subset;
};

/// One-shot joint solve with controller coefficients as SDP variables
/// (subject to pins). On infeasibility, re-solves nested subsets to name the
/// smallest failing one.
SynthesisResult synthesize(const SynthesisSpec& spec);

/// Audit a fully pinned controller: solves only for certificate variables.
SynthesisResult check_controller(const SynthesisSpec& spec, const Controller& ctrl);

/// Build the assembled problem without solving (debug/export path).
/// Subset flags gate which LMIs are included.
struct AssembledProblem {
  SdpProblem sdp;
  CtrlVars ctrl_vars;
};
AssembledProblem assemble_problem(const SynthesisSpec& spec, const Controller& ctrl,
                                  bool ctrl_free, bool with_stability, bool with_s,
                                  bool with_t);

/// d_c helper: nominal closed-loop characteristic polynomial of a baseline
/// controller (must come out strictly Hurwitz).
Polynomial dc_from_baseline(const IntervalPlant& plant, const Controller& baseline);

double db_to_linear(double db);
double linear_to_db(double lin);

}  // namespace rfix

#endif  // RFIX_SYNTH_HPP
