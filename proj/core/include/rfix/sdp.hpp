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

#ifndef RFIX_SDP_HPP
#define RFIX_SDP_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "rfix/lmi.hpp"

namespace rfix {

/// Semidefinite feasibility problem: find theta with M_i(theta) <= -margin_i*I
/// for every LMI, maximizing the common strictness margin t (capped at t_max).
/// Variable-level bounds (diagonal lower bounds, Q >= eps*I) come from the
/// variable table.
struct SdpProblem {
  VariableTable vars;
  std::vector<AffineLmi> lmis;  // real symmetric (post-embedding)
  double t_max = 1.0;

  void validate() const;
};

enum class SdpStatus { Feasible, Infeasible, NumericalFailure };

struct SdpOutcome {
  SdpStatus status = SdpStatus::NumericalFailure;
  Eigen::VectorXd assignment;
  /// Extra margin beyond each LMI's built-in epsilon (solver objective value).
  double achieved_margin = 0.0;
  int iterations = 0;
  double runtime_s = 0.0;
  std::string message;
};

/// Interior-point solve. Feasible outcomes are re-verified by an eigenvalue
/// check outside the solver loop; a failing re-check downgrades the status to
/// NumericalFailure rather than returning an unverified "feasible".
SdpOutcome solve(const SdpProblem& problem);

struct LmiEigReport {
  std::string name;
  double max_eigenvalue;  // of the raw M_i(theta), no margin shift
  double margin;          // required epsilon for this LMI
  bool satisfied;         // max_eigenvalue <= -margin (+ tolerance)
};

/// Deterministic, solver-independent eigenvalue report for an assignment.
std::vector<LmiEigReport> verify_certificate(const SdpProblem& problem,
                                             const Eigen::VectorXd& assignment);

/// Plain-text sparse export: variable table followed by per-LMI triplets.
void export_text(const SdpProblem& problem, std::ostream& os);

}  // namespace rfix

#endif  // RFIX_SDP_HPP
