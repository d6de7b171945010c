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

#include "rfix/synth.hpp"

#include <cmath>

namespace rfix {

double db_to_linear(double db) { return std::pow(10.0, db / 20.0); }
double linear_to_db(double lin) { return 20.0 * std::log10(lin); }

void SynthesisSpec::validate() const {
  plant.validate();
  pins.validate();
  if (pins.m != m) throw std::invalid_argument("SynthesisSpec: pin template order mismatch");
  if (dc.degree() != m + plant.n)
    throw std::invalid_argument("SynthesisSpec: deg(dc) must equal m+n");
  if (!is_strictly_hurwitz(dc))
    throw std::invalid_argument("SynthesisSpec: dc must be strictly Hurwitz");
  if (sensitivity && sensitivity->rho <= 0.0)
    throw std::invalid_argument("SynthesisSpec: rho_s must be positive");
  if (comp_sensitivity && comp_sensitivity->rho <= 0.0)
    throw std::invalid_argument("SynthesisSpec: rho_t must be positive");
}

AssembledProblem assemble_problem(const SynthesisSpec& spec, const Controller& ctrl,
                                  bool ctrl_free, bool with_stability, bool with_s,
                                  bool with_t) {
  AssembledProblem ap;
  ap.ctrl_vars = ctrl_free ? CtrlVars::declare(ctrl, ap.sdp.vars) : CtrlVars::pinned(ctrl);
  const LmiContext ctx = make_lmi_context(spec.plant, spec.dc, ap.ctrl_vars);

  if (with_stability)
    ap.sdp.lmis.push_back(assemble_stability_lmi(ctx, ap.sdp.vars));
  if (with_s) {
    if (!spec.sensitivity) throw std::invalid_argument("assemble_problem: no S spec given");
    auto [p, m2] = assemble_sensitivity_lmis(ctx, ap.sdp.vars, spec.sensitivity->rho,
                                             spec.sensitivity->range);
    ap.sdp.lmis.push_back(std::move(p));
    ap.sdp.lmis.push_back(std::move(m2));
  }
  if (with_t) {
    if (!spec.comp_sensitivity) throw std::invalid_argument("assemble_problem: no T spec given");
    auto [p, m2] = assemble_comp_sensitivity_lmis(ctx, ap.sdp.vars, spec.comp_sensitivity->rho,
                                                  spec.comp_sensitivity->range);
    ap.sdp.lmis.push_back(std::move(p));
    ap.sdp.lmis.push_back(std::move(m2));
  }
  return ap;
}

namespace {

SynthesisResult run(const SynthesisSpec& spec, const Controller& ctrl, bool ctrl_free) {
  spec.validate();
  const bool want_s = spec.sensitivity.has_value();
  const bool want_t = spec.comp_sensitivity.has_value();

  AssembledProblem ap = assemble_problem(spec, ctrl, ctrl_free, true, want_s, want_t);
  SynthesisResult res;
  res.outcome = solve(ap.sdp);
  if (res.outcome.status == SdpStatus::Feasible) {
    res.controller = ap.ctrl_vars.extract(ctrl, res.outcome.assignment);
    res.controller.validate();
    res.lmi_reports = verify_certificate(ap.sdp, res.outcome.assignment);
    return res;
  }
  res.controller = ctrl;
  if (res.outcome.status == SdpStatus::NumericalFailure) return res;

  // triage: stability alone, then stability+S, then stability+T
  auto subset_status = [&](bool s, bool t) {
    AssembledProblem sub = assemble_problem(spec, ctrl, ctrl_free, true, s, t);
    return solve(sub.sdp).status;
  };
  if (subset_status(false, false) != SdpStatus::Feasible)
    res.infeasible_subset = "stability";
  else if (want_s && subset_status(true, false) != SdpStatus::Feasible)
    res.infeasible_subset = "stability+S";
  else if (want_t && subset_status(false, true) != SdpStatus::Feasible)
    res.infeasible_subset = "stability+T";
  else
    res.infeasible_subset = "joint";
  return res;
}

}  // namespace

SynthesisResult synthesize(const SynthesisSpec& spec) {
  return run(spec, spec.pins, /*ctrl_free=*/true);
}

SynthesisResult check_controller(const SynthesisSpec& spec, const Controller& ctrl) {
  ctrl.validate();
  if (ctrl.m != spec.m)
    throw std::invalid_argument("check_controller: controller order mismatch");
  return run(spec, ctrl, /*ctrl_free=*/false);
}

Polynomial dc_from_baseline(const IntervalPlant& plant, const Controller& baseline) {
  baseline.validate();
  const Polynomial ac(plant.a_c), bc(plant.b_c);
  const Polynomial cl = add(convolve(ac, Polynomial(baseline.x)),
                            convolve(bc, Polynomial(baseline.y)));
  if (!is_strictly_hurwitz(cl))
    throw std::invalid_argument("dc_from_baseline: baseline closed loop is not strictly Hurwitz");
  return cl;
}

}  // namespace rfix
