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

#ifndef RFIX_REALIZE_HPP
#define RFIX_REALIZE_HPP

#include <complex>
#include <optional>

#include <Eigen/Core>

#include "rfix/poly.hpp"

namespace rfix {

/// Controllable-canonical realization, bottom-row companion orientation:
/// the last row of A carries the negated denominator coefficients in
/// ascending-power order, B = [0 ... 0 1]^T, state j corresponds to s^j.
struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;
  int k = 0;
};

/// Realize num/den in controllable canonical form. den must be monic and
/// deg(num) <= deg(den). D is the leading numerator coefficient when the
/// degrees match; C absorbs num - D*den.
StateSpace realize_canonical(const Polynomial& num, const Polynomial& den);

/// (C + delta_row)(j*omega*I - A)^{-1} B + D via linear solve.
std::complex<double> freq_response(const StateSpace& ss,
                                   const std::optional<Eigen::RowVectorXd>& delta_row,
                                   double omega);

/// Transfer-function value at an arbitrary complex point.
std::complex<double> eval_at(const StateSpace& ss, std::complex<double> s);

/// The three constructed systems sharing denominator d_c, plus the Toeplitz
/// operators X and Y. gs/gp/gq share A and B; output-row perturbations for
/// sampled interval variables are produced on demand.
struct ConstructedSystems {
  StateSpace gs, gp, gq;
  Eigen::MatrixXd X, Y;  // n x (n+m), rows are shifted controller coefficients
  IntervalPlant plant;
  Controller ctrl;
  Polynomial dc;
  int k = 0;

  /// Output-row perturbation a_d*Da*X + b_d*Db*Y, reordered to the ascending
  /// state convention of StateSpace (adds to gs.C).
  Eigen::RowVectorXd pert_s(const std::vector<double>& delta_a,
                            const std::vector<double>& delta_b) const;
  /// a_d*Da*X reordered (adds to gp.C).
  Eigen::RowVectorXd pert_p(const std::vector<double>& delta_a) const;
  /// b_d*Db*Y reordered (adds to gq.C).
  Eigen::RowVectorXd pert_q(const std::vector<double>& delta_b) const;
};

ConstructedSystems build_constructed_systems(const IntervalPlant& plant,
                                             const Controller& ctrl,
                                             const Polynomial& dc);

}  // namespace rfix

#endif  // RFIX_REALIZE_HPP
