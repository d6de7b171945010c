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

#include "rfix/realize.hpp"

#include <Eigen/LU>

namespace rfix {

StateSpace realize_canonical(const Polynomial& num, const Polynomial& den) {
  if (!den.is_monic()) throw std::invalid_argument("realize_canonical: denominator must be monic");
  if (num.degree() > den.degree())
    throw std::invalid_argument("realize_canonical: numerator degree exceeds denominator");
  const int k = den.degree();
  if (k < 1) throw std::invalid_argument("realize_canonical: denominator must have degree >= 1");

  StateSpace ss;
  ss.k = k;
  ss.A = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i + 1 < k; ++i) ss.A(i, i + 1) = 1.0;
  for (int j = 0; j < k; ++j) ss.A(k - 1, j) = -den.coeffs[static_cast<size_t>(k - j)];
  ss.B = Eigen::VectorXd::Zero(k);
  ss.B(k - 1) = 1.0;

  // pad numerator to length k+1, highest degree first
  Eigen::VectorXd nv = Eigen::VectorXd::Zero(k + 1);
  const int off = k - num.degree();
  for (int i = 0; i <= num.degree(); ++i) nv(off + i) = num.coeffs[static_cast<size_t>(i)];
  ss.D = (num.degree() == k) ? num.leading() : 0.0;
  // remainder nv - D*den, degree <= k-1; C[j] = coefficient of s^j
  ss.C = Eigen::RowVectorXd::Zero(k);
  for (int j = 0; j < k; ++j)
    ss.C(j) = nv(k - j) - ss.D * den.coeffs[static_cast<size_t>(k - j)];
  return ss;
}

std::complex<double> eval_at(const StateSpace& ss, std::complex<double> s) {
  Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(ss.k, ss.k) - ss.A;
  Eigen::VectorXcd sol = M.partialPivLu().solve(ss.B.cast<std::complex<double>>());
  return (ss.C.cast<std::complex<double>>() * sol)(0) + ss.D;
}

std::complex<double> freq_response(const StateSpace& ss,
                                   const std::optional<Eigen::RowVectorXd>& delta_row,
                                   double omega) {
  if (!std::isfinite(omega) || omega < 0.0)
    throw std::invalid_argument("freq_response: omega must be finite and >= 0");
  const std::complex<double> jw(0.0, omega);
  Eigen::MatrixXcd M = jw * Eigen::MatrixXcd::Identity(ss.k, ss.k) - ss.A;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
  // strictly Hurwitz denominators keep jwI - A nonsingular; flag anything else
  if (std::abs(lu.determinant()) < 1e-300)
    throw std::runtime_error("freq_response: singular resolvent");
  Eigen::VectorXcd sol = lu.solve(ss.B.cast<std::complex<double>>());
  Eigen::RowVectorXcd c = ss.C.cast<std::complex<double>>();
  if (delta_row) c += delta_row->cast<std::complex<double>>();
  return (c * sol)(0) + ss.D;
}

namespace {

Eigen::RowVectorXd reversed(const Eigen::RowVectorXd& r) {
  return r.reverse();
}

}  // namespace

Eigen::RowVectorXd ConstructedSystems::pert_s(const std::vector<double>& delta_a,
                                              const std::vector<double>& delta_b) const {
  return pert_p(delta_a) + pert_q(delta_b);
}

Eigen::RowVectorXd ConstructedSystems::pert_p(const std::vector<double>& delta_a) const {
  const int n = plant.n;
  if (delta_a.size() != static_cast<size_t>(n))
    throw std::invalid_argument("pert_p: delta length mismatch");
  Eigen::RowVectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = plant.a_d[static_cast<size_t>(i)] * delta_a[static_cast<size_t>(i)];
  return reversed(w * X);
}

Eigen::RowVectorXd ConstructedSystems::pert_q(const std::vector<double>& delta_b) const {
  const int n = plant.n;
  if (delta_b.size() != static_cast<size_t>(n))
    throw std::invalid_argument("pert_q: delta length mismatch");
  Eigen::RowVectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = plant.b_d[static_cast<size_t>(i)] * delta_b[static_cast<size_t>(i)];
  return reversed(w * Y);
}

ConstructedSystems build_constructed_systems(const IntervalPlant& plant,
                                             const Controller& ctrl,
                                             const Polynomial& dc) {
  plant.validate();
  ctrl.validate();
  if (dc.degree() != plant.n + ctrl.m)
    throw std::invalid_argument("build_constructed_systems: deg(dc) must equal m+n");
  if (!is_strictly_hurwitz(dc))
    throw std::invalid_argument("build_constructed_systems: dc must be strictly Hurwitz");

  ConstructedSystems sys{.gs = {}, .gp = {}, .gq = {},
                         .X = toeplitz_band(ctrl.x, plant.n),
                         .Y = toeplitz_band(ctrl.y, plant.n),
                         .plant = plant, .ctrl = ctrl, .dc = dc,
                         .k = plant.n + ctrl.m};
  const Polynomial ac(plant.a_c), bc(plant.b_c), px(ctrl.x), py(ctrl.y);
  const Polynomial np = convolve(ac, px);
  const Polynomial nq = convolve(bc, py);
  const Polynomial ns = add(np, nq);
  sys.gs = realize_canonical(ns, dc);
  sys.gp = realize_canonical(np, dc);
  sys.gq = realize_canonical(nq, dc);
  return sys;
}

}  // namespace rfix
