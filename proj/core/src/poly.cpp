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

#include "rfix/poly.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace rfix {

Polynomial convolve(const Polynomial& p, const Polynomial& q) {
  const auto& a = p.coeffs;
  const auto& b = q.coeffs;
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return Polynomial(std::move(out));
}

Polynomial add(const Polynomial& p, const Polynomial& q) {
  const auto& a = p.coeffs;
  const auto& b = q.coeffs;
  std::vector<double> out(std::max(a.size(), b.size()), 0.0);
  // align constant terms (lowest degree last)
  for (size_t i = 0; i < a.size(); ++i) out[out.size() - a.size() + i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) out[out.size() - b.size() + i] += b[i];
  return Polynomial(std::move(out));
}

Polynomial scale(const Polynomial& p, double alpha) {
  std::vector<double> out = p.coeffs;
  for (double& c : out) c *= alpha;
  return Polynomial(std::move(out));
}

Eigen::MatrixXd toeplitz_band(const std::vector<double>& v, int rows) {
  if (rows < 1) throw std::invalid_argument("toeplitz_band: rows must be >= 1");
  if (v.empty()) throw std::invalid_argument("toeplitz_band: empty vector");
  const int cols = rows + static_cast<int>(v.size()) - 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (size_t j = 0; j < v.size(); ++j) M(i, i + static_cast<int>(j)) = v[j];
  return M;
}

std::vector<std::complex<double>> poly_roots(const Polynomial& p) {
  if (p.leading() == 0.0)
    throw std::invalid_argument("poly_roots: zero leading coefficient");
  const int d = p.degree();
  if (d == 0) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) comp(i, i + 1) = 1.0;
  for (int j = 0; j < d; ++j)
    comp(d - 1, j) = -p.coeffs[static_cast<size_t>(d - j)] / p.leading();
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> roots(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) roots[static_cast<size_t>(i)] = es.eigenvalues()(i);
  return roots;
}

namespace {

// Routh array verdict: all first-column entries strictly positive.
// A zero pivot makes the polynomial not strictly Hurwitz.
bool routh_strict(const std::vector<double>& monic) {
  const int d = static_cast<int>(monic.size()) - 1;
  if (d == 0) return true;
  const int cols = d / 2 + 1;
  std::vector<std::vector<double>> table(static_cast<size_t>(d + 1),
                                         std::vector<double>(static_cast<size_t>(cols), 0.0));
  for (int j = 0; 2 * j <= d; ++j) table[0][static_cast<size_t>(j)] = monic[static_cast<size_t>(2 * j)];
  for (int j = 0; 2 * j + 1 <= d; ++j) table[1][static_cast<size_t>(j)] = monic[static_cast<size_t>(2 * j + 1)];
  for (int i = 2; i <= d; ++i) {
    const double pivot = table[static_cast<size_t>(i - 1)][0];
    if (std::abs(pivot) < kRouthZeroPivot) return false;
    for (int j = 0; j + 1 < cols; ++j)
      table[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          table[static_cast<size_t>(i - 1)][0] * table[static_cast<size_t>(i - 2)][static_cast<size_t>(j + 1)] -
          table[static_cast<size_t>(i - 2)][0] * table[static_cast<size_t>(i - 1)][static_cast<size_t>(j + 1)];
    for (int j = 0; j < cols; ++j) table[static_cast<size_t>(i)][static_cast<size_t>(j)] /= pivot;
  }
  for (int i = 0; i <= d; ++i)
    if (table[static_cast<size_t>(i)][0] <= kRouthZeroPivot) return false;
  return true;
}

}  // namespace

bool is_strictly_hurwitz(const Polynomial& p) {
  if (p.leading() == 0.0)
    throw std::invalid_argument("is_strictly_hurwitz: zero leading coefficient");
  if (p.leading() < 0.0)
    throw std::invalid_argument("is_strictly_hurwitz: leading coefficient must be positive");
  // normalize to monic before thresholding
  std::vector<double> monic = p.coeffs;
  for (double& c : monic) c /= p.coeffs.front();
  if (p.degree() == 0) return true;

  const bool routh_ok = routh_strict(monic);
  bool eig_ok = true;
  for (const auto& r : poly_roots(p))
    if (r.real() >= -kTauHurwitz) eig_ok = false;
  return routh_ok && eig_ok;
}

IntervalPlant IntervalPlant::from_bounds(const std::vector<std::pair<double, double>>& a_bounds,
                                         const std::vector<std::pair<double, double>>& b_bounds) {
  if (a_bounds.size() != b_bounds.size() || a_bounds.empty())
    throw std::invalid_argument("IntervalPlant: a and b need matching nonzero order");
  IntervalPlant p;
  p.n = static_cast<int>(a_bounds.size());
  p.a_c = {1.0};
  p.b_c = {0.0};
  for (auto [l, u] : a_bounds) {
    if (l > u) throw std::invalid_argument("IntervalPlant: misordered a bound");
    p.a_c.push_back((l + u) / 2.0);
    p.a_d.push_back((u - l) / 2.0);
  }
  for (auto [l, u] : b_bounds) {
    if (l > u) throw std::invalid_argument("IntervalPlant: misordered b bound");
    p.b_c.push_back((l + u) / 2.0);
    p.b_d.push_back((u - l) / 2.0);
  }
  p.validate();
  return p;
}

void IntervalPlant::validate() const {
  if (n < 1) throw std::invalid_argument("IntervalPlant: order must be >= 1");
  if (a_c.size() != static_cast<size_t>(n + 1) || b_c.size() != static_cast<size_t>(n + 1) ||
      a_d.size() != static_cast<size_t>(n) || b_d.size() != static_cast<size_t>(n))
    throw std::invalid_argument("IntervalPlant: inconsistent coefficient lengths");
  if (a_c[0] != 1.0) throw std::invalid_argument("IntervalPlant: a_c must lead with 1");
  if (b_c[0] != 0.0) throw std::invalid_argument("IntervalPlant: b_c must lead with 0");
  for (double d : a_d)
    if (d < 0.0) throw std::invalid_argument("IntervalPlant: negative deviation");
  for (double d : b_d)
    if (d < 0.0) throw std::invalid_argument("IntervalPlant: negative deviation");
}

Polynomial IntervalPlant::a_at(const std::vector<double>& delta_a) const {
  if (delta_a.size() != static_cast<size_t>(n))
    throw std::invalid_argument("IntervalPlant: delta length mismatch");
  std::vector<double> c = a_c;
  for (int i = 0; i < n; ++i) c[static_cast<size_t>(i + 1)] += a_d[static_cast<size_t>(i)] * delta_a[static_cast<size_t>(i)];
  return Polynomial(std::move(c));
}

Polynomial IntervalPlant::b_at(const std::vector<double>& delta_b) const {
  if (delta_b.size() != static_cast<size_t>(n))
    throw std::invalid_argument("IntervalPlant: delta length mismatch");
  std::vector<double> c = b_c;
  for (int i = 0; i < n; ++i) c[static_cast<size_t>(i + 1)] += b_d[static_cast<size_t>(i)] * delta_b[static_cast<size_t>(i)];
  return Polynomial(std::move(c));
}

Controller Controller::make(int m) {
  if (m < 1) throw std::invalid_argument("Controller: order must be >= 1");
  Controller c;
  c.m = m;
  c.x.assign(static_cast<size_t>(m + 1), 0.0);
  c.x[0] = 1.0;
  c.y.assign(static_cast<size_t>(m + 1), 0.0);
  c.fixed_mask.assign(static_cast<size_t>(2 * m + 1), std::nullopt);
  return c;
}

void Controller::validate() const {
  if (x.size() != static_cast<size_t>(m + 1) || y.size() != static_cast<size_t>(m + 1))
    throw std::invalid_argument("Controller: coefficient length mismatch");
  if (x[0] != 1.0) throw std::invalid_argument("Controller: x must be monic");
  if (fixed_mask.size() != static_cast<size_t>(2 * m + 1))
    throw std::invalid_argument("Controller: bad pin mask length");
  for (int i = 1; i <= m; ++i)
    if (fixed_mask[static_cast<size_t>(i - 1)] && x[static_cast<size_t>(i)] != *fixed_mask[static_cast<size_t>(i - 1)])
      throw std::invalid_argument("Controller: pinned x coefficient violated");
  for (int i = 0; i <= m; ++i)
    if (fixed_mask[static_cast<size_t>(m + i)] && y[static_cast<size_t>(i)] != *fixed_mask[static_cast<size_t>(m + i)])
      throw std::invalid_argument("Controller: pinned y coefficient violated");
}

void Controller::pin_x(int i, double v) {
  if (i < 1 || i > m) throw std::invalid_argument("Controller: pin_x index out of range");
  fixed_mask[static_cast<size_t>(i - 1)] = v;
  x[static_cast<size_t>(i)] = v;
}

void Controller::pin_y(int i, double v) {
  if (i < 0 || i > m) throw std::invalid_argument("Controller: pin_y index out of range");
  fixed_mask[static_cast<size_t>(m + i)] = v;
  y[static_cast<size_t>(i)] = v;
}

}  // namespace rfix
