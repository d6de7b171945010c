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

#ifndef RFIX_POLY_HPP
#define RFIX_POLY_HPP

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace rfix {

/// Real polynomial, coefficients stored highest degree first.
/// The zero polynomial is the single coefficient [0].
struct Polynomial {
  std::vector<double> coeffs;

  Polynomial() : coeffs{0.0} {}
  explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {
    if (coeffs.empty()) throw std::invalid_argument("Polynomial: empty coefficient list");
  }

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double leading() const { return coeffs.front(); }
  bool is_monic() const { return coeffs.front() == 1.0; }

  std::complex<double> eval(std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (double c : coeffs) acc = acc * s + c;
    return acc;
  }
};

/// Cauchy product of two coefficient sequences.
Polynomial convolve(const Polynomial& p, const Polynomial& q);

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial scale(const Polynomial& p, double alpha);

/// Banded Toeplitz operator: row i carries v starting at column i.
/// Result is rows x (rows + len(v) - 1).
Eigen::MatrixXd toeplitz_band(const std::vector<double>& v, int rows);

/// Strict Hurwitz test: Routh array cross-checked against companion-matrix
/// eigenvalues. Roots within tau_hurwitz of the imaginary axis fail.
bool is_strictly_hurwitz(const Polynomial& p);

constexpr double kTauHurwitz = 1e-9;
constexpr double kRouthZeroPivot = 1e-12;

/// Roots via companion-matrix eigenvalues (leading coefficient must be nonzero).
std::vector<std::complex<double>> poly_roots(const Polynomial& p);

/// SISO plant with interval coefficient uncertainty, kept as medians and
/// deviations: a_i = a_i^c + a_i^d * delta_ai, delta in [-1,1].
struct IntervalPlant {
  std::vector<double> a_c;  // [1, a1^c, ..., an^c]
  std::vector<double> b_c;  // [0, b1^c, ..., bn^c]
  std::vector<double> a_d;  // [a1^d, ..., an^d]
  std::vector<double> b_d;  // [b1^d, ..., bn^d]
  int n = 0;

  /// Build from per-coefficient [lower, upper] bounds.
  static IntervalPlant from_bounds(const std::vector<std::pair<double, double>>& a_bounds,
                                   const std::vector<std::pair<double, double>>& b_bounds);

  void validate() const;

  /// Denominator polynomial at a specific interval sample delta_a (n values in [-1,1]).
  Polynomial a_at(const std::vector<double>& delta_a) const;
  /// Numerator polynomial at delta_b.
  Polynomial b_at(const std::vector<double>& delta_b) const;
};

/// Fixed-order controller K(s) = y(s)/x(s) with monic x. Pins hold selected
/// coefficients at fixed values during synthesis (e.g. x_m = 0).
struct Controller {
  std::vector<double> x;  // [1, x1, ..., xm]
  std::vector<double> y;  // [y0, ..., ym]
  int m = 0;
  // Pin slots: x1..xm then y0..ym (2m+1 entries); x0 is always 1.
  std::vector<std::optional<double>> fixed_mask;

  static Controller make(int m);

  void validate() const;

  int pin_slots() const { return 2 * m + 1; }
  void pin_x(int i, double v);  // i in [1, m]
  void pin_y(int i, double v);  // i in [0, m]
};

}  // namespace rfix

#endif  // RFIX_POLY_HPP
