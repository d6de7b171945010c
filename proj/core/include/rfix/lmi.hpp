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

#ifndef RFIX_LMI_HPP
#define RFIX_LMI_HPP

#include <complex>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rfix/poly.hpp"
#include "rfix/realize.hpp"

namespace rfix {

// ---------------------------------------------------------------------------
// Frequency range characterization (continuous time)
// ---------------------------------------------------------------------------

enum class RangeKind { Low, Middle, High };

/// (Phi, Psi) pair selecting a finite frequency range. Phi is fixed at
/// [[0,1],[1,0]]; Psi depends on the kind: low (0, omega_l), middle
/// (omega_l, omega_h), high (omega_h, inf).
struct FrequencyRange {
  RangeKind kind = RangeKind::Middle;
  double omega_l = 0.0;  // unused for High
  double omega_h = 0.0;  // unused for Low

  Eigen::Matrix2d phi() const;
  Eigen::Matrix2cd psi() const;
  bool is_complex() const { return kind == RangeKind::Middle; }
  /// Band edges for sweep grids: low -> (0, omega_l), high -> (omega_h, inf).
  std::pair<double, double> band() const;
};

FrequencyRange table1_psi(RangeKind kind, double omega_l, double omega_h);

/// Phi (x) P + Psi (x) Q for concrete Hermitian P, Q.
Eigen::MatrixXcd gkyp_xi(const FrequencyRange& range, const Eigen::MatrixXcd& P,
                         const Eigen::MatrixXcd& Q);

// ---------------------------------------------------------------------------
// Decision variables
// ---------------------------------------------------------------------------

/// Registry of scalar decision slots backing structured matrix variables.
/// Symmetric variables expand to d(d+1)/2 slots, Hermitian add d(d-1)/2
/// imaginary (skew) slots, diagonal-positive to d slots with a lower bound.
class VariableTable {
 public:
  enum class Kind { Scalar, Symmetric, Hermitian, DiagPositive };

  struct Var {
    std::string name;
    Kind kind;
    int dim;
    int offset;
    int count;
    double lower = 0.0;                  // DiagPositive entry lower bound
    std::optional<double> psd_lower;     // Symmetric/Hermitian: V >= psd_lower*I
  };

  int add_scalar(const std::string& name);
  int add_symmetric(const std::string& name, int dim,
                    std::optional<double> psd_lower = std::nullopt);
  int add_hermitian(const std::string& name, int dim,
                    std::optional<double> psd_lower = std::nullopt);
  int add_diag_positive(const std::string& name, int dim, double lower);

  int total() const { return total_; }
  const std::vector<Var>& vars() const { return vars_; }
  const Var& var(int index) const { return vars_.at(static_cast<size_t>(index)); }
  int find(const std::string& name) const;

  /// Basis matrix for a local slot of a matrix variable.
  Eigen::MatrixXcd basis(int var_index, int local) const;
  /// Reconstruct the matrix value of a variable from a full assignment.
  Eigen::MatrixXcd value_of(int var_index, const Eigen::VectorXd& theta) const;

 private:
  int add(Var v, int count);
  std::vector<Var> vars_;
  int total_ = 0;
};

// ---------------------------------------------------------------------------
// Affine LMIs
// ---------------------------------------------------------------------------

/// Symmetric/Hermitian matrix affine in scalar decision slots:
/// M(theta) = constant + sum_j theta_j * terms[j]. The strictness margin
/// turns "< 0" into "<= -margin*I" at the solver.
struct AffineLmi {
  std::string name;
  int size = 0;
  Eigen::MatrixXcd constant;
  std::map<int, Eigen::MatrixXcd> terms;
  double margin = 0.0;
  bool margin_coupled = true;

  static AffineLmi zero(const std::string& name, int size);

  void add_const(int row, int col, const Eigen::MatrixXcd& block);
  void add_term(int slot, int row, int col, const Eigen::MatrixXcd& block);

  Eigen::MatrixXcd evaluate(const Eigen::VectorXd& theta) const;
  bool is_real(double tol = 0.0) const;
  /// Set margin = 1e-7 * (1 + max abs constant entry).
  void finalize_margin();
  /// Plain-text listing: constant block then per-slot coefficient blocks.
  void dump(std::ostream& os, const VariableTable& vt) const;
};

/// [[Re, -Im], [Im, Re]] doubling; preserves definiteness and duplicates the
/// eigenvalue multiset. Input must be Hermitian.
Eigen::MatrixXd real_embed(const Eigen::MatrixXcd& H, double herm_tol = 1e-9);
AffineLmi real_embed(const AffineLmi& lmi);

// ---------------------------------------------------------------------------
// Controller coefficients as affine expressions
// ---------------------------------------------------------------------------

/// Each controller coefficient is either a pinned constant or a free scalar
/// slot; x0 is always the constant 1.
struct CtrlVars {
  struct Coef {
    double c0 = 0.0;
    int slot = -1;  // -1: constant
  };
  std::vector<Coef> x, y;
  int m = 0;

  /// All coefficients constant (audit mode).
  static CtrlVars pinned(const Controller& ctrl);
  /// Unpinned coefficients become scalar decision slots in vt.
  static CtrlVars declare(const Controller& pins, VariableTable& vt);

  /// Read coefficients back out of an assignment.
  Controller extract(const Controller& pins, const Eigen::VectorXd& theta) const;
};

/// Row vector affine in scalar slots (controller-coefficient dependence of
/// output rows and Toeplitz borders).
struct AffineRow {
  Eigen::RowVectorXd c;
  std::map<int, Eigen::RowVectorXd> lin;
};

struct AffineMat {
  Eigen::MatrixXd c;
  std::map<int, Eigen::MatrixXd> lin;
};

/// Shared data for assembling the five LMIs: companion (A, B) of d_c, the
/// affine output rows of the constructed systems (ascending state order) and
/// the column-reversed Toeplitz borders.
struct LmiContext {
  IntervalPlant plant;
  Polynomial dc;
  CtrlVars ctrl;
  int n = 0, m = 0, k = 0;
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  AffineRow Cs, Cp, Cq;
  double Ds = 1.0, Dp = 1.0, Dq = 0.0;
  AffineMat Xr, Yr;  // n x k
};

LmiContext make_lmi_context(const IntervalPlant& plant, const Polynomial& dc,
                            const CtrlVars& ctrl);

/// Robust stability LMI: positive-real closure of the common-denominator
/// system over the whole interval box. Declares P_s (symmetric k), R_sa,
/// R_sb (diagonal positive n) in vt.
AffineLmi assemble_stability_lmi(const LmiContext& ctx, VariableTable& vt);

/// Band-limited |S| cap as a plus/minus pair sharing one Lyapunov pair
/// (P_p, Q_p with Q_p > 0 registered as a bound on the variable). Complex
/// middle ranges are returned real-embedded.
std::pair<AffineLmi, AffineLmi> assemble_sensitivity_lmis(const LmiContext& ctx,
                                                          VariableTable& vt,
                                                          double rho_s,
                                                          const FrequencyRange& range);

/// Band-limited |T| cap; uncertainty weights of (a_d, X) and (b_d, Y) swap
/// roles relative to the |S| pair.
std::pair<AffineLmi, AffineLmi> assemble_comp_sensitivity_lmis(const LmiContext& ctx,
                                                               VariableTable& vt,
                                                               double rho_t,
                                                               const FrequencyRange& range);

constexpr double kEpsDiag = 1e-9;
constexpr double kEpsQ = 1e-9;

}  // namespace rfix

#endif  // RFIX_LMI_HPP
