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

#include "rfix/lmi.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <unsupported/Eigen/KroneckerProduct>

namespace rfix {

// ---------------------------------------------------------------------------
// Frequency ranges
// ---------------------------------------------------------------------------

Eigen::Matrix2d FrequencyRange::phi() const {
  Eigen::Matrix2d p;
  p << 0, 1, 1, 0;
  return p;
}

Eigen::Matrix2cd FrequencyRange::psi() const {
  using cplx = std::complex<double>;
  Eigen::Matrix2cd p = Eigen::Matrix2cd::Zero();
  switch (kind) {
    case RangeKind::Low:
      p(0, 0) = -1.0;
      p(1, 1) = omega_l * omega_l;
      break;
    case RangeKind::Middle: {
      const double wc = (omega_h + omega_l) / 2.0;
      p(0, 0) = -1.0;
      p(0, 1) = cplx(0.0, wc);
      p(1, 0) = cplx(0.0, -wc);
      p(1, 1) = -omega_l * omega_h;
      break;
    }
    case RangeKind::High:
      p(0, 0) = 1.0;
      p(1, 1) = -omega_h * omega_h;
      break;
  }
  return p;
}

std::pair<double, double> FrequencyRange::band() const {
  switch (kind) {
    case RangeKind::Low:
      return {0.0, omega_l};
    case RangeKind::Middle:
      return {omega_l, omega_h};
    case RangeKind::High:
      return {omega_h, std::numeric_limits<double>::infinity()};
  }
  return {0.0, 0.0};
}

FrequencyRange table1_psi(RangeKind kind, double omega_l, double omega_h) {
  FrequencyRange r{kind, omega_l, omega_h};
  switch (kind) {
    case RangeKind::Low:
      if (omega_l <= 0.0) throw std::invalid_argument("table1_psi: need omega_l > 0");
      break;
    case RangeKind::Middle:
      if (omega_l <= 0.0 || omega_h <= omega_l)
        throw std::invalid_argument("table1_psi: need 0 < omega_l < omega_h");
      break;
    case RangeKind::High:
      if (omega_h <= 0.0) throw std::invalid_argument("table1_psi: need omega_h > 0");
      break;
  }
  return r;
}

Eigen::MatrixXcd gkyp_xi(const FrequencyRange& range, const Eigen::MatrixXcd& P,
                         const Eigen::MatrixXcd& Q) {
  if (P.rows() != P.cols() || Q.rows() != Q.cols() || P.rows() != Q.rows())
    throw std::invalid_argument("gkyp_xi: P and Q must be square of equal size");
  Eigen::Matrix2cd phi_c = range.phi().cast<std::complex<double>>();
  return Eigen::kroneckerProduct(phi_c, P).eval() +
         Eigen::kroneckerProduct(range.psi(), Q).eval();
}

// ---------------------------------------------------------------------------
// Variable table
// ---------------------------------------------------------------------------

int VariableTable::add(Var v, int count) {
  v.offset = total_;
  v.count = count;
  total_ += count;
  vars_.push_back(std::move(v));
  return static_cast<int>(vars_.size()) - 1;
}

int VariableTable::add_scalar(const std::string& name) {
  return add(Var{name, Kind::Scalar, 1, 0, 0}, 1);
}

int VariableTable::add_symmetric(const std::string& name, int dim,
                                 std::optional<double> psd_lower) {
  Var v{name, Kind::Symmetric, dim, 0, 0};
  v.psd_lower = psd_lower;
  return add(std::move(v), dim * (dim + 1) / 2);
}

int VariableTable::add_hermitian(const std::string& name, int dim,
                                 std::optional<double> psd_lower) {
  Var v{name, Kind::Hermitian, dim, 0, 0};
  v.psd_lower = psd_lower;
  return add(std::move(v), dim * dim);  // dim(dim+1)/2 real + dim(dim-1)/2 imag
}

int VariableTable::add_diag_positive(const std::string& name, int dim, double lower) {
  Var v{name, Kind::DiagPositive, dim, 0, 0};
  v.lower = lower;
  return add(std::move(v), dim);
}

int VariableTable::find(const std::string& name) const {
  for (size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return static_cast<int>(i);
  throw std::invalid_argument("VariableTable: unknown variable " + name);
}

Eigen::MatrixXcd VariableTable::basis(int var_index, int local) const {
  const Var& v = var(var_index);
  if (local < 0 || local >= v.count) throw std::invalid_argument("VariableTable: bad local slot");
  const int d = v.dim;
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(d, d);
  switch (v.kind) {
    case Kind::Scalar:
      E(0, 0) = 1.0;
      break;
    case Kind::DiagPositive:
      E(local, local) = 1.0;
      break;
    case Kind::Symmetric:
    case Kind::Hermitian: {
      const int n_sym = d * (d + 1) / 2;
      if (local < n_sym) {
        // upper-triangular pair (i <= j), row-major over the triangle
        int l = local, i = 0;
        while (l >= d - i) { l -= d - i; ++i; }
        const int j = i + l;
        if (i == j) {
          E(i, i) = 1.0;
        } else {
          E(i, j) = 1.0;
          E(j, i) = 1.0;
        }
      } else {
        int l = local - n_sym, i = 0;
        while (l >= d - i - 1) { l -= d - i - 1; ++i; }
        const int j = i + 1 + l;
        E(i, j) = std::complex<double>(0.0, 1.0);
        E(j, i) = std::complex<double>(0.0, -1.0);
      }
      break;
    }
  }
  return E;
}

Eigen::MatrixXcd VariableTable::value_of(int var_index, const Eigen::VectorXd& theta) const {
  const Var& v = var(var_index);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(v.dim, v.dim);
  for (int l = 0; l < v.count; ++l) M += theta(v.offset + l) * basis(var_index, l);
  return M;
}

// ---------------------------------------------------------------------------
// AffineLmi
// ---------------------------------------------------------------------------

AffineLmi AffineLmi::zero(const std::string& name, int size) {
  AffineLmi l;
  l.name = name;
  l.size = size;
  l.constant = Eigen::MatrixXcd::Zero(size, size);
  return l;
}

void AffineLmi::add_const(int row, int col, const Eigen::MatrixXcd& block) {
  constant.block(row, col, block.rows(), block.cols()) += block;
}

void AffineLmi::add_term(int slot, int row, int col, const Eigen::MatrixXcd& block) {
  auto it = terms.find(slot);
  if (it == terms.end())
    it = terms.emplace(slot, Eigen::MatrixXcd::Zero(size, size)).first;
  it->second.block(row, col, block.rows(), block.cols()) += block;
}

Eigen::MatrixXcd AffineLmi::evaluate(const Eigen::VectorXd& theta) const {
  Eigen::MatrixXcd M = constant;
  for (const auto& [slot, G] : terms) M += theta(slot) * G;
  return M;
}

bool AffineLmi::is_real(double tol) const {
  if (constant.imag().cwiseAbs().maxCoeff() > tol) return false;
  for (const auto& [slot, G] : terms)
    if (G.imag().cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

void AffineLmi::finalize_margin() {
  margin = 1e-7 * (1.0 + constant.cwiseAbs().maxCoeff());
}

void AffineLmi::dump(std::ostream& os, const VariableTable& vt) const {
  os << "lmi " << name << " size " << size << " margin " << margin << "\n";
  os << "constant\n" << constant << "\n";
  for (const auto& [slot, G] : terms) {
    std::string owner = "?";
    int local = -1;
    for (const auto& v : vt.vars())
      if (slot >= v.offset && slot < v.offset + v.count) {
        owner = v.name;
        local = slot - v.offset;
      }
    os << "term slot " << slot << " (" << owner << "[" << local << "])\n" << G << "\n";
  }
}

// ---------------------------------------------------------------------------
// Real embedding
// ---------------------------------------------------------------------------

Eigen::MatrixXd real_embed(const Eigen::MatrixXcd& H, double herm_tol) {
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > herm_tol * (1.0 + H.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("real_embed: input is not Hermitian");
  const auto d = H.rows();
  Eigen::MatrixXd M(2 * d, 2 * d);
  M.topLeftCorner(d, d) = H.real();
  M.bottomRightCorner(d, d) = H.real();
  M.topRightCorner(d, d) = -H.imag();
  M.bottomLeftCorner(d, d) = H.imag();
  return M;
}

AffineLmi real_embed(const AffineLmi& lmi) {
  AffineLmi out = AffineLmi::zero(lmi.name, 2 * lmi.size);
  out.margin = lmi.margin;
  out.margin_coupled = lmi.margin_coupled;
  out.constant = real_embed(lmi.constant).cast<std::complex<double>>();
  for (const auto& [slot, G] : lmi.terms)
    out.terms.emplace(slot, real_embed(G).cast<std::complex<double>>());
  return out;
}

// ---------------------------------------------------------------------------
// Controller variables and affine rows
// ---------------------------------------------------------------------------

CtrlVars CtrlVars::pinned(const Controller& ctrl) {
  CtrlVars cv;
  cv.m = ctrl.m;
  for (double v : ctrl.x) cv.x.push_back({v, -1});
  for (double v : ctrl.y) cv.y.push_back({v, -1});
  return cv;
}

CtrlVars CtrlVars::declare(const Controller& pins, VariableTable& vt) {
  CtrlVars cv;
  cv.m = pins.m;
  cv.x.push_back({1.0, -1});
  for (int i = 1; i <= pins.m; ++i) {
    const auto& pin = pins.fixed_mask[static_cast<size_t>(i - 1)];
    if (pin) {
      cv.x.push_back({*pin, -1});
    } else {
      const int idx = vt.add_scalar("x" + std::to_string(i));
      cv.x.push_back({0.0, vt.var(idx).offset});
    }
  }
  for (int i = 0; i <= pins.m; ++i) {
    const auto& pin = pins.fixed_mask[static_cast<size_t>(pins.m + i)];
    if (pin) {
      cv.y.push_back({*pin, -1});
    } else {
      const int idx = vt.add_scalar("y" + std::to_string(i));
      cv.y.push_back({0.0, vt.var(idx).offset});
    }
  }
  return cv;
}

Controller CtrlVars::extract(const Controller& pins, const Eigen::VectorXd& theta) const {
  Controller out = pins;
  for (int i = 0; i <= m; ++i) {
    const auto& cx = x[static_cast<size_t>(i)];
    out.x[static_cast<size_t>(i)] = cx.slot >= 0 ? theta(cx.slot) : cx.c0;
    const auto& cy = y[static_cast<size_t>(i)];
    out.y[static_cast<size_t>(i)] = cy.slot >= 0 ? theta(cy.slot) : cy.c0;
  }
  return out;
}

namespace {

// Convolution of a fixed coefficient vector with an affine one; all vectors
// highest degree first.
AffineRow affine_conv(const std::vector<double>& fixed, const std::vector<CtrlVars::Coef>& v) {
  const int len = static_cast<int>(fixed.size() + v.size()) - 1;
  AffineRow out;
  out.c = Eigen::RowVectorXd::Zero(len);
  for (size_t i = 0; i < fixed.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) {
      const auto& coef = v[j];
      const int pos = static_cast<int>(i + j);
      out.c(pos) += fixed[i] * coef.c0;
      if (coef.slot >= 0) {
        auto it = out.lin.find(coef.slot);
        if (it == out.lin.end()) it = out.lin.emplace(coef.slot, Eigen::RowVectorXd::Zero(len)).first;
        it->second(pos) += fixed[i];
      }
    }
  return out;
}

AffineRow row_axpy(const AffineRow& a, double alpha, const AffineRow& b, double beta) {
  AffineRow out;
  out.c = alpha * a.c + beta * b.c;
  out.lin = {};
  for (const auto& [s, r] : a.lin) out.lin[s] = alpha * r;
  for (const auto& [s, r] : b.lin) {
    auto it = out.lin.find(s);
    if (it == out.lin.end())
      out.lin[s] = beta * r;
    else
      it->second += beta * r;
  }
  return out;
}

// Extract the ascending-order C row of the realization of an affine numerator
// over monic dc: C[j] = num[k-j] - D*dc[k-j], D constant by construction.
AffineRow c_row_from_numerator(const AffineRow& num, const Polynomial& dc, double D, int k) {
  AffineRow out;
  out.c = Eigen::RowVectorXd::Zero(k);
  for (int j = 0; j < k; ++j)
    out.c(j) = num.c(k - j) - D * dc.coeffs[static_cast<size_t>(k - j)];
  for (const auto& [s, r] : num.lin) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(k);
    for (int j = 0; j < k; ++j) row(j) = r(k - j);
    out.lin[s] = row;
  }
  return out;
}

// Column-reversed banded Toeplitz of an affine coefficient vector.
AffineMat affine_toeplitz_reversed(const std::vector<CtrlVars::Coef>& v, int rows, int cols) {
  AffineMat out;
  out.c = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (size_t j = 0; j < v.size(); ++j) {
      const int col = cols - 1 - (i + static_cast<int>(j));
      const auto& coef = v[j];
      out.c(i, col) += coef.c0;
      if (coef.slot >= 0) {
        auto it = out.lin.find(coef.slot);
        if (it == out.lin.end()) it = out.lin.emplace(coef.slot, Eigen::MatrixXd::Zero(rows, cols)).first;
        it->second(i, col) += 1.0;
      }
    }
  return out;
}

using Mc = Eigen::MatrixXcd;

Mc scalar_block(double v) {
  Mc b(1, 1);
  b(0, 0) = v;
  return b;
}

// -row at (k, 0..k-1) and its transpose, scaled.
void add_c_row(AffineLmi& lmi, const AffineRow& row, int k, double scale) {
  lmi.add_const(k, 0, scale * row.c.cast<std::complex<double>>());
  lmi.add_const(0, k, scale * row.c.transpose().cast<std::complex<double>>());
  for (const auto& [s, r] : row.lin) {
    lmi.add_term(s, k, 0, scale * r.cast<std::complex<double>>());
    lmi.add_term(s, 0, k, scale * r.transpose().cast<std::complex<double>>());
  }
}

// M at (r0, c0) and M^T at (c0, r0).
void add_mat_sym(AffineLmi& lmi, const AffineMat& mat, int r0, int c0) {
  lmi.add_const(r0, c0, mat.c.cast<std::complex<double>>());
  lmi.add_const(c0, r0, mat.c.transpose().cast<std::complex<double>>());
  for (const auto& [s, g] : mat.lin) {
    lmi.add_term(s, r0, c0, g.cast<std::complex<double>>());
    lmi.add_term(s, c0, r0, g.transpose().cast<std::complex<double>>());
  }
}

}  // namespace

LmiContext make_lmi_context(const IntervalPlant& plant, const Polynomial& dc,
                            const CtrlVars& ctrl) {
  plant.validate();
  if (dc.degree() != plant.n + ctrl.m)
    throw std::invalid_argument("make_lmi_context: deg(dc) must equal m+n");
  if (!is_strictly_hurwitz(dc))
    throw std::invalid_argument("make_lmi_context: dc must be strictly Hurwitz");

  LmiContext ctx;
  ctx.plant = plant;
  ctx.dc = dc;
  ctx.ctrl = ctrl;
  ctx.n = plant.n;
  ctx.m = ctrl.m;
  ctx.k = ctx.n + ctx.m;

  const int k = ctx.k;
  ctx.A = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i + 1 < k; ++i) ctx.A(i, i + 1) = 1.0;
  for (int j = 0; j < k; ++j) ctx.A(k - 1, j) = -dc.coeffs[static_cast<size_t>(k - j)];
  ctx.B = Eigen::VectorXd::Zero(k);
  ctx.B(k - 1) = 1.0;

  const AffineRow np = affine_conv(plant.a_c, ctrl.x);
  const AffineRow nq = affine_conv(plant.b_c, ctrl.y);
  const AffineRow ns = row_axpy(np, 1.0, nq, 1.0);
  ctx.Ds = 1.0;
  ctx.Dp = 1.0;
  ctx.Dq = 0.0;
  ctx.Cs = c_row_from_numerator(ns, dc, ctx.Ds, k);
  ctx.Cp = c_row_from_numerator(np, dc, ctx.Dp, k);
  ctx.Cq = c_row_from_numerator(nq, dc, ctx.Dq, k);
  ctx.Xr = affine_toeplitz_reversed(ctrl.x, ctx.n, k);
  ctx.Yr = affine_toeplitz_reversed(ctrl.y, ctx.n, k);
  return ctx;
}

AffineLmi assemble_stability_lmi(const LmiContext& ctx, VariableTable& vt) {
  const int k = ctx.k, n = ctx.n;
  const int dim = k + 1 + 2 * n;
  AffineLmi lmi = AffineLmi::zero("stability", dim);

  const int iP = vt.add_symmetric("P_s", k);
  const int iRa = vt.add_diag_positive("R_sa", n, kEpsDiag);
  const int iRb = vt.add_diag_positive("R_sb", n, kEpsDiag);

  const auto& P = vt.var(iP);
  for (int l = 0; l < P.count; ++l) {
    const Eigen::MatrixXd E = vt.basis(iP, l).real();
    const int slot = P.offset + l;
    lmi.add_term(slot, 0, 0, (ctx.A.transpose() * E + E * ctx.A).cast<std::complex<double>>());
    Eigen::MatrixXd eb = E * ctx.B;
    lmi.add_term(slot, 0, k, eb.cast<std::complex<double>>());
    lmi.add_term(slot, k, 0, eb.transpose().cast<std::complex<double>>());
  }

  add_c_row(lmi, ctx.Cs, k, -1.0);
  lmi.add_const(k, k, scalar_block(-2.0 * ctx.Ds));

  const auto& plant = ctx.plant;
  for (int i = 0; i < n; ++i) {
    const int sa = vt.var(iRa).offset + i;
    lmi.add_term(sa, k, k, scalar_block(plant.a_d[static_cast<size_t>(i)] * plant.a_d[static_cast<size_t>(i)]));
    lmi.add_term(sa, k + 1 + i, k + 1 + i, scalar_block(-1.0));
    const int sb = vt.var(iRb).offset + i;
    lmi.add_term(sb, k, k, scalar_block(plant.b_d[static_cast<size_t>(i)] * plant.b_d[static_cast<size_t>(i)]));
    lmi.add_term(sb, k + 1 + n + i, k + 1 + n + i, scalar_block(-1.0));
  }

  add_mat_sym(lmi, ctx.Xr, k + 1, 0);
  add_mat_sym(lmi, ctx.Yr, k + 1 + n, 0);
  lmi.finalize_margin();
  return lmi;
}

namespace {

// Shared body of the |S| and |T| pairs. swap_weights=false scales the a-side
// uncertainty by rho^± (sensitivity); true scales the b-side (complementary).
std::pair<AffineLmi, AffineLmi> assemble_perf_pair(const LmiContext& ctx, VariableTable& vt,
                                                   double rho, const FrequencyRange& range,
                                                   const AffineRow& Cn, double Dn,
                                                   bool swap_weights, const std::string& tag) {
  if (rho <= 0.0) throw std::invalid_argument("assemble_perf_pair: rho must be positive");
  const int k = ctx.k, n = ctx.n;
  const int dim = k + 1 + 2 * n;
  const double rinv = 1.0 / rho;
  const bool cplx = range.is_complex();

  const int iP = cplx ? vt.add_hermitian("P_" + tag, k) : vt.add_symmetric("P_" + tag, k);
  const int iQ = cplx ? vt.add_hermitian("Q_" + tag, k, kEpsQ)
                      : vt.add_symmetric("Q_" + tag, k, kEpsQ);

  // T = [A B; I 0], 2k x (k+1)
  Eigen::MatrixXd T(2 * k, k + 1);
  T.topLeftCorner(k, k) = ctx.A;
  T.topRightCorner(k, 1) = ctx.B;
  T.bottomLeftCorner(k, k) = Eigen::MatrixXd::Identity(k, k);
  T.bottomRightCorner(k, 1).setZero();
  const Mc Tc = T.cast<std::complex<double>>();
  const Eigen::Matrix2cd phi = range.phi().cast<std::complex<double>>();
  const Eigen::Matrix2cd psi = range.psi();

  std::array<AffineLmi, 2> out = {AffineLmi::zero(tag + "_plus", dim),
                                  AffineLmi::zero(tag + "_minus", dim)};
  const char* suffix[2][2] = {{"a", "b"}, {"c", "d"}};
  const double rr[2] = {1.0 + rinv, 1.0 - rinv};
  const double sign[2] = {1.0, -1.0};

  for (int which = 0; which < 2; ++which) {
    AffineLmi& lmi = out[static_cast<size_t>(which)];

    for (int iv : {iP, iQ}) {
      const auto& v = vt.var(iv);
      const Eigen::Matrix2cd& weight = (iv == iP) ? phi : psi;
      for (int l = 0; l < v.count; ++l) {
        const Mc E = vt.basis(iv, l);
        const Mc contrib = Tc.adjoint() * Eigen::kroneckerProduct(weight, E).eval() * Tc;
        lmi.add_term(v.offset + l, 0, 0, contrib);
      }
    }

    const AffineRow c_line = row_axpy(ctx.Cs, 1.0, Cn, sign[which] * rinv);
    add_c_row(lmi, c_line, k, -1.0);

    const double rho_pm = rr[which];
    // D-block constant: rho^± (D+D^T) in the sensitivity case, D+D^T otherwise
    lmi.add_const(k, k, scalar_block(swap_weights ? -2.0 * ctx.Ds : -rho_pm * 2.0 * Dn));

    const int iR1 = vt.add_diag_positive("R_" + tag + suffix[which][0], n, kEpsDiag);
    const int iR2 = vt.add_diag_positive("R_" + tag + suffix[which][1], n, kEpsDiag);
    const double wa = swap_weights ? 1.0 : rho_pm * rho_pm;
    const double wb = swap_weights ? rho_pm * rho_pm : 1.0;
    for (int i = 0; i < n; ++i) {
      const double ad = ctx.plant.a_d[static_cast<size_t>(i)];
      const double bd = ctx.plant.b_d[static_cast<size_t>(i)];
      const int s1 = vt.var(iR1).offset + i;
      lmi.add_term(s1, k, k, scalar_block(wa * ad * ad));
      lmi.add_term(s1, k + 1 + i, k + 1 + i, scalar_block(-1.0));
      const int s2 = vt.var(iR2).offset + i;
      lmi.add_term(s2, k, k, scalar_block(wb * bd * bd));
      lmi.add_term(s2, k + 1 + n + i, k + 1 + n + i, scalar_block(-1.0));
    }

    add_mat_sym(lmi, ctx.Xr, k + 1, 0);
    add_mat_sym(lmi, ctx.Yr, k + 1 + n, 0);
    lmi.finalize_margin();
  }

  if (cplx) return {real_embed(out[0]), real_embed(out[1])};
  return {out[0], out[1]};
}

}  // namespace

std::pair<AffineLmi, AffineLmi> assemble_sensitivity_lmis(const LmiContext& ctx,
                                                          VariableTable& vt, double rho_s,
                                                          const FrequencyRange& range) {
  return assemble_perf_pair(ctx, vt, rho_s, range, ctx.Cp, ctx.Dp, /*swap=*/false, "p");
}

std::pair<AffineLmi, AffineLmi> assemble_comp_sensitivity_lmis(const LmiContext& ctx,
                                                               VariableTable& vt, double rho_t,
                                                               const FrequencyRange& range) {
  return assemble_perf_pair(ctx, vt, rho_t, range, ctx.Cq, ctx.Dq, /*swap=*/true, "q");
}

}  // namespace rfix
