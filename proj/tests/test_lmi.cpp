#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>

#include "rfix/lmi.hpp"

using namespace rfix;
using cplx = std::complex<double>;

namespace {

const IntervalPlant kPlant = IntervalPlant::from_bounds(
    {{0.5, 1.0}, {-1.0, 1.0}}, {{0.5, 1.0}, {1.0, 1.5}});
const Polynomial kDc({1.0, 4.5, 6.225, 4.525, 1.5});

Controller reference_controller() {
  Controller c = Controller::make(2);
  c.x = {1.0, 0.8213, 0.0};
  c.y = {20.0270, 18.3422, 18.4318};
  return c;
}

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::MatrixXcd M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = cplx(U(rng), U(rng));
  return (M + M.adjoint()).eval();
}

double band_witness(const FrequencyRange& r, const Eigen::Matrix2cd& psi, double w) {
  Eigen::Vector2cd v(cplx(0.0, w), cplx(1.0, 0.0));
  (void)r;
  return (v.adjoint() * psi * v).real()(0);
}

}  // namespace

TEST_CASE("frequency range selectors separate in-band from out-of-band") {
  // the quadratic form [jw;1]^* Psi [jw;1] is nonnegative exactly on the band
  FrequencyRange low = table1_psi(RangeKind::Low, 2.0, 0.0);
  CHECK(band_witness(low, low.psi(), 1.0) > 0.0);
  CHECK(band_witness(low, low.psi(), 3.0) < 0.0);

  FrequencyRange mid = table1_psi(RangeKind::Middle, 1.0, 4.0);
  CHECK(band_witness(mid, mid.psi(), 2.0) > 0.0);
  CHECK(band_witness(mid, mid.psi(), 0.5) < 0.0);
  CHECK(band_witness(mid, mid.psi(), 5.0) < 0.0);
  CHECK(mid.is_complex());
  CHECK_FALSE(low.is_complex());

  FrequencyRange high = table1_psi(RangeKind::High, 0.0, 3.0);
  CHECK(band_witness(high, high.psi(), 5.0) > 0.0);
  CHECK(band_witness(high, high.psi(), 2.0) < 0.0);

  // Phi annihilates the axis witness for every frequency
  for (double w : {0.1, 1.0, 10.0}) {
    Eigen::Vector2cd v(cplx(0.0, w), cplx(1.0, 0.0));
    CHECK(std::abs((v.adjoint() * mid.phi().cast<cplx>() * v)(0)) < 1e-12);
  }
}

TEST_CASE("band edges for sweep grids") {
  auto [l1, h1] = table1_psi(RangeKind::Middle, 0.01, 0.1).band();
  CHECK(l1 == 0.01);
  CHECK(h1 == 0.1);
  auto [l2, h2] = table1_psi(RangeKind::Low, 2.0, 0.0).band();
  CHECK(l2 == 0.0);
  CHECK(h2 == 2.0);
}

TEST_CASE("gkyp weighting is linear in P and Q") {
  std::mt19937_64 rng(5);
  FrequencyRange mid = table1_psi(RangeKind::Middle, 1.0, 4.0);
  Eigen::MatrixXcd P = random_hermitian(rng, 3), Q = random_hermitian(rng, 3);
  Eigen::MatrixXcd sum = gkyp_xi(mid, P, Q);
  Eigen::MatrixXcd parts = gkyp_xi(mid, P, Eigen::MatrixXcd::Zero(3, 3)) +
                           gkyp_xi(mid, Eigen::MatrixXcd::Zero(3, 3), Q);
  CHECK((sum - parts).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((sum - sum.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("real embedding duplicates the eigenvalue multiset") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 4);
    Eigen::MatrixXcd H = random_hermitian(rng, d);
    Eigen::MatrixXd E = real_embed(H);
    REQUIRE(E.rows() == 2 * d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eh(H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ee(E);
    std::vector<double> want;
    for (int i = 0; i < d; ++i) {
      want.push_back(eh.eigenvalues()(i));
      want.push_back(eh.eigenvalues()(i));
    }
    std::sort(want.begin(), want.end());
    for (int i = 0; i < 2 * d; ++i)
      CHECK(ee.eigenvalues()(i) == doctest::Approx(want[static_cast<size_t>(i)]).epsilon(1e-9));
  }
  // non-Hermitian input is rejected
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS(real_embed(bad));
}

TEST_CASE("variable table slot accounting and reconstruction") {
  VariableTable vt;
  int is = vt.add_scalar("u");
  int iy = vt.add_symmetric("S", 3);
  int ih = vt.add_hermitian("H", 3);
  int id = vt.add_diag_positive("R", 2, 1e-9);
  CHECK(vt.var(is).count == 1);
  CHECK(vt.var(iy).count == 6);
  CHECK(vt.var(ih).count == 9);  // 6 real + 3 imaginary slots
  CHECK(vt.var(id).count == 2);
  CHECK(vt.total() == 18);
  CHECK(vt.find("H") == ih);

  // value_of is the linear combination of slot bases
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd theta(vt.total());
  for (int i = 0; i < theta.size(); ++i) theta(i) = U(rng);
  for (int iv : {is, iy, ih, id}) {
    const auto& v = vt.var(iv);
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(v.dim, v.dim);
    for (int l = 0; l < v.count; ++l) want += theta(v.offset + l) * vt.basis(iv, l);
    Eigen::MatrixXcd got = vt.value_of(iv, theta);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((got - got.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("affine LMIs evaluate affinely") {
  VariableTable vt;
  CtrlVars cv = CtrlVars::pinned(reference_controller());
  LmiContext ctx = make_lmi_context(kPlant, kDc, cv);
  AffineLmi lmi = assemble_stability_lmi(ctx, vt);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd t1(vt.total()), t2(vt.total());
  for (int i = 0; i < vt.total(); ++i) {
    t1(i) = U(rng);
    t2(i) = U(rng);
  }
  Eigen::MatrixXcd m0 = lmi.evaluate(Eigen::VectorXd::Zero(vt.total()));
  Eigen::MatrixXcd d =
      lmi.evaluate(t1 + t2) - m0 - (lmi.evaluate(t1) - m0) - (lmi.evaluate(t2) - m0);
  CHECK(d.cwiseAbs().maxCoeff() < 1e-10);
  CHECK(lmi.is_real(1e-12));
  CHECK(lmi.margin > 0.0);
}

TEST_CASE("stability LMI transcription matches a direct construction") {
  // Evaluate the assembled LMI at a random assignment and rebuild the same
  // matrix from its defining blocks.
  VariableTable vt;
  CtrlVars cv = CtrlVars::pinned(reference_controller());
  LmiContext ctx = make_lmi_context(kPlant, kDc, cv);
  AffineLmi lmi = assemble_stability_lmi(ctx, vt);
  const int k = ctx.k, n = ctx.n;
  REQUIRE(lmi.size == k + 1 + 2 * n);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd theta(vt.total());
  for (int i = 0; i < theta.size(); ++i) theta(i) = U(rng);

  Eigen::MatrixXd P = vt.value_of(vt.find("P_s"), theta).real();
  Eigen::VectorXd ra = vt.value_of(vt.find("R_sa"), theta).real().diagonal();
  Eigen::VectorXd rb = vt.value_of(vt.find("R_sb"), theta).real().diagonal();

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(lmi.size, lmi.size);
  M.topLeftCorner(k, k) = ctx.A.transpose() * P + P * ctx.A;
  Eigen::VectorXd pb = P * ctx.B;
  M.block(0, k, k, 1) = pb - ctx.Cs.c.transpose();
  M.block(k, 0, 1, k) = M.block(0, k, k, 1).transpose();
  double dd = -2.0 * ctx.Ds;
  for (int i = 0; i < n; ++i) {
    dd += ra(i) * kPlant.a_d[static_cast<size_t>(i)] * kPlant.a_d[static_cast<size_t>(i)];
    dd += rb(i) * kPlant.b_d[static_cast<size_t>(i)] * kPlant.b_d[static_cast<size_t>(i)];
    M(k + 1 + i, k + 1 + i) = -ra(i);
    M(k + 1 + n + i, k + 1 + n + i) = -rb(i);
  }
  M(k, k) = dd;
  M.block(k + 1, 0, n, k) = ctx.Xr.c;
  M.block(0, k + 1, k, n) = ctx.Xr.c.transpose();
  M.block(k + 1 + n, 0, n, k) = ctx.Yr.c;
  M.block(0, k + 1 + n, k, n) = ctx.Yr.c.transpose();

  Eigen::MatrixXd got = lmi.evaluate(theta).real();
  CHECK((got - M).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("controller variables: pins stay constant, free slots extract") {
  Controller pins = Controller::make(2);
  pins.pin_x(2, 0.0);
  VariableTable vt;
  CtrlVars cv = CtrlVars::declare(pins, vt);
  CHECK(cv.x[0].slot == -1);
  CHECK(cv.x[0].c0 == 1.0);
  CHECK(cv.x[2].slot == -1);  // pinned
  CHECK(cv.x[2].c0 == 0.0);
  CHECK(cv.x[1].slot >= 0);
  CHECK(cv.y[0].slot >= 0);
  CHECK(vt.total() == 4);  // x1, y0, y1, y2

  Eigen::VectorXd theta(vt.total());
  theta << 0.5, 2.0, 3.0, 4.0;
  Controller out = cv.extract(pins, theta);
  CHECK(out.x[0] == 1.0);
  CHECK(out.x[1] == 0.5);
  CHECK(out.x[2] == 0.0);
  CHECK(out.y[0] == 2.0);
  CHECK(out.y[2] == 4.0);
}

TEST_CASE("real-embedded affine LMIs preserve definiteness") {
  VariableTable vt;
  CtrlVars cv = CtrlVars::pinned(reference_controller());
  LmiContext ctx = make_lmi_context(kPlant, kDc, cv);
  FrequencyRange mid = table1_psi(RangeKind::Middle, 0.01, 0.1);
  auto [plus, minus] = assemble_sensitivity_lmis(ctx, vt, 0.7, mid);
  // middle-range pairs come back real-embedded at twice the base size
  CHECK(plus.size == 2 * (ctx.k + 1 + 2 * ctx.n));
  CHECK(minus.size == plus.size);
  CHECK(plus.is_real(0.0));

  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd theta(vt.total());
  for (int i = 0; i < theta.size(); ++i) theta(i) = U(rng);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(plus.evaluate(theta).real());
  // eigenvalues come in duplicated pairs
  for (int i = 0; i + 1 < es.eigenvalues().size(); i += 2)
    CHECK(es.eigenvalues()(i) == doctest::Approx(es.eigenvalues()(i + 1)).epsilon(1e-8));
}
