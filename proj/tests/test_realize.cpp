#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <random>

#include "rfix/poly.hpp"
#include "rfix/realize.hpp"

using namespace rfix;
using cplx = std::complex<double>;

namespace {

// Random monic polynomial whose roots stay away from the imaginary axis so
// frequency responses are well defined.
Polynomial random_denominator(std::mt19937_64& rng, int deg) {
  std::uniform_real_distribution<double> U(0.2, 2.0);
  Polynomial p({1.0});
  int left = deg;
  while (left > 0) {
    if (left >= 2 && (rng() % 2)) {
      const double c = U(rng), w = U(rng);
      p = convolve(p, Polynomial({1.0, 2.0 * c, c * c + w * w}));
      left -= 2;
    } else {
      p = convolve(p, Polynomial({1.0, U(rng)}));
      left -= 1;
    }
  }
  return p;
}

const IntervalPlant kPlant = IntervalPlant::from_bounds(
    {{0.5, 1.0}, {-1.0, 1.0}}, {{0.5, 1.0}, {1.0, 1.5}});

Controller reference_controller() {
  Controller c = Controller::make(2);
  c.x = {1.0, 0.8213, 0.0};
  c.y = {20.0270, 18.3422, 18.4318};
  return c;
}

const Polynomial kDc({1.0, 4.5, 6.225, 4.525, 1.5});

}  // namespace

TEST_CASE("canonical realization shape") {
  Polynomial den({1.0, 3.0, 2.0, 5.0});  // s^3 + 3 s^2 + 2 s + 5
  Polynomial num({4.0, 1.0});
  StateSpace ss = realize_canonical(num, den);
  REQUIRE(ss.k == 3);
  // shift structure above a bottom row of negated ascending coefficients
  CHECK(ss.A(0, 1) == 1.0);
  CHECK(ss.A(1, 2) == 1.0);
  CHECK(ss.A(0, 0) == 0.0);
  CHECK(ss.A(2, 0) == -5.0);
  CHECK(ss.A(2, 1) == -2.0);
  CHECK(ss.A(2, 2) == -3.0);
  CHECK(ss.B(0) == 0.0);
  CHECK(ss.B(1) == 0.0);
  CHECK(ss.B(2) == 1.0);
  // numerator 4 s + 1 in ascending state order, strictly proper so D = 0
  CHECK(ss.C(0) == 1.0);
  CHECK(ss.C(1) == 4.0);
  CHECK(ss.C(2) == 0.0);
  CHECK(ss.D == 0.0);
}

TEST_CASE("biproper realization puts the leading coefficient in D") {
  Polynomial den({1.0, 2.0, 3.0});
  Polynomial num({2.0, 1.0, 1.0});
  StateSpace ss = realize_canonical(num, den);
  CHECK(ss.D == 2.0);
  // C absorbs num - D*den = [-3, -5] ascending
  CHECK(ss.C(0) == doctest::Approx(-5.0));
  CHECK(ss.C(1) == doctest::Approx(-3.0));
}

TEST_CASE("realization round trip at random complex points") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const int deg = 2 + static_cast<int>(rng() % 4);
    Polynomial den = random_denominator(rng, deg);
    std::vector<double> nc(static_cast<size_t>(deg) + 1);
    for (auto& c : nc) c = U(rng);
    Polynomial num(nc);
    StateSpace ss = realize_canonical(num, den);
    for (int pt = 0; pt < 20; ++pt) {
      cplx s(U(rng) + 2.5, U(rng));  // keep away from the LHP roots
      cplx want = num.eval(s) / den.eval(s);
      cplx got = eval_at(ss, s);
      CHECK(std::abs(got - want) < 1e-8 * (1.0 + std::abs(want)));
    }
    // freq_response agrees with eval_at on the imaginary axis
    for (double w : {0.1, 1.0, 10.0}) {
      cplx a = freq_response(ss, std::nullopt, w);
      cplx b = eval_at(ss, cplx(0.0, w));
      CHECK(std::abs(a - b) < 1e-9 * (1.0 + std::abs(b)));
    }
  }
}

TEST_CASE("constructed systems match their rational definitions") {
  Controller ctrl = reference_controller();
  ConstructedSystems cs = build_constructed_systems(kPlant, ctrl, kDc);
  REQUIRE(cs.k == 4);

  std::vector<double> za{0.0, 0.0}, zb{0.0, 0.0};
  std::vector<double> da{0.3, -0.7}, db{-0.5, 0.9};
  Polynomial x(ctrl.x), y(ctrl.y);

  for (double w : {0.02, 0.3, 2.0, 70.0}) {
    const cplx s(0.0, w);
    const cplx dc = kDc.eval(s);
    // nominal responses
    cplx gs = freq_response(cs.gs, std::nullopt, w);
    cplx want_gs = (kPlant.a_at(za).eval(s) * x.eval(s) +
                    kPlant.b_at(zb).eval(s) * y.eval(s)) / dc;
    CHECK(std::abs(gs - want_gs) < 1e-9 * (1.0 + std::abs(want_gs)));

    // sampled responses via output-row perturbations
    cplx gsd = freq_response(cs.gs, cs.pert_s(da, db), w);
    cplx want_gsd = (kPlant.a_at(da).eval(s) * x.eval(s) +
                     kPlant.b_at(db).eval(s) * y.eval(s)) / dc;
    CHECK(std::abs(gsd - want_gsd) < 1e-9 * (1.0 + std::abs(want_gsd)));

    cplx gpd = freq_response(cs.gp, cs.pert_p(da), w);
    cplx want_gpd = kPlant.a_at(da).eval(s) * x.eval(s) / dc;
    CHECK(std::abs(gpd - want_gpd) < 1e-9 * (1.0 + std::abs(want_gpd)));

    cplx gqd = freq_response(cs.gq, cs.pert_q(db), w);
    cplx want_gqd = kPlant.b_at(db).eval(s) * y.eval(s) / dc;
    CHECK(std::abs(gqd - want_gqd) < 1e-9 * (1.0 + std::abs(want_gqd)));

    // numerator split: gp + gq = gs at matching samples, so S + T = 1
    CHECK(std::abs(gpd + gqd - gsd) < 1e-9 * (1.0 + std::abs(gsd)));
  }

  // zero deviations give a zero perturbation row
  CHECK(cs.pert_s(za, zb).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("constructed systems share the companion pair") {
  Controller ctrl = reference_controller();
  ConstructedSystems cs = build_constructed_systems(kPlant, ctrl, kDc);
  CHECK(cs.gs.A == cs.gp.A);
  CHECK(cs.gs.A == cs.gq.A);
  CHECK(cs.gs.B == cs.gp.B);
  CHECK(cs.gs.D == 1.0);
  CHECK(cs.gp.D == 1.0);
  CHECK(cs.gq.D == 0.0);
  // Toeplitz borders are n x (n+m)
  CHECK(cs.X.rows() == 2);
  CHECK(cs.X.cols() == 4);
  CHECK(cs.Y.rows() == 2);
  CHECK(cs.Y.cols() == 4);
}
