#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <random>

#include "rfix/poly.hpp"

using namespace rfix;

TEST_CASE("convolution basics") {
  Polynomial p({1.0, 2.0, 3.0});
  Polynomial one({1.0});
  CHECK(convolve(p, one).coeffs == p.coeffs);
  CHECK(convolve(one, p).coeffs == p.coeffs);

  // (s+1)(s+2) = s^2 + 3s + 2
  Polynomial r = convolve(Polynomial({1.0, 1.0}), Polynomial({1.0, 2.0}));
  REQUIRE(r.degree() == 2);
  CHECK(r.coeffs[0] == doctest::Approx(1.0));
  CHECK(r.coeffs[1] == doctest::Approx(3.0));
  CHECK(r.coeffs[2] == doctest::Approx(2.0));
}

TEST_CASE("convolution agrees with pointwise products at random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> pc(4), qc(5);
    for (auto& c : pc) c = U(rng);
    for (auto& c : qc) c = U(rng);
    Polynomial p(pc), q(qc);
    Polynomial pq = convolve(p, q);
    std::complex<double> s(U(rng), U(rng));
    std::complex<double> lhs = pq.eval(s);
    std::complex<double> rhs = p.eval(s) * q.eval(s);
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("banded Toeplitz operator multiplies like convolution") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 5);
    const int len = 1 + static_cast<int>(rng() % 5);
    std::vector<double> v(static_cast<size_t>(len));
    for (auto& c : v) c = U(rng);
    Eigen::VectorXd p(rows);
    for (int i = 0; i < rows; ++i) p(i) = U(rng);

    Eigen::MatrixXd T = toeplitz_band(v, rows);
    REQUIRE(T.rows() == rows);
    REQUIRE(T.cols() == rows + len - 1);
    Eigen::RowVectorXd viaT = p.transpose() * T;

    std::vector<double> pc(static_cast<size_t>(rows));
    for (int i = 0; i < rows; ++i) pc[static_cast<size_t>(i)] = p(i);
    Polynomial conv = convolve(Polynomial(pc), Polynomial(v));
    REQUIRE(conv.degree() + 1 == viaT.size());
    for (int i = 0; i < viaT.size(); ++i)
      CHECK(std::abs(viaT(i) - conv.coeffs[static_cast<size_t>(i)]) < 1e-12);
  }
}

TEST_CASE("add and scale handle unequal degrees") {
  Polynomial p({1.0, 0.0, 2.0});
  Polynomial q({3.0, 4.0});
  Polynomial r = add(p, q);
  REQUIRE(r.degree() == 2);
  CHECK(r.coeffs[0] == 1.0);
  CHECK(r.coeffs[1] == 3.0);
  CHECK(r.coeffs[2] == 6.0);
  Polynomial s = scale(q, -2.0);
  CHECK(s.coeffs[0] == -6.0);
  CHECK(s.coeffs[1] == -8.0);
}

TEST_CASE("Hurwitz test from placed roots") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.1, 3.0);
  for (int trial = 0; trial < 25; ++trial) {
    // product of (s + a) and (s^2 + 2 c s + c^2 + w^2) factors, all roots in
    // the open left half plane
    Polynomial p({1.0});
    const int nfac = 1 + static_cast<int>(rng() % 3);
    for (int f = 0; f < nfac; ++f) {
      if (rng() % 2) {
        p = convolve(p, Polynomial({1.0, U(rng)}));
      } else {
        const double c = U(rng), w = U(rng);
        p = convolve(p, Polynomial({1.0, 2.0 * c, c * c + w * w}));
      }
    }
    CHECK(is_strictly_hurwitz(p));
    // flip one root to the right half plane
    Polynomial bad = convolve(p, Polynomial({1.0, -U(rng)}));
    CHECK_FALSE(is_strictly_hurwitz(bad));
  }
}

TEST_CASE("Hurwitz test rejects marginal and near-axis roots") {
  CHECK_FALSE(is_strictly_hurwitz(Polynomial({1.0, 0.0, 1.0})));  // s^2+1
  CHECK_FALSE(is_strictly_hurwitz(Polynomial({1.0, 0.0})));       // root at 0
  // root at -1e-12, inside the exclusion band around the axis
  CHECK_FALSE(is_strictly_hurwitz(Polynomial({1.0, 1e-12})));
  CHECK(is_strictly_hurwitz(Polynomial({1.0, 1.0})));
}

TEST_CASE("roots of a known quadratic") {
  auto roots = poly_roots(Polynomial({1.0, 3.0, 2.0}));  // -1, -2
  REQUIRE(roots.size() == 2);
  std::sort(roots.begin(), roots.end(),
            [](auto a, auto b) { return a.real() < b.real(); });
  CHECK(roots[0].real() == doctest::Approx(-2.0));
  CHECK(roots[1].real() == doctest::Approx(-1.0));
  CHECK(std::abs(roots[0].imag()) < 1e-12);
}

TEST_CASE("interval plant from bounds: medians and deviations") {
  IntervalPlant pl = IntervalPlant::from_bounds({{0.5, 1.0}, {-1.0, 1.0}},
                                                {{0.5, 1.0}, {1.0, 1.5}});
  REQUIRE(pl.n == 2);
  CHECK(pl.a_c == std::vector<double>{1.0, 0.75, 0.0});
  CHECK(pl.a_d == std::vector<double>{0.25, 1.0});
  CHECK(pl.b_c == std::vector<double>{0.0, 0.75, 1.25});
  CHECK(pl.b_d == std::vector<double>{0.25, 0.25});

  // sampling at the box corners recovers the bounds
  Polynomial alo = pl.a_at({-1.0, -1.0});
  CHECK(alo.coeffs[1] == doctest::Approx(0.5));
  CHECK(alo.coeffs[2] == doctest::Approx(-1.0));
  Polynomial bhi = pl.b_at({1.0, 1.0});
  CHECK(bhi.coeffs[1] == doctest::Approx(1.0));
  CHECK(bhi.coeffs[2] == doctest::Approx(1.5));
}

TEST_CASE("interval plant rejects misordered bounds") {
  CHECK_THROWS(IntervalPlant::from_bounds({{1.0, 0.5}}, {{0.0, 1.0}}));
  CHECK_THROWS(IntervalPlant::from_bounds({{0.0, 1.0}}, {{2.0, 1.0}}));
}

TEST_CASE("controller pins") {
  Controller c = Controller::make(2);
  REQUIRE(c.m == 2);
  REQUIRE(c.x.size() == 3);
  REQUIRE(c.y.size() == 3);
  CHECK(c.x[0] == 1.0);
  CHECK(c.pin_slots() == 5);

  c.pin_x(2, 0.0);
  c.pin_y(0, 5.0);
  REQUIRE(c.fixed_mask.size() == 5);
  CHECK(c.fixed_mask[1].has_value());  // x2 slot
  CHECK(*c.fixed_mask[1] == 0.0);
  CHECK(c.fixed_mask[2].has_value());  // y0 slot
  CHECK(*c.fixed_mask[2] == 5.0);
  CHECK_FALSE(c.fixed_mask[0].has_value());

  CHECK_THROWS(c.pin_x(0, 1.0));  // x0 is structurally 1
  CHECK_THROWS(c.pin_x(3, 1.0));
  CHECK_THROWS(c.pin_y(3, 1.0));
  c.validate();
}
