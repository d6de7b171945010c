#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "rfix/sdp.hpp"

using namespace rfix;

namespace {

Eigen::MatrixXcd scalar1(double v) {
  Eigen::MatrixXcd m(1, 1);
  m(0, 0) = v;
  return m;
}

}  // namespace

TEST_CASE("scalar feasibility with margin capped at t_max") {
  // u - 3 <= -t with free u: the margin maximizes out to the cap
  SdpProblem prob;
  int iu = prob.vars.add_scalar("u");
  AffineLmi lmi = AffineLmi::zero("shift", 1);
  lmi.add_const(0, 0, scalar1(-3.0));
  lmi.add_term(prob.vars.var(iu).offset, 0, 0, scalar1(1.0));
  prob.lmis.push_back(lmi);
  prob.validate();

  SdpOutcome out = solve(prob);
  REQUIRE(out.status == SdpStatus::Feasible);
  CHECK(out.achieved_margin == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(out.assignment(0) - 3.0 <= -out.achieved_margin + 1e-6);
}

TEST_CASE("contradictory scalar constraints are infeasible") {
  // u <= -t and -u + 1 <= -t force t* = -0.5
  SdpProblem prob;
  int iu = prob.vars.add_scalar("u");
  const int slot = prob.vars.var(iu).offset;
  AffineLmi up = AffineLmi::zero("upper", 1);
  up.add_term(slot, 0, 0, scalar1(1.0));
  AffineLmi lo = AffineLmi::zero("lower", 1);
  lo.add_const(0, 0, scalar1(1.0));
  lo.add_term(slot, 0, 0, scalar1(-1.0));
  prob.lmis = {up, lo};

  SdpOutcome out = solve(prob);
  REQUIRE(out.status == SdpStatus::Infeasible);
  CHECK(out.achieved_margin == doctest::Approx(-0.5).epsilon(1e-3));
}

namespace {

// P >= I keeps the infeasible case decisively infeasible (the problem is
// homogeneous in P, so a tiny floor would put the optimum at a tiny negative
// margin instead of a clearly signed one)
SdpProblem lyapunov_problem(const Eigen::Matrix2d& A) {
  SdpProblem prob;
  int ip = prob.vars.add_symmetric("P", 2, /*psd_lower=*/1.0);
  AffineLmi lmi = AffineLmi::zero("lyap", 2);
  const auto& v = prob.vars.var(ip);
  for (int l = 0; l < v.count; ++l) {
    Eigen::MatrixXd E = prob.vars.basis(ip, l).real();
    lmi.add_term(v.offset + l, 0, 0,
                 (A.transpose() * E + E * A).cast<std::complex<double>>());
  }
  prob.lmis.push_back(lmi);
  return prob;
}

}  // namespace

TEST_CASE("Lyapunov inequality for a stable matrix is feasible and certified") {
  Eigen::Matrix2d A;
  A << 0, 1, -2, -3;
  SdpProblem prob = lyapunov_problem(A);
  SdpOutcome out = solve(prob);
  REQUIRE(out.status == SdpStatus::Feasible);
  CHECK(out.achieved_margin > 0.0);

  auto reports = verify_certificate(prob, out.assignment);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].satisfied);
  CHECK(reports[0].max_eigenvalue < 0.0);

  // a corrupted assignment fails the independent eigenvalue re-check
  Eigen::VectorXd bad = -out.assignment;
  auto bad_reports = verify_certificate(prob, bad);
  CHECK_FALSE(bad_reports[0].satisfied);
}

TEST_CASE("Lyapunov inequality for an unstable matrix is infeasible") {
  Eigen::Matrix2d A;
  A << 0, 1, 2, 1;  // eigenvalues 2 and -1
  SdpOutcome out = solve(lyapunov_problem(A));
  REQUIRE(out.status == SdpStatus::Infeasible);
  CHECK(out.achieved_margin < 0.0);
}

TEST_CASE("diagonal lower bounds are honored") {
  // minimize nothing; the 1x1 LMI r - 5 <= -t pushes r down to its bound
  SdpProblem prob;
  int ir = prob.vars.add_diag_positive("R", 1, 0.25);
  AffineLmi lmi = AffineLmi::zero("push", 1);
  lmi.add_const(0, 0, scalar1(-5.0));
  lmi.add_term(prob.vars.var(ir).offset, 0, 0, scalar1(1.0));
  prob.lmis.push_back(lmi);

  SdpOutcome out = solve(prob);
  REQUIRE(out.status == SdpStatus::Feasible);
  CHECK(out.assignment(0) >= 0.25 - 1e-7);
}

TEST_CASE("problem validation rejects malformed LMIs") {
  SdpProblem prob;
  prob.vars.add_scalar("u");
  AffineLmi lmi = AffineLmi::zero("bad", 1);
  lmi.add_term(7, 0, 0, scalar1(1.0));  // slot out of range
  prob.lmis.push_back(lmi);
  CHECK_THROWS(prob.validate());
}

TEST_CASE("text export lists variables and every LMI") {
  Eigen::Matrix2d A;
  A << 0, 1, -2, -3;
  SdpProblem prob = lyapunov_problem(A);
  std::ostringstream os;
  export_text(prob, os);
  const std::string s = os.str();
  CHECK(s.find("var P") != std::string::npos);
  CHECK(s.find("lyap") != std::string::npos);
}
