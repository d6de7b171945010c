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

#include "rfix/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace rfix {

namespace {

Polynomial closed_loop_charpoly(const IntervalPlant& plant, const Controller& ctrl,
                                const UncertaintySample& sample) {
  const Polynomial a = plant.a_at(sample.delta_a);
  const Polynomial b = plant.b_at(sample.delta_b);
  return add(convolve(a, Polynomial(ctrl.x)), convolve(b, Polynomial(ctrl.y)));
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_grid: need 0 < lo < hi");
  // Keep endpoints strictly interior: open intervals in the frequency bands.
  const double llo = std::log10(lo), lhi = std::log10(hi);
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) {
    const double f = (i + 1.0) / (points + 1.0);
    g[i] = std::pow(10.0, llo + f * (lhi - llo));
  }
  return g;
}

}  // namespace

std::vector<UncertaintySample> make_samples(int n, int random_count, std::uint64_t seed) {
  std::vector<UncertaintySample> out;
  const int dims = 2 * n;
  const std::uint64_t vertices = std::uint64_t{1} << dims;
  out.reserve(vertices + static_cast<std::uint64_t>(std::max(0, random_count)));
  for (std::uint64_t mask = 0; mask < vertices; ++mask) {
    UncertaintySample s;
    s.delta_a.resize(n);
    s.delta_b.resize(n);
    for (int i = 0; i < n; ++i) s.delta_a[i] = (mask >> i) & 1 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) s.delta_b[i] = (mask >> (n + i)) & 1 ? 1.0 : -1.0;
    s.provenance = "vertex";
    out.push_back(std::move(s));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int r = 0; r < random_count; ++r) {
    UncertaintySample s;
    s.delta_a.resize(n);
    s.delta_b.resize(n);
    for (int i = 0; i < n; ++i) s.delta_a[i] = unif(rng);
    for (int i = 0; i < n; ++i) s.delta_b[i] = unif(rng);
    s.provenance = "random(" + std::to_string(seed) + ")";
    out.push_back(std::move(s));
  }
  return out;
}

bool closed_loop_stable(const IntervalPlant& plant, const Controller& ctrl,
                        const UncertaintySample& sample) {
  const Polynomial c = closed_loop_charpoly(plant, ctrl, sample);
  const auto roots = poly_roots(c);
  for (const auto& r : roots)
    if (r.real() >= -kTauHurwitz) return false;
  return true;
}

SweepReport sweep_sensitivity(const IntervalPlant& plant, const Controller& ctrl,
                              const std::vector<UncertaintySample>& samples,
                              double omega_lo, double omega_hi, double bound_db,
                              SweepKind kind, const Polynomial& dc, int grid_points) {
  const ConstructedSystems sys = build_constructed_systems(plant, ctrl, dc);
  SweepReport rep;
  rep.grid = log_grid(omega_lo, omega_hi, grid_points);
  const int P = static_cast<int>(rep.grid.size());
  rep.env_min_db.assign(P, std::numeric_limits<double>::infinity());
  rep.env_max_db.assign(P, -std::numeric_limits<double>::infinity());
  rep.worst_margin_db = std::numeric_limits<double>::infinity();

  for (std::size_t si = 0; si < samples.size(); ++si) {
    const auto& smp = samples[si];
    if (!closed_loop_stable(plant, ctrl, smp)) {
      rep.all_samples_stable = false;
      if (rep.failing_sample < 0) rep.failing_sample = static_cast<int>(si);
      continue;
    }
    const Eigen::RowVectorXd ds = sys.pert_s(smp.delta_a, smp.delta_b);
    const Eigen::RowVectorXd dn = (kind == SweepKind::Sensitivity)
                                      ? sys.pert_p(smp.delta_a)
                                      : sys.pert_q(smp.delta_b);
    const StateSpace& gn = (kind == SweepKind::Sensitivity) ? sys.gp : sys.gq;
    for (int i = 0; i < P; ++i) {
      const double w = rep.grid[i];
      const std::complex<double> num = freq_response(gn, dn, w);
      const std::complex<double> den = freq_response(sys.gs, ds, w);
      const double mag_db = 20.0 * std::log10(std::abs(num / den));
      rep.env_min_db[i] = std::min(rep.env_min_db[i], mag_db);
      rep.env_max_db[i] = std::max(rep.env_max_db[i], mag_db);
      rep.worst_margin_db = std::min(rep.worst_margin_db, bound_db - mag_db);
    }
  }
  rep.pass = rep.all_samples_stable && rep.worst_margin_db > 0.0;
  return rep;
}

bool lemma2_transform_check(const Polynomial& N, const Polynomial& D, double gamma,
                            double omega_lo, double omega_hi, int grid_points) {
  if (!(gamma > 0.0)) throw std::invalid_argument("lemma2_transform_check: gamma must be > 0");
  const auto grid = log_grid(omega_lo, omega_hi, grid_points);
  for (double w : grid) {
    const std::complex<double> jw(0.0, w);
    const std::complex<double> nv = N.eval(jw);
    const std::complex<double> dv = D.eval(jw);
    const bool bounded = std::abs(nv / dv) < gamma;
    const std::complex<double> transformed = (dv - nv / gamma) / (dv + nv / gamma);
    const bool spr = transformed.real() > 0.0;
    if (bounded != spr) return false;
  }
  return true;
}

StepResult step_response(const IntervalPlant& plant, const Controller& ctrl,
                         const UncertaintySample& sample, double t_end,
                         double dt_override) {
  if (!closed_loop_stable(plant, ctrl, sample))
    throw std::runtime_error("step_response: closed loop unstable at this sample");
  const Polynomial num = convolve(plant.b_at(sample.delta_b), Polynomial(ctrl.y));
  const Polynomial den = closed_loop_charpoly(plant, ctrl, sample);
  const StateSpace ss = realize_canonical(num, den);

  double dt = dt_override;
  if (dt <= 0.0) {
    const Eigen::EigenSolver<Eigen::MatrixXd> es(ss.A);
    double max_mag = 0.0;
    for (int i = 0; i < ss.k; ++i) max_mag = std::max(max_mag, std::abs(es.eigenvalues()[i]));
    dt = std::min(1e-3, 1.0 / max_mag / 50.0);
  }

  StepResult res;
  res.dt = dt;
  const int steps = static_cast<int>(std::ceil(t_end / dt));
  res.t.reserve(steps + 1);
  res.y.reserve(steps + 1);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ss.k);
  const auto f = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return ss.A * v + ss.B;  // unit step input
  };
  for (int i = 0; i <= steps; ++i) {
    res.t.push_back(i * dt);
    res.y.push_back((ss.C * x)(0) + ss.D);
    const Eigen::VectorXd k1 = f(x);
    const Eigen::VectorXd k2 = f(x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = f(x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = f(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  res.final_value = res.y.back();
  return res;
}

void write_bode_csv(std::ostream& os, const SweepReport& report) {
  os << "omega_rad_s,env_min_db,env_max_db\n";
  for (std::size_t i = 0; i < report.grid.size(); ++i)
    os << report.grid[i] << ',' << report.env_min_db[i] << ',' << report.env_max_db[i] << '\n';
}

void write_step_csv(std::ostream& os, const StepResult& result) {
  os << "t,y\n";
  for (std::size_t i = 0; i < result.t.size(); ++i)
    os << result.t[i] << ',' << result.y[i] << '\n';
}

void write_stability_csv(std::ostream& os, const IntervalPlant& plant,
                         const Controller& ctrl,
                         const std::vector<UncertaintySample>& samples) {
  os << "index,provenance,stable,max_re_root\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Polynomial c = closed_loop_charpoly(plant, ctrl, samples[i]);
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& r : poly_roots(c)) max_re = std::max(max_re, r.real());
    os << i << ',' << samples[i].provenance << ',' << (max_re < -kTauHurwitz ? 1 : 0)
       << ',' << max_re << '\n';
  }
}

}  // namespace rfix
