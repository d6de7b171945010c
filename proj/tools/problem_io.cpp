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

#include "problem_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace rfix {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw std::runtime_error("problem file: " + msg);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(std::string("parse error: ") + e.what());
  }
  return j;
}

RangeKind parse_kind(const std::string& s) {
  if (s == "low") return RangeKind::Low;
  if (s == "middle") return RangeKind::Middle;
  if (s == "high") return RangeKind::High;
  fail("range_kind must be low, middle or high, got '" + s + "'");
}

/// band_rad_s is [lo, hi] with 0 < lo < hi; the LMI range picks the
/// kind-appropriate cutoff (low: hi, high: lo, middle: both).
PerfSpec parse_perf(const json& j, double& bound_db, double& lo, double& hi) {
  if (!j.contains("bound_db") || !j.contains("band_rad_s"))
    fail("performance spec needs bound_db and band_rad_s");
  bound_db = j.at("bound_db").get<double>();
  const auto band = j.at("band_rad_s").get<std::vector<double>>();
  if (band.size() != 2 || !(band[0] > 0.0) || !(band[1] > band[0]))
    fail("band_rad_s must be [lo, hi] with 0 < lo < hi");
  lo = band[0];
  hi = band[1];
  const RangeKind kind = parse_kind(j.value("range_kind", std::string("middle")));
  PerfSpec p;
  p.rho = db_to_linear(bound_db);
  switch (kind) {
    case RangeKind::Low:
      p.range = table1_psi(kind, hi, 0.0);
      break;
    case RangeKind::Middle:
      p.range = table1_psi(kind, lo, hi);
      break;
    case RangeKind::High:
      p.range = table1_psi(kind, 0.0, lo);
      break;
  }
  return p;
}

}  // namespace

ProblemFile load_problem(const std::string& path) {
  const json j = load_json(path);
  ProblemFile pf;

  if (!j.contains("plant")) fail("missing plant section");
  const json& jp = j.at("plant");
  const int n = jp.value("order", -1);
  if (n < 1) fail("plant.order must be >= 1");
  auto read_bounds = [&](const char* key) {
    if (!jp.contains(key)) fail(std::string("plant.") + key + " missing");
    const auto raw = jp.at(key).get<std::vector<std::vector<double>>>();
    if (static_cast<int>(raw.size()) != n)
      fail(std::string("plant.") + key + " must have " + std::to_string(n) + " entries");
    std::vector<std::pair<double, double>> out;
    for (const auto& b : raw) {
      if (b.size() != 2 || b[0] > b[1])
        fail(std::string("plant.") + key + " entries must be well-ordered [l, u]");
      out.emplace_back(b[0], b[1]);
    }
    return out;
  };
  pf.spec.plant = IntervalPlant::from_bounds(read_bounds("a_bounds"), read_bounds("b_bounds"));

  if (!j.contains("controller")) fail("missing controller section");
  const json& jc = j.at("controller");
  const int m = jc.value("order", -1);
  if (m < 0) fail("controller.order must be >= 0");
  pf.spec.m = m;
  pf.spec.pins = Controller::make(m);
  if (jc.contains("pins")) {
    for (const auto& [key, val] : jc.at("pins").items()) {
      if (key.size() < 2 || (key[0] != 'x' && key[0] != 'y'))
        fail("pin names must look like x1 or y0");
      int idx = 0;
      try {
        idx = std::stoi(key.substr(1));
      } catch (...) {
        fail("bad pin name '" + key + "'");
      }
      const double v = val.get<double>();
      try {
        if (key[0] == 'x')
          pf.spec.pins.pin_x(idx, v);
        else
          pf.spec.pins.pin_y(idx, v);
      } catch (const std::exception& e) {
        fail(std::string("pin ") + key + ": " + e.what());
      }
    }
  }

  if (!j.contains("dc") || !j.at("dc").contains("coeffs")) fail("missing dc.coeffs");
  pf.spec.dc = Polynomial(j.at("dc").at("coeffs").get<std::vector<double>>());

  if (j.contains("specs")) {
    const json& js = j.at("specs");
    if (js.contains("sensitivity"))
      pf.spec.sensitivity =
          parse_perf(js.at("sensitivity"), pf.s_bound_db, pf.s_band_lo, pf.s_band_hi);
    if (js.contains("comp_sensitivity"))
      pf.spec.comp_sensitivity = parse_perf(js.at("comp_sensitivity"), pf.t_bound_db,
                                            pf.t_band_lo, pf.t_band_hi);
  }

  if (j.contains("verify")) {
    const json& jv = j.at("verify");
    pf.verify_samples = jv.value("samples", kDefaultRandomSamples);
    pf.seed = jv.value("seed", kDefaultSeed);
    pf.grid_points = jv.value("grid_points", kDefaultGridPoints);
    if (pf.verify_samples < 0 || pf.grid_points < 2) fail("verify settings out of range");
  }

  try {
    pf.spec.validate();
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return pf;
}

Controller load_controller(const std::string& path, int expected_order) {
  const json j = load_json(path);
  if (!j.contains("x") || !j.contains("y")) fail("controller file needs x and y arrays");
  Controller c;
  c.x = j.at("x").get<std::vector<double>>();
  c.y = j.at("y").get<std::vector<double>>();
  c.m = static_cast<int>(c.x.size()) - 1;
  c.fixed_mask.assign(static_cast<size_t>(c.pin_slots()), std::nullopt);
  if (expected_order >= 0 && c.m != expected_order)
    fail("controller order " + std::to_string(c.m) + " does not match problem order " +
         std::to_string(expected_order));
  c.validate();
  return c;
}

void save_controller(const std::string& path, const Controller& ctrl) {
  json j;
  j["order"] = ctrl.m;
  j["x"] = ctrl.x;
  j["y"] = ctrl.y;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace rfix
