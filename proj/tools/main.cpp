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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "problem_io.hpp"
#include "rfix/synth.hpp"
#include "rfix/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitNumerical = 3;

void apply_seed_env(rfix::ProblemFile& pf) {
  if (const char* env = std::getenv("RFIX_SEED")) pf.seed = std::strtoull(env, nullptr, 10);
}

void apply_range_kind(rfix::ProblemFile& pf, const std::string& kind_name) {
  if (kind_name.empty()) return;
  rfix::RangeKind kind;
  if (kind_name == "low")
    kind = rfix::RangeKind::Low;
  else if (kind_name == "middle")
    kind = rfix::RangeKind::Middle;
  else if (kind_name == "high")
    kind = rfix::RangeKind::High;
  else
    throw std::runtime_error("--range-kind must be low, middle or high");
  auto rebuild = [&](std::optional<rfix::PerfSpec>& p, double lo, double hi) {
    if (!p) return;
    switch (kind) {
      case rfix::RangeKind::Low: p->range = rfix::table1_psi(kind, hi, 0.0); break;
      case rfix::RangeKind::Middle: p->range = rfix::table1_psi(kind, lo, hi); break;
      case rfix::RangeKind::High: p->range = rfix::table1_psi(kind, 0.0, lo); break;
    }
  };
  rebuild(pf.spec.sensitivity, pf.s_band_lo, pf.s_band_hi);
  rebuild(pf.spec.comp_sensitivity, pf.t_band_lo, pf.t_band_hi);
}

std::string status_word(rfix::SdpStatus s) {
  switch (s) {
    case rfix::SdpStatus::Feasible: return "feasible";
    case rfix::SdpStatus::Infeasible: return "infeasible";
    default: return "error";
  }
}

int status_exit(rfix::SdpStatus s) {
  switch (s) {
    case rfix::SdpStatus::Feasible: return kExitOk;
    case rfix::SdpStatus::Infeasible: return kExitInfeasible;
    default: return kExitNumerical;
  }
}

void write_certificates(const fs::path& out, const rfix::SynthesisResult& res) {
  json j;
  j["status"] = status_word(res.outcome.status);
  j["margin"] = res.outcome.achieved_margin;
  j["iterations"] = res.outcome.iterations;
  j["runtime_s"] = res.outcome.runtime_s;
  j["message"] = res.outcome.message;
  if (!res.infeasible_subset.empty()) j["infeasible_subset"] = res.infeasible_subset;
  json lmis = json::array();
  for (const auto& r : res.lmi_reports) {
    lmis.push_back({{"name", r.name},
                    {"max_eigenvalue", r.max_eigenvalue},
                    {"margin", r.margin},
                    {"satisfied", r.satisfied}});
  }
  j["lmis"] = lmis;
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out.string());
  os << j.dump(2) << '\n';
}

void write_summary(const fs::path& out, const std::string& status, double margin,
                   const std::vector<std::string>& extra) {
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out.string());
  os << "status=" << status << " margin=" << margin << '\n';
  for (const auto& line : extra) os << line << '\n';
}

struct SweepTarget {
  rfix::SweepKind kind;
  double lo, hi, bound_db;
  const char* csv_name;
  const char* label;
};

std::vector<SweepTarget> sweep_targets(const rfix::ProblemFile& pf) {
  std::vector<SweepTarget> out;
  if (pf.spec.sensitivity)
    out.push_back({rfix::SweepKind::Sensitivity, pf.s_band_lo, pf.s_band_hi, pf.s_bound_db,
                   "bode_s.csv", "S"});
  if (pf.spec.comp_sensitivity)
    out.push_back({rfix::SweepKind::CompSensitivity, pf.t_band_lo, pf.t_band_hi,
                   pf.t_bound_db, "bode_t.csv", "T"});
  return out;
}

int cmd_synth(const std::string& problem, const fs::path& outdir,
              const std::string& kind_override) {
  rfix::ProblemFile pf = rfix::load_problem(problem);
  apply_seed_env(pf);
  apply_range_kind(pf, kind_override);
  fs::create_directories(outdir);

  const rfix::SynthesisResult res = rfix::synthesize(pf.spec);
  write_certificates(outdir / "certificates.json", res);

  std::vector<std::string> extra;
  extra.push_back("message=" + res.outcome.message);
  if (!res.infeasible_subset.empty())
    extra.push_back("infeasible_subset=" + res.infeasible_subset);
  if (res.outcome.status == rfix::SdpStatus::Feasible) {
    rfix::save_controller((outdir / "controller.json").string(), res.controller);
    std::ostringstream cs;
    cs << "controller_x=";
    for (double v : res.controller.x) cs << v << ' ';
    cs << " controller_y=";
    for (double v : res.controller.y) cs << v << ' ';
    extra.push_back(cs.str());
  }
  write_summary(outdir / "summary.txt", status_word(res.outcome.status),
                res.outcome.achieved_margin, extra);
  std::cout << "status=" << status_word(res.outcome.status)
            << " margin=" << res.outcome.achieved_margin << '\n';
  return status_exit(res.outcome.status);
}

int cmd_check(const std::string& problem, const std::string& controller,
              const fs::path& outdir, const std::string& kind_override) {
  rfix::ProblemFile pf = rfix::load_problem(problem);
  apply_seed_env(pf);
  apply_range_kind(pf, kind_override);
  fs::create_directories(outdir);
  const rfix::Controller ctrl = rfix::load_controller(controller, pf.spec.m);

  const rfix::SynthesisResult res = rfix::check_controller(pf.spec, ctrl);
  write_certificates(outdir / "certificates.json", res);

  const auto samples = rfix::make_samples(pf.spec.plant.n, pf.verify_samples, pf.seed);
  {
    std::ofstream os(outdir / "stability.csv");
    rfix::write_stability_csv(os, pf.spec.plant, ctrl, samples);
  }
  bool oracles_pass = true;
  std::vector<std::string> extra;
  int failing = -1;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!rfix::closed_loop_stable(pf.spec.plant, ctrl, samples[i])) {
      oracles_pass = false;
      failing = static_cast<int>(i);
      break;
    }
  }
  if (failing >= 0) {
    std::ostringstream fl;
    fl << "failing_sample=" << failing << " (" << samples[failing].provenance << ") delta_a=";
    for (double d : samples[failing].delta_a) fl << d << ' ';
    fl << " delta_b=";
    for (double d : samples[failing].delta_b) fl << d << ' ';
    extra.push_back(fl.str());
  } else {
    for (const auto& tgt : sweep_targets(pf)) {
      const rfix::SweepReport rep = rfix::sweep_sensitivity(
          pf.spec.plant, ctrl, samples, tgt.lo, tgt.hi, tgt.bound_db, tgt.kind,
          pf.spec.dc, pf.grid_points);
      std::ofstream os(outdir / tgt.csv_name);
      rfix::write_bode_csv(os, rep);
      std::ostringstream ln;
      ln << "sweep_" << tgt.label << "=" << (rep.pass ? "pass" : "fail")
         << " worst_margin_db=" << rep.worst_margin_db;
      extra.push_back(ln.str());
      if (!rep.pass) oracles_pass = false;
    }
  }

  const bool lmi_ok = res.outcome.status == rfix::SdpStatus::Feasible;
  extra.push_back(std::string("lmi=") + status_word(res.outcome.status));
  if (!res.infeasible_subset.empty())
    extra.push_back("infeasible_subset=" + res.infeasible_subset);
  extra.push_back(std::string("oracles=") + (oracles_pass ? "pass" : "fail"));

  const std::string status =
      (res.outcome.status == rfix::SdpStatus::NumericalFailure) ? "error"
      : (lmi_ok && oracles_pass)                                ? "feasible"
                                                                : "infeasible";
  write_summary(outdir / "summary.txt", status, res.outcome.achieved_margin, extra);
  std::cout << "status=" << status << " margin=" << res.outcome.achieved_margin << '\n';
  for (const auto& line : extra) std::cout << line << '\n';
  if (res.outcome.status == rfix::SdpStatus::NumericalFailure) return kExitNumerical;
  return (lmi_ok && oracles_pass) ? kExitOk : kExitInfeasible;
}

int cmd_bode(const std::string& problem, const std::string& controller,
             const fs::path& outdir, const std::string& kind_override) {
  rfix::ProblemFile pf = rfix::load_problem(problem);
  apply_seed_env(pf);
  apply_range_kind(pf, kind_override);
  fs::create_directories(outdir);
  const rfix::Controller ctrl = rfix::load_controller(controller, pf.spec.m);
  const auto samples = rfix::make_samples(pf.spec.plant.n, pf.verify_samples, pf.seed);
  for (const auto& tgt : sweep_targets(pf)) {
    const rfix::SweepReport rep = rfix::sweep_sensitivity(
        pf.spec.plant, ctrl, samples, tgt.lo, tgt.hi, tgt.bound_db, tgt.kind, pf.spec.dc,
        pf.grid_points);
    std::ofstream os(outdir / tgt.csv_name);
    rfix::write_bode_csv(os, rep);
    std::cout << tgt.csv_name << ": worst_margin_db=" << rep.worst_margin_db
              << (rep.all_samples_stable ? "" : " (unstable samples skipped)") << '\n';
  }
  return kExitOk;
}

std::vector<double> parse_list(const std::string& s, int n) {
  std::vector<double> out;
  if (s.empty()) return std::vector<double>(n, 0.0);
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
  if (static_cast<int>(out.size()) != n)
    throw std::runtime_error("expected " + std::to_string(n) + " comma-separated values");
  return out;
}

int cmd_step(const std::string& problem, const std::string& controller,
             const fs::path& outdir, const std::string& da, const std::string& db,
             double t_end, double dt) {
  rfix::ProblemFile pf = rfix::load_problem(problem);
  fs::create_directories(outdir);
  const rfix::Controller ctrl = rfix::load_controller(controller, pf.spec.m);
  rfix::UncertaintySample sample;
  sample.delta_a = parse_list(da, pf.spec.plant.n);
  sample.delta_b = parse_list(db, pf.spec.plant.n);
  sample.provenance = "cli";
  for (double d : sample.delta_a)
    if (d < -1.0 || d > 1.0) throw std::runtime_error("delta values must lie in [-1, 1]");
  for (double d : sample.delta_b)
    if (d < -1.0 || d > 1.0) throw std::runtime_error("delta values must lie in [-1, 1]");
  rfix::StepResult sr;
  try {
    sr = rfix::step_response(pf.spec.plant, ctrl, sample, t_end, dt);
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << '\n';
    return kExitInfeasible;
  }
  std::ofstream os(outdir / "step.csv");
  rfix::write_step_csv(os, sr);
  std::cout << "final_value=" << sr.final_value << " dt=" << sr.dt << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust fixed-order controller synthesis and verification"};
  app.require_subcommand(1);

  std::string problem, controller, outdir = ".", kind_override, da, db;
  double t_end = 50.0, dt = 0.0;

  auto add_common = [&](CLI::App* sub, bool with_ctrl) {
    sub->add_option("problem", problem, "problem JSON file")->required();
    if (with_ctrl) sub->add_option("controller", controller, "controller JSON file")->required();
    sub->add_option("-o,--out", outdir, "output directory");
    sub->add_option("--range-kind", kind_override,
                    "override range kind for both bounds (low|middle|high)");
  };

  CLI::App* synth = app.add_subcommand("synth", "synthesize a controller");
  add_common(synth, false);
  CLI::App* check = app.add_subcommand("check", "audit a given controller");
  add_common(check, true);
  CLI::App* bode = app.add_subcommand("bode", "emit sweep envelopes only");
  add_common(bode, true);
  CLI::App* step = app.add_subcommand("step", "unit-step response at one sample");
  add_common(step, true);
  step->add_option("--delta-a", da, "comma-separated denominator interval values");
  step->add_option("--delta-b", db, "comma-separated numerator interval values");
  step->add_option("--t-end", t_end, "simulation horizon (s)");
  step->add_option("--dt", dt, "fixed RK4 step (default: auto)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(problem, outdir, kind_override);
    if (check->parsed()) return cmd_check(problem, controller, outdir, kind_override);
    if (bode->parsed()) return cmd_bode(problem, controller, outdir, kind_override);
    if (step->parsed()) return cmd_step(problem, controller, outdir, da, db, t_end, dt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
