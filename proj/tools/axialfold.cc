/* Copyright 2026 The AxialFold Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


// axialfold: memory analysis, DAP simulation, chunk planning and stream
// scheduling for evoformer blocks. Reports are JSON unless --format table.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.h"

namespace {

using axial::cli::Outcome;

struct Common {
  std::string format = "json";
  std::string out;
  bool no_timestamp = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "table"}));
  sub->add_option("--out", c.out, "Write the report to this file instead of stdout");
  sub->add_flag("--no-timestamp", c.no_timestamp, "Leave the timestamp out of the report");
}

void add_dims(CLI::App* sub, axial::cli::DimOptions& d) {
  sub->add_option("--n-seq", d.n_seq, "MSA sequences")->capture_default_str();
  sub->add_option("--n-res", d.n_res, "Residues")->capture_default_str();
  sub->add_option("--h-msa", d.h_msa, "MSA hidden size")->capture_default_str();
  sub->add_option("--h-pair", d.h_pair, "Pair hidden size")->capture_default_str();
  sub->add_option("--heads", d.heads, "Attention heads for both stacks")->capture_default_str();
  sub->add_option("--hidden-proj", d.hidden_proj, "Outer-product and triangle projection size")
      ->capture_default_str();
  sub->add_option("--seed", d.seed, "Seed for parameters and inputs")->capture_default_str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int emit(Outcome o, const Common& c) {
  if (!c.no_timestamp) o.report["timestamp"] = utc_now();
  const std::string text = c.format == "table" ? axial::cli::render_table(o.report) : o.report.dump(2) + "\n";
  if (c.out.empty()) {
    (o.exit_code == axial::cli::kOk ? std::cout : std::cerr) << text;
  } else {
    std::ofstream f(c.out);
    if (!f) {
      std::cerr << "cannot write " << c.out << "\n";
      return axial::cli::kUsage;
    }
    f << text;
    if (o.exit_code != axial::cli::kOk && o.report.contains("message"))
      std::cerr << o.report["message"].get<std::string>() << "\n";
  }
  return o.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"axialfold: evoformer memory, parallelism and scheduling tools"};
  app.require_subcommand(1);
  Common common;

  axial::cli::AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Trace a block and report its memory profile");
  add_dims(a, analyze.dims);
  add_common(a, common);
  a->add_option("--layers", analyze.layers, "Layers for the attention activation estimate")
      ->capture_default_str();
  a->add_option("--element-size", analyze.element_size, "Bytes per element")->capture_default_str();
  a->add_option("--graph", analyze.graph_in, "Analyze this graph JSON instead of tracing")
      ->check(CLI::ExistingFile);
  a->add_option("--graph-out", analyze.graph_out, "Write the analyzed graph JSON here");

  axial::cli::CommVolumeOptions vol;
  auto* v = app.add_subcommand("commvolume", "Per-block communication volume, TP versus DAP");
  add_common(v, common);
  v->add_option("--k", vol.k, "Activation size K")->required();
  v->add_option("--devices", vol.devices, "Device count")->required();
  v->add_option("--heads", vol.heads, "Attention heads")->capture_default_str();
  v->add_option("--mode", vol.mode, "Which scheme to report")
      ->check(CLI::IsMember({"both", "tp", "dap"}))
      ->capture_default_str();

  axial::cli::SimulateOptions sim;
  std::uint64_t order_seed = 0;
  auto* s = app.add_subcommand("simulate", "Run a block under DAP and check it against one device");
  add_dims(s, sim.dims);
  add_common(s, common);
  s->add_option("--devices", sim.devices, "Device count")->capture_default_str();
  s->add_option("--element-size", sim.element_size, "Bytes per element")->capture_default_str();
  s->add_flag("--concurrent", sim.concurrent, "Run devices on threads");
  auto* order_opt = s->add_option("--device-order-seed", order_seed, "Shuffle device execution order");

  axial::cli::PlanOptions plan;
  std::int64_t budget = 0;
  double budget_frac = 0.0;
  auto* p = app.add_subcommand("plan", "Search a chunk plan under a memory budget");
  add_dims(p, plan.dims);
  add_common(p, common);
  p->add_option("--element-size", plan.element_size, "Bytes per element")->capture_default_str();
  auto* budget_opt = p->add_option("--budget", budget, "Budget in bytes");
  auto* frac_opt = p->add_option("--budget-frac", budget_frac, "Budget as a fraction of the unchunked peak");
  budget_opt->excludes(frac_opt);
  frac_opt->excludes(budget_opt);
  p->add_option("--window", plan.window, "Search window in nodes")->capture_default_str();

  axial::cli::RunPlanOptions run;
  auto* r = app.add_subcommand("run-plan", "Execute a plan file and measure its peak");
  add_common(r, common);
  r->add_option("--plan", run.plan_file, "Plan file written by plan")->required()->check(CLI::ExistingFile);

  axial::cli::ScheduleOptions sched;
  auto* t = app.add_subcommand("schedule", "Makespans of a compute/comm timeline");
  add_common(t, common);
  t->add_option("--timeline", sched.timeline_file, "Timeline JSON (built-in example if absent)")
      ->check(CLI::ExistingFile);
  t->add_option("--mode", sched.mode, "Schedules to report")
      ->check(CLI::IsMember({"both", "sync", "async"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    std::cerr << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
    return axial::cli::kUsage;
  }

  if (p->parsed()) {
    if (budget_opt->count() + frac_opt->count() != 1) {
      std::cerr << "plan: give exactly one of --budget and --budget-frac\n" << p->help();
      return axial::cli::kUsage;
    }
    if (budget_opt->count() > 0) plan.budget = budget;
    if (frac_opt->count() > 0) plan.budget_frac = budget_frac;
  }
  if (order_opt->count() > 0) sim.order_seed = order_seed;

  using axial::cli::guarded;
  if (a->parsed()) return emit(guarded([&] { return axial::cli::cmd_analyze(analyze); }), common);
  if (v->parsed()) return emit(guarded([&] { return axial::cli::cmd_commvolume(vol); }), common);
  if (s->parsed()) return emit(guarded([&] { return axial::cli::cmd_simulate(sim); }), common);
  if (p->parsed()) return emit(guarded([&] { return axial::cli::cmd_plan(plan); }), common);
  if (r->parsed()) return emit(guarded([&] { return axial::cli::cmd_run_plan(run); }), common);
  return emit(guarded([&] { return axial::cli::cmd_schedule(sched); }), common);
}
