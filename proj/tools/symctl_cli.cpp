#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "symctl/symctl.h"

namespace {

struct Common {
  std::string config;
  std::string out;
  unsigned workers = 0;
  bool sound_only = false;
};

int fail(int code) {
  std::fprintf(stderr, "error: %s\n", symctl_last_error());
  return code;
}

using ProjectPtr = std::unique_ptr<symctl_project, decltype(&symctl_project_free)>;
using AbstractionPtr = std::unique_ptr<symctl_abstraction, decltype(&symctl_abstraction_free)>;
using SynthesisPtr = std::unique_ptr<symctl_synthesis, decltype(&symctl_synthesis_free)>;
using BatchPtr = std::unique_ptr<symctl_batch, decltype(&symctl_batch_free)>;

int open(const Common& c, ProjectPtr& p) {
  symctl_project* raw = nullptr;
  if (int rc = symctl_project_open(c.config.c_str(), &raw)) return rc;
  p.reset(raw);
  if (!c.out.empty())
    if (int rc = symctl_project_set_output(raw, c.out.c_str())) return rc;
  if (c.sound_only)
    if (int rc = symctl_project_set_sound_only(raw, 1)) return rc;
  return SYMCTL_OK;
}

int build(const Common& c, const symctl_project* p, AbstractionPtr& a) {
  symctl_abstraction* raw = nullptr;
  if (int rc = symctl_abstract(p, c.workers, &raw)) return rc;
  a.reset(raw);
  return symctl_abstraction_write(raw, symctl_project_output(p));
}

int cmd_abstract(const Common& c) {
  ProjectPtr p(nullptr, symctl_project_free);
  AbstractionPtr a(nullptr, symctl_abstraction_free);
  if (int rc = open(c, p)) return fail(rc);
  if (int rc = build(c, p.get(), a)) return fail(rc);
  std::cout << symctl_abstraction_manifest(a.get());
  return 0;
}

int cmd_synthesize(const Common& c) {
  ProjectPtr p(nullptr, symctl_project_free);
  AbstractionPtr a(nullptr, symctl_abstraction_free);
  SynthesisPtr s(nullptr, symctl_synthesis_free);
  if (int rc = open(c, p)) return fail(rc);
  const std::string dir = symctl_project_output(p.get());
  symctl_abstraction* raw = nullptr;
  if (std::filesystem::exists(dir + "/abstraction.bin") && symctl_abstraction_load(p.get(), dir.c_str(), &raw) == 0) {
    a.reset(raw);
  } else if (int rc = build(c, p.get(), a)) {
    return fail(rc);
  }
  symctl_synthesis* sr = nullptr;
  if (int rc = symctl_synthesize(p.get(), a.get(), &sr)) return fail(rc);
  s.reset(sr);
  if (int rc = symctl_synthesis_write(sr, dir.c_str())) return fail(rc);
  std::cout << symctl_synthesis_manifest(sr);
  return 0;
}

struct SimFlags {
  std::optional<std::uint64_t> seed, runs, horizon;
  std::optional<double> delta, eps_meas;
  bool corners = false;
};

int cmd_simulate(const Common& c, const SimFlags& f) {
  ProjectPtr p(nullptr, symctl_project_free);
  SynthesisPtr s(nullptr, symctl_synthesis_free);
  BatchPtr b(nullptr, symctl_batch_free);
  if (int rc = open(c, p)) return fail(rc);
  const std::string dir = symctl_project_output(p.get());
  symctl_synthesis* sr = nullptr;
  if (int rc = symctl_synthesis_load(p.get(), dir.c_str(), &sr)) return fail(rc);
  s.reset(sr);
  symctl_sim_options o{};
  if (int rc = symctl_sim_defaults(p.get(), &o)) return fail(rc);
  if (f.seed) o.seed = *f.seed;
  if (f.runs) o.runs = *f.runs;
  if (f.horizon) o.horizon = *f.horizon;
  if (f.delta) o.delta = *f.delta;
  if (f.eps_meas) o.eps_meas = *f.eps_meas;
  if (f.corners) o.corners = 1;
  o.workers = c.workers;
  symctl_batch* br = nullptr;
  if (int rc = symctl_simulate(p.get(), sr, &o, &br)) return fail(rc);
  b.reset(br);
  if (int rc = symctl_batch_write(br, dir.c_str())) return fail(rc);
  std::cout << symctl_batch_summary(br);
  return 0;
}

int cmd_check(const std::string& t1, const std::string& t2, const std::string& rel, const std::string& mode) {
  int pass = 0;
  char report[4096];
  if (int rc = symctl_check(t1.c_str(), t2.c_str(), rel.c_str(), mode.c_str(), &pass, report, sizeof report))
    return fail(rc);
  std::cout << report << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic controller synthesis for nonlinear systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(symctl_version()));

  Common c;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config, "Project YAML file")->required();
    sub->add_option("--out", c.out, "Output directory (overrides the config)");
    sub->add_option("--workers", c.workers, "Worker threads, 0 for all cores");
  };

  auto* abs = app.add_subcommand("abstract", "Build the finite abstraction");
  add_common(abs);
  abs->add_flag("--sound-only", c.sound_only, "Skip the completeness inequalities");

  auto* syn = app.add_subcommand("synthesize", "Synthesize a controller (builds the abstraction if missing)");
  add_common(syn);
  syn->add_flag("--sound-only", c.sound_only, "Skip the completeness inequalities");

  SimFlags f;
  auto* sim = app.add_subcommand("simulate", "Closed-loop simulations of the synthesized controller");
  add_common(sim);
  sim->add_option("--seed", f.seed, "First seed");
  sim->add_option("--runs", f.runs, "Number of runs");
  sim->add_option("--horizon", f.horizon, "Steps per run");
  sim->add_option("--delta", f.delta, "Disturbance radius")->check(CLI::NonNegativeNumber);
  sim->add_option("--eps-meas", f.eps_meas, "Measurement error radius")->check(CLI::NonNegativeNumber);
  sim->add_flag("--corners", f.corners, "Draw noise from the box corners");

  std::string t1, t2, rel, mode = "abstraction";
  auto* chk = app.add_subcommand("check", "Check a relation between two transition systems");
  chk->add_option("ts1", t1, "Concrete transition system")->required();
  chk->add_option("ts2", t2, "Abstract transition system")->required();
  chk->add_option("relation", rel, "Relation file")->required();
  chk->add_option("--mode", mode, "abstraction, feedback or alternating")
      ->check(CLI::IsMember({"abstraction", "feedback", "alternating"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    if (rc == 0) return 0;
    return e.get_exit_code() == static_cast<int>(CLI::ExitCodes::FileError) ? SYMCTL_E_IO : SYMCTL_E_PARAM;
  }
  if (*abs) return cmd_abstract(c);
  if (*syn) return cmd_synthesize(c);
  if (*sim) return cmd_simulate(c, f);
  return cmd_check(t1, t2, rel, mode);
}
