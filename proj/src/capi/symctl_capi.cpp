#include "symctl/symctl.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "error.hpp"
#include "pipeline.hpp"
#include "tsys.hpp"

using namespace symctl;

struct symctl_project {
  Project project;
};

struct symctl_abstraction {
  Abstraction abs;
  std::string manifest;
};

struct symctl_synthesis {
  Quantizer quantizer;
  Strategy strategy;
  bool realizable = false;
  std::string manifest;
};

struct symctl_batch {
  SimulationConfig sim;
  BatchResult batch;
  std::string manifest;
};

namespace {

thread_local std::string g_error;

int status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::Io: return SYMCTL_E_IO;
    case ErrorKind::Unsupported: return SYMCTL_E_UNSUPPORTED;
    case ErrorKind::Internal: return SYMCTL_E_INTERNAL;
    default: return SYMCTL_E_PARAM;
  }
}

template <class F>
int guarded(F&& f) {
  try {
    g_error.clear();
    f();
    return SYMCTL_OK;
  } catch (const Error& e) {
    g_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return SYMCTL_E_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return SYMCTL_E_INTERNAL;
  } catch (...) {
    g_error = "unknown failure";
    return SYMCTL_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw Error(ErrorKind::InvalidArgument, std::string(what) + " is null");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

extern "C" {

const char* symctl_last_error(void) { return g_error.c_str(); }
const char* symctl_version(void) { return "1.0.0"; }

int symctl_project_open(const char* config_path, symctl_project** out) {
  return guarded([&] {
    need(config_path, "config path");
    need(out, "output handle");
    *out = nullptr;
    *out = new symctl_project{open_project(load_config(config_path))};
  });
}

int symctl_project_set_output(symctl_project* p, const char* dir) {
  return guarded([&] {
    need(p, "project");
    need(dir, "directory");
    p->project.config.output = dir;
  });
}

int symctl_project_set_sound_only(symctl_project* p, int on) {
  return guarded([&] {
    need(p, "project");
    p->project.params.sound_only = on != 0;
  });
}

const char* symctl_project_output(const symctl_project* p) { return p ? p->project.config.output.c_str() : ""; }
void symctl_project_free(symctl_project* p) { delete p; }

int symctl_abstract(const symctl_project* p, unsigned workers, symctl_abstraction** out) {
  return guarded([&] {
    need(p, "project");
    need(out, "output handle");
    *out = nullptr;
    auto abs = abstract_project(p->project, {.workers = workers});
    auto manifest = project_manifest(p->project, abs);
    *out = new symctl_abstraction{std::move(abs), std::move(manifest)};
  });
}

int symctl_abstraction_load(const symctl_project* p, const char* dir, symctl_abstraction** out) {
  return guarded([&] {
    need(p, "project");
    need(dir, "directory");
    need(out, "output handle");
    *out = nullptr;
    auto abs = load_abstraction(p->project, dir);
    std::string manifest = slurp(std::string(dir) + "/abstraction.manifest");
    if (manifest.empty()) manifest = project_manifest(p->project, abs);
    *out = new symctl_abstraction{std::move(abs), std::move(manifest)};
  });
}

int symctl_abstraction_write(const symctl_abstraction* a, const char* dir) {
  return guarded([&] {
    need(a, "abstraction");
    need(dir, "directory");
    write_abstraction(a->abs, dir);
    write_text(std::string(dir) + "/abstraction.manifest", a->manifest);
  });
}

uint64_t symctl_abstraction_states(const symctl_abstraction* a) { return a ? a->abs.ts.num_states() : 0; }
uint64_t symctl_abstraction_transitions(const symctl_abstraction* a) { return a ? a->abs.ts.num_transitions() : 0; }
const char* symctl_abstraction_manifest(const symctl_abstraction* a) { return a ? a->manifest.c_str() : ""; }
void symctl_abstraction_free(symctl_abstraction* a) { delete a; }

int symctl_synthesize(const symctl_project* p, const symctl_abstraction* a, symctl_synthesis** out) {
  return guarded([&] {
    need(p, "project");
    need(a, "abstraction");
    need(out, "output handle");
    *out = nullptr;
    auto r = synthesize_project(p->project, a->abs);
    auto manifest = synthesis_manifest(p->project, a->abs, r);
    *out = new symctl_synthesis{a->abs.quantizer, std::move(r.strategy), r.realizable, std::move(manifest)};
  });
}

int symctl_synthesis_load(const symctl_project* p, const char* dir, symctl_synthesis** out) {
  return guarded([&] {
    need(p, "project");
    need(dir, "directory");
    need(out, "output handle");
    *out = nullptr;
    Quantizer qz = project_quantizer(p->project);
    Strategy s = read_strategy_file(dir, qz.num_states());
    std::string manifest = slurp(std::string(dir) + "/synthesis.manifest");
    const bool realizable = manifest.rfind("verdict = REALIZABLE", 0) == 0;
    *out = new symctl_synthesis{std::move(qz), std::move(s), realizable, std::move(manifest)};
  });
}

int symctl_synthesis_write(const symctl_synthesis* s, const char* dir) {
  return guarded([&] {
    need(s, "synthesis");
    need(dir, "directory");
    write_strategy_file(dir, s->strategy);
    write_text(std::string(dir) + "/synthesis.manifest", s->manifest);
  });
}

int symctl_synthesis_realizable(const symctl_synthesis* s) { return s && s->realizable ? 1 : 0; }
uint64_t symctl_synthesis_winning(const symctl_synthesis* s) { return s ? s->strategy.winning_count() : 0; }
const char* symctl_synthesis_manifest(const symctl_synthesis* s) { return s ? s->manifest.c_str() : ""; }
void symctl_synthesis_free(symctl_synthesis* s) { delete s; }

int symctl_sim_defaults(const symctl_project* p, symctl_sim_options* out) {
  return guarded([&] {
    need(p, "project");
    need(out, "options");
    const auto& c = p->project.config.sim;
    *out = symctl_sim_options{c.runs,     c.horizon, c.seed, c.delta, c.eps_meas,
                              c.sampling == NoiseSampling::Corners ? 1 : 0, 0, c.csv_runs};
  });
}

int symctl_simulate(const symctl_project* p, const symctl_synthesis* s, const symctl_sim_options* o,
                    symctl_batch** out) {
  return guarded([&] {
    need(p, "project");
    need(s, "synthesis");
    need(o, "options");
    need(out, "output handle");
    *out = nullptr;
    if (!(o->delta >= 0) || !(o->eps_meas >= 0)) throw Error(ErrorKind::Parameter, "noise radii must be non-negative");
    SimulationConfig sim;
    sim.runs = o->runs;
    sim.horizon = o->horizon;
    sim.seed = o->seed;
    sim.delta = o->delta;
    sim.eps_meas = o->eps_meas;
    sim.sampling = o->corners ? NoiseSampling::Corners : NoiseSampling::Uniform;
    sim.csv_runs = o->csv_runs;
    auto b = simulate_project(p->project, s->quantizer, s->strategy, sim, o->workers);
    auto manifest = simulation_manifest(p->project, sim, b);
    *out = new symctl_batch{sim, std::move(b), std::move(manifest)};
  });
}

void symctl_batch_counts(const symctl_batch* b, uint64_t* sat, uint64_t* violated, uint64_t* unknown) {
  if (sat) *sat = b ? b->batch.sat : 0;
  if (violated) *violated = b ? b->batch.violated : 0;
  if (unknown) *unknown = b ? b->batch.unknown : 0;
}

int symctl_batch_verdict(const symctl_batch* b, uint64_t i) {
  if (!b || i >= b->batch.verdicts.size()) return -1;
  return static_cast<int>(b->batch.verdicts[i]);
}

const char* symctl_batch_summary(const symctl_batch* b) { return b ? b->manifest.c_str() : ""; }

int symctl_batch_write(const symctl_batch* b, const char* dir) {
  return guarded([&] {
    need(b, "batch");
    need(dir, "directory");
    write_batch(dir, b->sim, b->batch, b->manifest);
  });
}

void symctl_batch_free(symctl_batch* b) { delete b; }

int symctl_check(const char* ts1_path, const char* ts2_path, const char* relation_path, const char* mode, int* pass,
                 char* buf, size_t buf_size) {
  return guarded([&] {
    need(ts1_path, "ts1 path");
    need(ts2_path, "ts2 path");
    need(relation_path, "relation path");
    need(mode, "mode");
    need(pass, "pass flag");
    CheckMode m;
    const std::string ms = mode;
    if (ms == "abstraction") m = CheckMode::Abstraction;
    else if (ms == "feedback") m = CheckMode::FeedbackRefinement;
    else if (ms == "alternating") m = CheckMode::AlternatingSimulation;
    else throw Error(ErrorKind::Parameter, "unknown mode '" + ms + "'; use abstraction, feedback or alternating");
    const auto t1 = load_transition_system(ts1_path);
    const auto t2 = load_transition_system(ts2_path);
    const auto alpha = load_relation(relation_path, t1, t2);
    const auto r = check_relation(m, t1, t2, alpha);
    *pass = r.pass ? 1 : 0;
    std::string report = std::string(r.pass ? "PASS" : "FAIL") + " " + ms;
    if (!r.pass) report += std::string(" violation=") + to_string(r.violated);
    if (!r.message.empty()) report += ": " + r.message;
    if (buf && buf_size) {
      const std::size_t n = std::min(buf_size - 1, report.size());
      std::memcpy(buf, report.data(), n);
      buf[n] = '\0';
    }
  });
}

}  // extern "C"
