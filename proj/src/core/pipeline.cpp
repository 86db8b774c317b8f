#include "pipeline.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace symctl {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::Parameter, "config: " + what); }

double number(const YAML::Node& n, const std::string& what) {
  if (!n || !n.IsScalar()) bad(what + " must be a number");
  const std::string& s = n.Scalar();
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && end == s.data() + s.size()) return v;
  try {
    return eval_constant(parse_expr(s, SymbolTable{}));
  } catch (const Error&) {
    bad(what + ": '" + s + "' is not a number");
  }
}

std::uint64_t integer(const YAML::Node& n, const std::string& what) {
  if (!n || !n.IsScalar()) bad(what + " must be an integer");
  const std::string& s = n.Scalar();
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) bad(what + ": '" + s + "' is not a non-negative integer");
  return v;
}

bool boolean(const YAML::Node& n, const std::string& what) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    bad(what + " must be true or false");
  }
}

std::vector<double> numbers(const YAML::Node& n, const std::string& what) {
  if (n.IsScalar()) return {number(n, what)};
  if (!n.IsSequence() || n.size() == 0) bad(what + " must be a number or a list of numbers");
  std::vector<double> out;
  for (const auto& e : n) out.push_back(number(e, what));
  return out;
}

Box box(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence() || n.size() == 0) bad(what + " must be a list of [lo, hi] pairs");
  std::vector<Interval> ivs;
  for (const auto& e : n) {
    if (!e.IsSequence() || e.size() != 2) bad(what + " must be a list of [lo, hi] pairs");
    const double lo = number(e[0], what), hi = number(e[1], what);
    if (!(lo <= hi)) bad(what + " has an interval with lo > hi");
    ivs.emplace_back(lo, hi);
  }
  return Box(std::move(ivs));
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void collect_atoms(const Ltl& f, std::vector<std::string>& out) {
  if (!f) return;
  if (f->op == LtlOp::Atom) out.push_back(f->atom);
  collect_atoms(f->lhs, out);
  collect_atoms(f->rhs, out);
}

}  // namespace

ProjectConfig parse_config(const std::string& yaml, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    bad(std::string("YAML: ") + e.what());
  }
  if (!root.IsMap()) bad("top level must be a mapping");
  for (const auto& kv : root) {
    const auto k = kv.first.as<std::string>();
    if (k != "model" && k != "atlas" && k != "spec" && k != "initial" && k != "params" && k != "simulation" &&
        k != "output")
      bad("unknown key '" + k + "'");
  }
  ProjectConfig c;
  if (!root["model"]) bad("missing 'model'");
  c.model_path = resolve(base_dir, root["model"].as<std::string>());
  if (!root["spec"]) bad("missing 'spec'");
  c.spec = root["spec"].as<std::string>();
  if (root["initial"]) c.initial = root["initial"].as<std::string>();
  c.output = resolve(base_dir, root["output"] ? root["output"].as<std::string>() : std::string("out"));

  if (const auto a = root["atlas"]) {
    if (!a.IsMap()) bad("'atlas' must map names to box lists");
    for (const auto& kv : a) {
      const auto name = kv.first.as<std::string>();
      if (!kv.second.IsSequence()) bad("region '" + name + "' must be a list of boxes");
      std::vector<Box> boxes;
      for (const auto& b : kv.second) boxes.push_back(box(b, "region '" + name + "'"));
      c.atlas.emplace_back(name, std::move(boxes));
    }
  }

  if (const auto p = root["params"]) {
    if (!p.IsMap()) bad("'params' must be a mapping");
    for (const auto& kv : p) {
      const auto k = kv.first.as<std::string>();
      const auto& v = kv.second;
      if (k == "delta1") c.params.delta1 = number(v, k);
      else if (k == "delta2") c.params.delta2 = number(v, k);
      else if (k == "eps1") c.params.eps1 = number(v, k);
      else if (k == "eps2") c.params.eps2 = number(v, k);
      else if (k == "eta") c.params.eta = numbers(v, k);
      else if (k == "mu") c.params.mu = numbers(v, k);
      else if (k == "eps") c.params.eps = number(v, k);
      else if (k == "sound_only") c.params.sound_only = boolean(v, k);
      else if (k == "lipschitz") {
        if (!(v.IsScalar() && v.Scalar() == "auto")) c.lipschitz = number(v, k);
      } else if (k == "lipschitz_pad") {
        const auto pads = numbers(v, k);
        if (pads.size() != 2) bad("lipschitz_pad must be [state_pad, input_pad]");
        c.lipschitz_state_pad = pads[0];
        c.lipschitz_input_pad = pads[1];
      } else if (k == "inclusion") {
        const auto s = v.as<std::string>();
        if (s == "natural") c.params.inclusion = InclusionKind::Natural;
        else if (s == "centered") c.params.inclusion = InclusionKind::Centered;
        else if (s == "hybrid") c.params.inclusion = InclusionKind::Hybrid;
        else bad("inclusion must be natural, centered or hybrid");
      } else if (k == "periodic") {
        if (!v.IsSequence()) bad("periodic must be a list of state names");
        for (const auto& e : v) c.periodic.push_back(e.as<std::string>());
      } else {
        bad("unknown parameter '" + k + "'");
      }
    }
  }
  if (c.params.eta.empty() || c.params.mu.empty()) bad("params.eta and params.mu are required");

  if (const auto s = root["simulation"]) {
    if (!s.IsMap()) bad("'simulation' must be a mapping");
    for (const auto& kv : s) {
      const auto k = kv.first.as<std::string>();
      const auto& v = kv.second;
      if (k == "runs") c.sim.runs = integer(v, k);
      else if (k == "horizon") c.sim.horizon = integer(v, k);
      else if (k == "seed") c.sim.seed = integer(v, k);
      else if (k == "csv_runs") c.sim.csv_runs = integer(v, k);
      else if (k == "delta") c.sim.delta = number(v, k);
      else if (k == "eps_meas") c.sim.eps_meas = number(v, k);
      else if (k == "sampling") {
        const auto m = v.as<std::string>();
        if (m == "uniform") c.sim.sampling = NoiseSampling::Uniform;
        else if (m == "corners") c.sim.sampling = NoiseSampling::Corners;
        else bad("sampling must be uniform or corners");
      } else {
        bad("unknown simulation key '" + k + "'");
      }
    }
  }
  for (double r : {c.params.delta1, c.params.delta2, c.params.eps1, c.params.eps2, c.params.eps, c.sim.delta,
                   c.sim.eps_meas, c.lipschitz_state_pad, c.lipschitz_input_pad})
    if (!(r >= 0)) bad("radii must be non-negative");
  return c;
}

ProjectConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto c = parse_config(ss.str(), fs::path(path).parent_path().string());
  c.path = path;
  return c;
}

Project open_project(ProjectConfig config) {
  SystemModel model = SystemModel::from_file(config.model_path);
  for (const auto& name : config.periodic) {
    int k = 0;
    if (name.size() < 2 || name[0] != 'x' || std::from_chars(name.data() + 1, name.data() + name.size(), k).ec != std::errc() ||
        k < 1 || static_cast<std::size_t>(k) > model.state_dim())
      bad("periodic entry '" + name + "' is not a state name");
    model.periodic[k - 1] = true;
  }
  PropositionAtlas atlas(model.X());
  for (const auto& [name, boxes] : config.atlas) {
    for (const auto& b : boxes)
      if (b.dims() != model.state_dim()) bad("region '" + name + "' has the wrong dimension");
    atlas.add(name, boxes);
  }
  Ltl formula = parse_ltl(config.spec, atlas.names());
  const Ltl pnf = to_pnf(formula, complement_name);
  std::vector<std::string> atoms;
  collect_atoms(pnf, atoms);
  for (const auto& a : atoms)
    if (a.size() > 1 && a[0] == '!' && !atlas.find(a) && atlas.find(a.substr(1))) atlas.add_complement(a.substr(1), a);
  Fragment fragment = classify(pnf);

  AbstractionParams params = config.params;
  if (config.lipschitz)
    params.L = *config.lipschitz;
  else if (model.lipschitz_override)
    params.L = *model.lipschitz_override;
  else
    params.L = lipschitz_blocks(model, config.lipschitz_state_pad, config.lipschitz_input_pad).combined();

  std::string init = config.initial;
  if (init.empty() && fragment.kind != FragmentKind::Unsupported && fragment.initial->op == LtlOp::Atom)
    init = fragment.initial->atom;
  std::vector<Box> region;
  if (!init.empty()) {
    const auto idx = atlas.find(init);
    if (!idx) bad("initial region '" + init + "' is not declared in the atlas");
    region = atlas.region(*idx);
  }
  return Project{std::move(config), std::move(model), std::move(atlas), std::move(formula), std::move(fragment),
                 std::move(params), std::move(region)};
}

Quantizer project_quantizer(const Project& p) {
  return Quantizer(p.model.X(), p.model.U(), p.params.eta, p.params.mu, p.model.periodic);
}

Abstraction abstract_project(const Project& p, const BuildOptions& options) {
  return build_abstraction(p.model, p.atlas, p.params, options);
}

Abstraction load_abstraction(const Project& p, const std::string& dir) {
  std::ifstream in(dir + "/abstraction.bin", std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + dir + "/abstraction.bin");
  TransitionSystem ts = read_binary(in);
  Quantizer qz = project_quantizer(p);
  if (ts.num_states() != qz.num_states() || ts.num_actions() != qz.num_actions())
    bad("stored abstraction in " + dir + " does not match the config grid");
  const auto names = p.atlas.names();
  if (ts.propositions() != names) bad("stored abstraction in " + dir + " has different propositions");
  return Abstraction{std::move(ts), std::move(qz), p.params, validate_params(p.params), 0.0, 0};
}

std::string project_manifest(const Project& p, const Abstraction& abs) {
  std::ostringstream os;
  os << abstraction_manifest(abs);
  os << "model = " << p.config.model_path << "\n";
  os << "inclusion = "
     << (p.params.inclusion == InclusionKind::Natural    ? "natural"
         : p.params.inclusion == InclusionKind::Centered ? "centered"
                                                         : "hybrid")
     << "\n";
  os << "periodic =";
  for (std::size_t i = 0; i < p.model.periodic.size(); ++i)
    if (p.model.periodic[i]) os << " x" << i + 1;
  os << "\n";
  for (const auto& [k, v] : p.model.constants) os << "const_" << k << " = " << fmt(v) << "\n";
  os << "spec = " << p.config.spec << "\n";
  return os.str();
}

std::vector<StateId> initial_states(const Project& p, const Quantizer& qz) {
  std::vector<StateId> out, tmp;
  for (const auto& b : p.initial_region) {
    bool escapes = false;
    tmp.clear();
    qz.cover(b, tmp, escapes);
    out.insert(out.end(), tmp.begin(), tmp.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SynthesisResult synthesize_project(const Project& p, const Abstraction& abs) {
  if (p.fragment.kind == FragmentKind::Unsupported) throw Error(ErrorKind::Unsupported, p.fragment.reason);
  const auto init = initial_states(p, abs.quantizer);
  if (!p.initial_region.empty() && init.empty()) bad("initial region lies outside the state domain");
  return synthesize(abs.ts, p.fragment, init);
}

std::string synthesis_manifest(const Project& p, const Abstraction& abs, const SynthesisResult& r) {
  std::ostringstream os;
  os << "verdict = " << (r.realizable ? "REALIZABLE" : "UNREALIZABLE-FOR-T") << "\n";
  if (r.realizable)
    os << "certifies = controller exists for S1 and refines to the concrete system\n";
  else if (abs.report.ok)
    os << "certifies = specification not realizable for S2\n";
  else
    os << "certifies = nothing; completeness inequalities not validated\n";
  os << "spec = " << p.config.spec << "\n"
     << "fragment = " << to_string(p.fragment.kind) << "\n"
     << "formula = " << to_string(canonical_formula(p.fragment)) << "\n"
     << "initial_states = " << initial_states(p, abs.quantizer).size() << "\n"
     << "losing_initial = " << r.losing_initial.size() << "\n"
     << "winning = " << r.strategy.winning_count() << "\n"
     << "states = " << abs.ts.num_states() << "\n"
     << "params_ok = " << (abs.report.ok ? "true" : "false") << "\n"
     << "lipschitz = " << fmt(abs.params.L) << "\n"
     << "message = " << r.message << "\n";
  return os.str();
}

BatchResult simulate_project(const Project& p, const Quantizer& qz, const Strategy& s, const SimulationConfig& sim,
                             unsigned workers) {
  if (p.initial_region.empty()) bad("simulation needs an initial region; set 'initial'");
  const auto k = refine(s, qz);
  SimOptions o;
  o.horizon = sim.horizon;
  o.delta = sim.delta;
  o.eps_meas = sim.eps_meas;
  o.seed = sim.seed;
  o.sampling = sim.sampling;
  return simulate_batch(p.model, k, p.atlas, p.formula, p.initial_region, sim.runs, o, workers);
}

std::string simulation_manifest(const Project& p, const SimulationConfig& sim, const BatchResult& b) {
  std::ostringstream os;
  os << b.summary() << "spec = " << p.config.spec << "\n"
     << "horizon = " << sim.horizon << "\n"
     << "seed = " << sim.seed << "\n"
     << "delta = " << fmt(sim.delta) << "\n"
     << "eps_meas = " << fmt(sim.eps_meas) << "\n"
     << "sampling = " << (sim.sampling == NoiseSampling::Uniform ? "uniform" : "corners") << "\n";
  os << "verdicts =";
  for (Verdict v : b.verdicts) os << ' ' << to_string(v);
  os << "\n";
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  const auto parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) fs::create_directories(parent, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory " + parent.string() + ": " + ec.message());
  std::ofstream out(path);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
}

void write_strategy_file(const std::string& dir, const Strategy& s) {
  std::ostringstream os;
  write_strategy(os, s);
  write_text(dir + "/strategy.txt", os.str());
}

Strategy read_strategy_file(const std::string& dir, std::size_t num_states) {
  std::ifstream in(dir + "/strategy.txt");
  if (!in) throw Error(ErrorKind::Io, "cannot read " + dir + "/strategy.txt");
  return read_strategy(in, num_states);
}

void write_batch(const std::string& dir, const SimulationConfig& sim, const BatchResult& b, const std::string& manifest) {
  write_text(dir + "/simulation.summary", manifest);
  for (std::size_t i = 0; i < b.runs.size() && i < sim.csv_runs; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "/traj_%04zu.csv", i);
    std::ostringstream os;
    write_trajectory_csv(os, b.runs[i]);
    write_text(dir + name, os.str());
  }
}

}  // namespace symctl
