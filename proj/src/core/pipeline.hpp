#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "abstraction.hpp"
#include "ltl.hpp"
#include "runtime.hpp"
#include "synthesis.hpp"

namespace symctl {

struct SimulationConfig {
  std::size_t runs = 100;
  std::size_t horizon = 200;
  std::uint64_t seed = 1;
  double delta = 0;
  double eps_meas = 0;
  NoiseSampling sampling = NoiseSampling::Uniform;
  std::size_t csv_runs = 10;  // trajectories written as CSV
};

/*
 * YAML project file:
 *   model: path (relative to the config file)
 *   atlas: {name: [[[lo, hi], ...], ...]}   regions as box lists
 *   spec: LTL text over atlas names
 *   initial: region name (default: the spec's initial atom)
 *   params: delta1 delta2 eps1 eps2 eta mu eps lipschitz lipschitz_pad inclusion sound_only periodic
 *   simulation: runs horizon seed delta eps_meas sampling csv_runs
 *   output: directory (relative to the config file)
 * Numbers may be decimal literals or constant expressions such as pi/2.
 */
struct ProjectConfig {
  std::string path;
  std::string model_path;
  std::vector<std::pair<std::string, std::vector<Box>>> atlas;
  std::string spec;
  std::string initial;
  AbstractionParams params;
  std::optional<double> lipschitz;
  double lipschitz_state_pad = 0, lipschitz_input_pad = 0;
  std::vector<std::string> periodic;
  SimulationConfig sim;
  std::string output = "out";
};

ProjectConfig parse_config(const std::string& yaml, const std::string& base_dir);
ProjectConfig load_config(const std::string& path);

/* Model, atlas with complement regions, parsed spec and resolved parameters. */
struct Project {
  ProjectConfig config;
  SystemModel model;
  PropositionAtlas atlas;
  Ltl formula;
  Fragment fragment;
  AbstractionParams params;
  std::vector<Box> initial_region;
};

Project open_project(ProjectConfig config);

Quantizer project_quantizer(const Project& p);
Abstraction abstract_project(const Project& p, const BuildOptions& options = {});
/* Rebuilds the abstraction record around a stored transition system. */
Abstraction load_abstraction(const Project& p, const std::string& dir);
std::string project_manifest(const Project& p, const Abstraction& abs);

std::vector<StateId> initial_states(const Project& p, const Quantizer& qz);
SynthesisResult synthesize_project(const Project& p, const Abstraction& abs);
std::string synthesis_manifest(const Project& p, const Abstraction& abs, const SynthesisResult& r);

BatchResult simulate_project(const Project& p, const Quantizer& qz, const Strategy& s, const SimulationConfig& sim,
                             unsigned workers = 0);
std::string simulation_manifest(const Project& p, const SimulationConfig& sim, const BatchResult& b);

/* File layout inside the output directory. */
void write_text(const std::string& path, const std::string& text);
void write_strategy_file(const std::string& dir, const Strategy& s);
Strategy read_strategy_file(const std::string& dir, std::size_t num_states);
void write_batch(const std::string& dir, const SimulationConfig& sim, const BatchResult& b, const std::string& manifest);

}  // namespace symctl
