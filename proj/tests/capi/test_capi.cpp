#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "symctl/symctl.h"

namespace {

const std::string kData = SYMCTL_DATA_DIR;

std::string scratch(const char* name) {
  const auto d = std::filesystem::temp_directory_path() / (std::string("symctl_capi_") + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d.string();
}

bool starts_with(const char* s, const char* prefix) { return std::strncmp(s, prefix, std::strlen(prefix)) == 0; }

}  // namespace

TEST_CASE("status codes and error messages") {
  symctl_project* p = reinterpret_cast<symctl_project*>(1);
  CHECK(symctl_project_open((kData + "/missing.yaml").c_str(), &p) == SYMCTL_E_IO);
  CHECK(p == nullptr);
  CHECK(std::strlen(symctl_last_error()) > 0);
  CHECK(symctl_project_open(nullptr, &p) == SYMCTL_E_PARAM);

  const auto dir = scratch("codes");
  {
    std::ofstream f(dir + "/next.yaml");
    f << "model: " << kData << "/walled.model\natlas:\n  goal:\n    - [[0.85, 0.95]]\nspec: \"X goal\"\n"
      << "params:\n  eta: 0.05\n  mu: 0.05\n  eps: 0.01\n  sound_only: true\n";
  }
  REQUIRE(symctl_project_open((dir + "/next.yaml").c_str(), &p) == SYMCTL_OK);
  CHECK(std::strlen(symctl_last_error()) == 0);
  symctl_abstraction* a = nullptr;
  REQUIRE(symctl_abstract(p, 1, &a) == SYMCTL_OK);
  symctl_synthesis* s = nullptr;
  CHECK(symctl_synthesize(p, a, &s) == SYMCTL_E_UNSUPPORTED);
  CHECK(s == nullptr);
  symctl_abstraction_free(a);
  symctl_project_free(p);

  {
    std::ofstream f(dir + "/coarse.yaml");
    f << "model: " << kData << "/walled.model\nspec: \"G in\"\nparams:\n  eta: 0.3\n  mu: 0.05\n  eps: 0.01\n  delta2: 0.1\n  eps2: 0.1\n";
  }
  REQUIRE(symctl_project_open((dir + "/coarse.yaml").c_str(), &p) == SYMCTL_OK);
  CHECK(symctl_abstract(p, 1, &a) == SYMCTL_E_PARAM);
  CHECK(std::string(symctl_last_error()).find("maximal feasible eta") != std::string::npos);
  CHECK(symctl_project_set_sound_only(p, 1) == SYMCTL_OK);
  CHECK(symctl_abstract(p, 1, &a) == SYMCTL_OK);
  symctl_abstraction_free(a);
  symctl_project_free(p);

  // freeing null handles is harmless
  symctl_project_free(nullptr);
  symctl_batch_free(nullptr);
  CHECK(symctl_batch_verdict(nullptr, 0) == -1);
}

TEST_CASE("unrealizable fixture") {
  symctl_project* p = nullptr;
  REQUIRE(symctl_project_open((kData + "/walled.yaml").c_str(), &p) == SYMCTL_OK);
  symctl_abstraction* a = nullptr;
  REQUIRE(symctl_abstract(p, 0, &a) == SYMCTL_OK);
  CHECK(symctl_abstraction_states(a) == 22);
  CHECK(symctl_abstraction_transitions(a) > 0);
  CHECK(starts_with(symctl_abstraction_manifest(a), "states = 22\n"));
  symctl_synthesis* s = nullptr;
  REQUIRE(symctl_synthesize(p, a, &s) == SYMCTL_OK);
  CHECK(symctl_synthesis_realizable(s) == 0);
  CHECK(starts_with(symctl_synthesis_manifest(s), "verdict = UNREALIZABLE-FOR-T"));
  symctl_synthesis_free(s);
  symctl_abstraction_free(a);
  symctl_project_free(p);
}

TEST_CASE("full pipeline through files") {
  const auto dir = scratch("line");
  symctl_project* p = nullptr;
  REQUIRE(symctl_project_open((kData + "/line_measured.yaml").c_str(), &p) == SYMCTL_OK);
  REQUIRE(symctl_project_set_output(p, dir.c_str()) == SYMCTL_OK);
  CHECK(std::string(symctl_project_output(p)) == dir);

  symctl_abstraction* a = nullptr;
  REQUIRE(symctl_abstract(p, 2, &a) == SYMCTL_OK);
  REQUIRE(symctl_abstraction_write(a, dir.c_str()) == SYMCTL_OK);
  symctl_abstraction* back = nullptr;
  REQUIRE(symctl_abstraction_load(p, dir.c_str(), &back) == SYMCTL_OK);
  CHECK(symctl_abstraction_transitions(back) == symctl_abstraction_transitions(a));
  CHECK(std::string(symctl_abstraction_manifest(back)) == symctl_abstraction_manifest(a));

  symctl_synthesis* s = nullptr;
  REQUIRE(symctl_synthesize(p, back, &s) == SYMCTL_OK);
  CHECK(symctl_synthesis_realizable(s) == 1);
  CHECK(symctl_synthesis_winning(s) > 0);
  REQUIRE(symctl_synthesis_write(s, dir.c_str()) == SYMCTL_OK);
  symctl_synthesis* loaded = nullptr;
  REQUIRE(symctl_synthesis_load(p, dir.c_str(), &loaded) == SYMCTL_OK);
  CHECK(symctl_synthesis_realizable(loaded) == 1);
  CHECK(symctl_synthesis_winning(loaded) == symctl_synthesis_winning(s));

  symctl_sim_options o{};
  REQUIRE(symctl_sim_defaults(p, &o) == SYMCTL_OK);
  CHECK(o.runs == 1000);
  CHECK(o.eps_meas == 0.05);
  CHECK(o.seed == 11);
  o.runs = 100;
  symctl_batch* b = nullptr;
  REQUIRE(symctl_simulate(p, loaded, &o, &b) == SYMCTL_OK);
  uint64_t sat = 0, violated = 1, unknown = 1;
  symctl_batch_counts(b, &sat, &violated, &unknown);
  CHECK(sat == 100);
  CHECK(violated == 0);
  CHECK(unknown == 0);
  CHECK(symctl_batch_verdict(b, 0) == 0);
  CHECK(symctl_batch_verdict(b, 100) == -1);
  CHECK(starts_with(symctl_batch_summary(b), "runs = 100\n"));
  REQUIRE(symctl_batch_write(b, dir.c_str()) == SYMCTL_OK);
  CHECK(std::filesystem::exists(dir + "/traj_0000.csv"));

  o.delta = -1;
  symctl_batch* bad = nullptr;
  CHECK(symctl_simulate(p, loaded, &o, &bad) == SYMCTL_E_PARAM);
  CHECK(bad == nullptr);

  symctl_batch_free(b);
  symctl_synthesis_free(loaded);
  symctl_synthesis_free(s);
  symctl_abstraction_free(back);
  symctl_abstraction_free(a);
  symctl_project_free(p);
  std::filesystem::remove_all(dir);
}

TEST_CASE("relation checks") {
  const auto e = kData + "/example1/";
  int pass = -1;
  char buf[256];
  REQUIRE(symctl_check((e + "t1.ts").c_str(), (e + "t2.ts").c_str(), (e + "alpha.rel").c_str(), "alternating", &pass,
                       buf, sizeof buf) == SYMCTL_OK);
  CHECK(pass == 1);
  CHECK(starts_with(buf, "PASS alternating"));
  REQUIRE(symctl_check((e + "t1.ts").c_str(), (e + "t2.ts").c_str(), (e + "alpha.rel").c_str(), "abstraction", &pass,
                       buf, sizeof buf) == SYMCTL_OK);
  CHECK(pass == 0);
  CHECK(starts_with(buf, "FAIL abstraction"));
  REQUIRE(symctl_check((e + "t1.ts").c_str(), (e + "t3.ts").c_str(), (e + "alpha.rel").c_str(), "abstraction", &pass,
                       nullptr, 0) == SYMCTL_OK);
  CHECK(pass == 1);
  char tiny[5];
  REQUIRE(symctl_check((e + "t1.ts").c_str(), (e + "t3.ts").c_str(), (e + "alpha.rel").c_str(), "abstraction", &pass,
                       tiny, sizeof tiny) == SYMCTL_OK);
  CHECK(std::string(tiny) == "PASS");
  CHECK(symctl_check((e + "t1.ts").c_str(), (e + "t3.ts").c_str(), (e + "alpha.rel").c_str(), "nope", &pass, buf,
                     sizeof buf) == SYMCTL_E_PARAM);
  CHECK(symctl_check((e + "none.ts").c_str(), (e + "t3.ts").c_str(), (e + "alpha.rel").c_str(), "abstraction", &pass,
                     buf, sizeof buf) == SYMCTL_E_IO);
}
