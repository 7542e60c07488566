#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "wavelqr/commands.hpp"
#include "wavelqr/config.hpp"
#include "wavelqr/io.hpp"

using namespace wavelqr;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wavelqr_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json reference_json() {
  return json::parse(R"({"boundary": "dirichlet", "alpha": 0.0, "beta": 1.0, "R": 1.0,
                          "weights": {"type": "power", "q": 1.0, "r": 5.0}, "N": 64, "grid": 101})");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cmd(const std::string& command, const json& j, const fs::path& out, const cli::CommandOptions& opts = {}) {
  std::ostringstream log;
  return cli::run(command, parse_config(j), out, opts, log);
}

}  // namespace

TEST(Config, ParsesReference) {
  const RunConfig rc = parse_config(reference_json());
  EXPECT_EQ(rc.wave.boundary(), Boundary::Dirichlet);
  EXPECT_EQ(rc.N, 64);
  EXPECT_EQ(rc.grid, 101);
  EXPECT_TRUE(rc.family.is_power_law());
  EXPECT_DOUBLE_EQ(rc.family.power().r, 5.0);
  EXPECT_EQ(rc.family.cutoff(), 64);
}

TEST(Config, RejectsUnknownAndInvalid) {
  auto bad = [](auto mutate) {
    json j = reference_json();
    mutate(j);
    EXPECT_THROW(parse_config(j), ConfigError) << j.dump();
  };
  bad([](json& j) { j["colour"] = 1; });
  bad([](json& j) { j["weights"]["s"] = 1; });
  bad([](json& j) { j["sim"] = {{"T", 1.0}, {"steps", 3}}; });
  bad([](json& j) { j.erase("R"); });
  bad([](json& j) { j["R"] = 0.0; });
  bad([](json& j) { j["boundary"] = "robin"; });
  bad([](json& j) { j["grid"] = 100; });
  bad([](json& j) { j["N"] = -1; });
  bad([](json& j) { j["N"] = 2.5; });
  bad([](json& j) { j["weights"] = {{"type", "list"}, {"entries", {{{"n", 1}, {"Q11", 1.0}, {"Q12", 3.0}, {"Q22", 1.0}}}}}; });
  bad([](json& j) { j["sim"] = {{"initial", {{{"n", 0}, {"z1", 1.0}}}}}; });
}

TEST(Config, LoadErrors) {
  const fs::path dir = scratch("load");
  EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
  write_text(dir / "broken.json", "{\"boundary\": ");
  EXPECT_THROW(load_config(dir / "broken.json"), ConfigError);
}

TEST(Io, CsvRoundTripAndFormatting) {
  const fs::path dir = scratch("csv");
  {
    CsvWriter w(dir / "t.csv", {"a", "b", "c"});
    w << 1 << 0.1 << std::string("x");
    w.end_row();
    w << -0.0 << 1e-300 << std::string("y");
    w.end_row();
  }
  const CsvTable t = read_csv(dir / "t.csv");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.number(0, "b"), 0.1);
  EXPECT_EQ(t.rows[1][0], "0");
  EXPECT_EQ(t.number(1, "b"), 1e-300);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_THROW(t.column("zzz"), std::out_of_range);
}

TEST(Io, JsonFloatsUseSeventeenDigits) {
  const std::string s = dump_json(json{{"x", 0.1}, {"n", 3}, {"bad", std::nan("")}, {"v", json::array({1.0})}});
  EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
  EXPECT_NE(s.find("\"n\": 3"), std::string::npos);
  EXPECT_NE(s.find("null"), std::string::npos);
  EXPECT_EQ(json::parse(s)["v"][0].get<double>(), 1.0);
}

TEST(Synth, TableHasOneRowPerMode) {
  const fs::path dir = scratch("synth");
  ASSERT_EQ(run_cmd("synth", reference_json(), dir), cli::kOk);
  const CsvTable t = read_csv(dir / "synth.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"n", "P11", "P12", "P22", "K1", "K2", "ReMu", "ImMu", "residual_max"}));
  ASSERT_EQ(t.rows.size(), 64u);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(t.number(i, "n"), double(i + 1));
    EXPECT_LE(t.number(i, "residual_max"), 1e-10);
    EXPECT_LT(t.number(i, "ReMu"), 0.0);
  }
  EXPECT_NEAR(t.number(0, "P11"), 3.45606112, 1e-8);
}

TEST(Synth, EmptyAndZeroFamilies) {
  const fs::path dir = scratch("synth_empty");
  json j = reference_json();
  j["N"] = 0;
  ASSERT_EQ(run_cmd("synth", j, dir), cli::kOk);
  EXPECT_TRUE(read_csv(dir / "synth.csv").rows.empty());

  j = reference_json();
  j["N"] = 5;
  j["weights"] = {{"type", "list"}, {"entries", json::array()}};
  ASSERT_EQ(run_cmd("synth", j, dir), cli::kOk);
  const CsvTable t = read_csv(dir / "synth.csv");
  ASSERT_EQ(t.rows.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i)
    for (const char* c : {"P11", "P12", "P22", "K1", "K2"}) EXPECT_EQ(t.number(i, c), 0.0);
}

TEST(Verify, ReferencePassesAndReportsChecks) {
  const fs::path dir = scratch("verify");
  ASSERT_EQ(run_cmd("verify", reference_json(), dir), cli::kOk);
  const json rep = json::parse(slurp(dir / "verify.json"));
  EXPECT_TRUE(rep["pass"].get<bool>());
  EXPECT_GE(rep["checks"].size(), 10u);
  for (const auto& c : rep["checks"]) EXPECT_TRUE(c["pass"].get<bool>()) << c["name"];
}

TEST(Verify, NeumannPasses) {
  const fs::path dir = scratch("verify_neumann");
  json j = reference_json();
  j["boundary"] = "neumann";
  j["alpha"] = 0.2;
  EXPECT_EQ(run_cmd("verify", j, dir), cli::kOk);
}

TEST(Verify, CorruptedSolutionFails) {
  const fs::path dir = scratch("verify_bad");
  cli::CommandOptions opts;
  opts.perturb_p12 = 1e-3;
  ASSERT_EQ(run_cmd("verify", reference_json(), dir, opts), cli::kVerifyFailed);
  const json rep = json::parse(slurp(dir / "verify.json"));
  EXPECT_FALSE(rep["pass"].get<bool>());
  bool residual_failed = false;
  for (const auto& c : rep["checks"])
    if (c["name"] == "modal_are_residual") residual_failed = !c["pass"].get<bool>();
  EXPECT_TRUE(residual_failed);
}

TEST(Verify, NonSummableWeightsWarn) {
  const fs::path dir = scratch("verify_r1");
  json j = reference_json();
  j["weights"]["r"] = 1.0;
  run_cmd("verify", j, dir);
  const json rep = json::parse(slurp(dir / "verify.json"));
  bool found = false;
  for (const auto& w : rep["warnings"]) found |= w.get<std::string>().find("Q series") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST(Commands, AllEmitParseableOutputs) {
  const fs::path dir = scratch("all");
  json j = reference_json();
  j["N"] = 8;
  j["grid"] = 21;
  j["N_list"] = {8, 16, 32};
  j["sim"] = {{"T", 1.0}, {"M", 64}};
  for (const auto& c : cli::command_names()) ASSERT_EQ(run_cmd(c, j, dir), cli::kOk) << c;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") {
      const CsvTable t = read_csv(entry.path());
      EXPECT_FALSE(t.header.empty()) << entry.path();
      for (const auto& row : t.rows) EXPECT_EQ(row.size(), t.header.size()) << entry.path();
    } else {
      EXPECT_NO_THROW(json::parse(slurp(entry.path()))) << entry.path();
    }
  }
  EXPECT_EQ(read_csv(dir / "kernel_P.csv").rows.size(), 21u * 21u);
  EXPECT_EQ(read_csv(dir / "damping.csv").rows.size(), 9u);
}

TEST(Commands, CompareBoundaryVerdicts) {
  const fs::path dir = scratch("compare");
  for (double r : {3.0, 5.0}) {
    json j = reference_json();
    j["weights"]["r"] = r;
    j["N"] = 16;
    ASSERT_EQ(run_cmd("compare-boundary", j, dir), cli::kOk);
    const json rep = json::parse(slurp(dir / "compare.json"));
    auto verdict = [&](const char* b, const char* s) {
      for (const auto& v : rep[b]["series"])
        if (v["series"] == s) return v["fitted"].get<std::string>();
      return std::string();
    };
    EXPECT_EQ(verdict("dirichlet", "K"), "convergent");
    EXPECT_EQ(verdict("neumann", "K"), "convergent");
    EXPECT_EQ(verdict("dirichlet", "P11"), r == 5.0 ? "convergent" : "divergent");
    EXPECT_EQ(verdict("neumann", "P11"), "divergent");
  }
}

TEST(Commands, Deterministic) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const char* c : {"synth", "verify", "spectrum"}) {
    ASSERT_EQ(run_cmd(c, reference_json(), a), cli::kOk);
    ASSERT_EQ(run_cmd(c, reference_json(), b), cli::kOk);
  }
  for (const char* f : {"synth.csv", "verify.json", "spectrum.csv", "spectrum.json"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Executable, ExitCodes) {
  const fs::path dir = scratch("exe");
  write_text(dir / "ok.json", reference_json().dump());
  json bad = reference_json();
  bad["extra"] = true;
  write_text(dir / "bad.json", bad.dump());
  const std::string exe = WAVELQR_EXE;
  auto code = [&](const std::string& args) {
    const int status = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  const std::string out = " --out " + (dir / "out").string();
  EXPECT_EQ(code("synth --config " + (dir / "ok.json").string() + out), 0);
  EXPECT_EQ(code("verify --config " + (dir / "ok.json").string() + out), 0);
  EXPECT_EQ(code("verify --config " + (dir / "ok.json").string() + out + " --perturb-p12 0.001"), 1);
  EXPECT_EQ(code("synth --config " + (dir / "bad.json").string() + out), 2);
  EXPECT_EQ(code("synth --config " + (dir / "nothere.json").string() + out), 2);
  EXPECT_EQ(code("frobnicate --config " + (dir / "ok.json").string()), 2);
  EXPECT_EQ(code("synth"), 2);
}

TEST(Verify, ZeroWeightsWithDampingPass) {
  const fs::path dir = scratch("verify_zero");
  json j = reference_json();
  j["boundary"] = "neumann";
  j["alpha"] = 0.5;
  j["N"] = 6;
  j["weights"] = {{"type", "list"}, {"entries", json::array()}};
  EXPECT_EQ(run_cmd("verify", j, dir), cli::kOk);
  j["alpha"] = 0.0;
  EXPECT_EQ(run_cmd("verify", j, dir), cli::kOk);
}
