#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavelqr/model.hpp"

namespace wavelqr {

struct InitialMode {
  int n = 1;
  double z1 = 0.0;
  double z2 = 0.0;
};

struct SimConfig {
  double T = 5.0;
  double dt = 0.005;
  int M = 400;
  double cfl = 0.9;
  std::vector<InitialMode> initial{{1, 1.0, 0.0}};
};

/// Everything a command needs, validated up front.
struct RunConfig {
  WaveConfig wave{Boundary::Dirichlet, 0.0, 1.0, 1.0};
  WeightFamily family = WeightFamily::power_law(1.0, 5.0, 64);
  int N = 64;
  int grid = 201;
  int coupled_N = 8;
  std::vector<int> N_list{16, 32, 64, 128};
  int fit_lo = 50;
  int fit_hi = 500;
  std::uint64_t seed = 12345;
  SimConfig sim;
};

/// Schema:
///   {"boundary": "dirichlet"|"neumann", "alpha": num, "beta": num, "R": num,
///    "weights": {"type": "power", "q": num, "r": num}
///             | {"type": "list", "entries": [{"n": int, "Q11": num, "Q12": num, "Q22": num}, ...]},
///    "N": int,
///    optional: "grid": odd int, "coupled_N": int, "N_list": [int], "fit_window": [lo, hi],
///              "seed": int, "sim": {"T", "dt", "M", "cfl", "initial": [{"n", "z1", "z2"}]}}
/// Unknown keys anywhere are rejected with ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace wavelqr
