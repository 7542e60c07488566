#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wavelqr/config.hpp"

namespace wavelqr::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kNumericalError = 3 };

struct CommandOptions {
  /// Test hook: added to P12 = P21 of every mode before verification.
  std::optional<double> perturb_p12;
};

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  bool hard = true;
  std::string note;
};

struct VerifyReport {
  std::vector<Check> checks;
  std::vector<std::string> warnings;

  bool pass() const;
  nlohmann::json to_json() const;
};

VerifyReport verify(const RunConfig& rc, const CommandOptions& opts = {});

int cmd_synth(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log);
int cmd_verify(const RunConfig& rc, const std::filesystem::path& out, const CommandOptions& opts, std::ostream& log);
int cmd_spectrum(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log);
int cmd_kernels(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log);
int cmd_simulate(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log);
int cmd_converge(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log);
int cmd_compare_boundary(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log);

const std::vector<std::string>& command_names();

/// Dispatches `command`, mapping ConfigError to 2 and NumericalError to 3.
int run(const std::string& command, const RunConfig& rc, const std::filesystem::path& out,
        const CommandOptions& opts, std::ostream& log);

/// Full front door: argument parsing, config loading, dispatch.
int main_entry(int argc, char** argv);

}  // namespace wavelqr::cli
