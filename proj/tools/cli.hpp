#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curv/noether.hpp"
#include "curv/patch.hpp"
#include "json.hpp"

namespace curvtest {

enum ExitCode { kPass = 0, kIdentityFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key = value configuration. Unset optionals take the command default.
struct RunConfig {
  std::optional<std::string> preset;
  std::vector<double> preset_params;
  std::optional<double> perturbation;
  std::optional<int> grid;
  std::uint64_t seed = 7;
  std::string out = "out";
  int points = 100;
  std::optional<std::vector<std::string>> suites;
  std::vector<std::string> presets = {"sphere", "torus", "s2xs2"};
  double codazzi_factor = 4.0;
  curv::EnergySpec spec = curv::EnergySpec::parse("ea=1,h0_4=0.3,angle4=-0.2,h0sq2=0.5,tr4=0.7,w2=0.25");
  std::optional<std::string> moebius;
  double beta = 0.1;
  double flow_eps = 0.05;
  int flow_fields = 3;
  int flow_max_iter = 40;
  int threads = 1;
  int translation_grid = 32;
  std::map<std::string, double> tolerance;  // from tol.<identity prefix> keys

  nlohmann::json to_json() const;
};

// Keys accepted by parse_config (tol.<prefix> aside).
const std::vector<std::string>& config_keys();

// Lines "key = value"; '#' starts a comment; blank lines are skipped.
// Unknown or repeated keys and malformed values throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// "invert:0,0,3,0,0,0; dilate:2; translate:1,0,0,0,0; rotate:0,1,0.3"
// (rotate: plane i, j and angle, in dimension m).
curv::MoebiusMap parse_moebius(const std::string& text, int m);

struct CommandResult {
  int exit_code = kPass;
  nlohmann::json report;
  std::vector<std::vector<std::string>> csv;  // header first
  std::vector<std::string> messages;          // human-readable summary
};

const std::vector<std::string>& command_names();

// Runs one command. Configuration problems throw ConfigError; numerical
// failures are returned with exit code 3 and whatever partial data exists.
CommandResult run_command(const std::string& name, const RunConfig& cfg);

// Writes <dir>/report.json and <dir>/report.csv.
void write_reports(const CommandResult& r, const std::string& dir);

std::string csv_escape(const std::string& s);

}  // namespace curvtest
