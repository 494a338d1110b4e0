#pragma once

// Batch driver shared by the command-line tool and the acceptance binary:
// run configuration, suite execution and report emission.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "weylkit/asymptotics.hpp"

namespace weylkit::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitStatus : int { kOk = 0, kAssertionFailed = 1, kConfigError = 2, kNotConverged = 3 };

struct RunConfig {
  std::string family = "kerr";
  std::map<std::string, double> params;
  std::vector<std::string> suites{"curvature"};
  std::vector<std::string> orientations;  // empty: every Wu-positive orientation of the family

  int samples = 20;
  std::uint64_t seed = 1;
  std::vector<double> radii;  // in units of the family's mass scale; empty: 20, 40, 80, 160
  ShellResolution resolution;
  int max_doublings = 3;
  double fit_discard = 0.25;
  std::vector<std::string> quantities{"w_plus", "alpha_g"};

  // compare
  std::map<std::string, double> against;
  int k = 3;
  int plan_shells = 12;
  int plan_per_shell = 16;

  std::map<std::string, double> tolerances;  // overrides of default_tolerances()

  std::string report_path;  // empty: standard output
  std::string csv_path;
};

std::map<std::string, double> default_tolerances();

nlohmann::json to_json(const RunConfig& c);
// Unknown keys, wrong types and unknown suite or quantity names raise ConfigError.
RunConfig config_from_json(const nlohmann::json& j);

struct RunResult {
  nlohmann::json report;
  int status = kOk;
  std::vector<FluxRow> csv_rows;
};

// Runs every enabled suite.  Configuration errors propagate as ConfigError;
// NumericalError inside a suite is recorded and mapped to kNotConverged.
RunResult run(const RunConfig& c);

std::string csv_text(const std::vector<FluxRow>& rows);
std::string report_text(const nlohmann::json& report);

// Union of the suites of several reports with the same schema version and family.
nlohmann::json merge_reports(const std::vector<nlohmann::json>& reports);

nlohmann::json zoo_listing();

}  // namespace weylkit::cli
