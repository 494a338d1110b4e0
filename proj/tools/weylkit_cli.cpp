#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "runner.hpp"

using namespace weylkit;
using namespace weylkit::cli;
using nlohmann::json;

namespace {

const char* const kParamFlags[] = {"--m", "--a", "--n", "--r", "--period"};

bool is_param_flag(const std::string& tok, std::string& key, std::string& inline_value) {
  for (const char* f : kParamFlags) {
    const std::string flag = f;
    if (tok == flag) {
      key = flag.substr(2);
      inline_value.clear();
      return true;
    }
    if (tok.rfind(flag + "=", 0) == 0) {
      key = flag.substr(2);
      inline_value = tok.substr(flag.size() + 1);
      return true;
    }
  }
  return false;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad value '" + s + "' for " + what);
}

// Parameter flags following --against describe the comparison metric; they are
// pulled out before CLI11 sees the command line.
std::map<std::string, double> split_against(std::vector<std::string>& args, bool& present) {
  std::map<std::string, double> against;
  std::vector<std::string> rest;
  present = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] != "--against") {
      rest.push_back(args[i]);
      continue;
    }
    present = true;
    std::string key, value;
    while (i + 1 < args.size() && is_param_flag(args[i + 1], key, value)) {
      ++i;
      if (value.empty()) {
        if (i + 1 >= args.size()) throw ConfigError("missing value after --" + key);
        value = args[++i];
      }
      against[key] = parse_number(value, "--against --" + key);
    }
  }
  args = rest;
  return against;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

struct RunFlags {
  std::string config_path;
  std::string family;
  double m = 0, a = 0, n = 0, r = 0, period = 0;
  std::vector<std::string> suites, orientations, quantities, tolerances;
  int samples = 0, k = 0, max_doublings = 0, plan_shells = 0, plan_per_shell = 0;
  std::uint64_t seed = 0;
  std::vector<double> radii;
  std::vector<int> resolution;
  double fit_discard = 0;
  std::string report, csv;
  bool emit_config = false;
};

void add_run_options(CLI::App* cmd, RunFlags& f, bool with_suites) {
  cmd->add_option("--config", f.config_path, "JSON run configuration; flags override its values");
  cmd->add_option("--family", f.family, "metric family (see `zoo list`)");
  cmd->add_option("--m", f.m, "mass parameter");
  cmd->add_option("--a", f.a, "rotation parameter");
  cmd->add_option("--n", f.n, "NUT parameter");
  cmd->add_option("--r", f.r, "radius parameter");
  cmd->add_option("--period", f.period, "fibre period");
  if (with_suites)
    cmd->add_option("--suite", f.suites, "suites: curvature, wu, identities, flux, falloff, compare")->delimiter(',');
  cmd->add_option("--orientation", f.orientations, "positive and/or negative")->delimiter(',');
  cmd->add_option("--samples", f.samples, "random points per suite");
  cmd->add_option("--seed", f.seed, "sampling seed");
  cmd->add_option("--radii", f.radii, "shell radii in units of the mass scale")->delimiter(',');
  cmd->add_option("--resolution", f.resolution, "fibre,polar,azimuth node counts")->delimiter(',')->expected(3);
  cmd->add_option("--max-doublings", f.max_doublings, "node doublings before giving up");
  cmd->add_option("--fit-discard", f.fit_discard, "innermost fraction of radii dropped from fits");
  cmd->add_option("--quantity", f.quantities, "fall-off quantities: riemann, w_plus, alpha_h, alpha_g, grad_alpha_g")
      ->delimiter(',');
  cmd->add_option("--k", f.k, "derivative order of the weighted distance");
  cmd->add_option("--plan-shells", f.plan_shells, "radial shells of the comparison sample plan");
  cmd->add_option("--plan-per-shell", f.plan_per_shell, "points per shell of the comparison sample plan");
  cmd->add_option("--tol", f.tolerances, "tolerance override name=value (repeatable)");
  cmd->add_option("--report", f.report, "report JSON path (default: standard output)");
  cmd->add_option("--csv", f.csv, "CSV path for shell integral rows");
  cmd->add_flag("--emit-config", f.emit_config, "print the resolved configuration and exit");
}

RunConfig resolve(CLI::App* cmd, const RunFlags& f, const std::vector<std::string>& fixed_suites,
                  const std::map<std::string, double>& against, bool against_present) {
  RunConfig c;
  if (!f.config_path.empty()) c = config_from_json(parse_json(read_file(f.config_path), f.config_path));
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--family")) c.family = f.family;
  if (given("--m")) c.params["m"] = f.m;
  if (given("--a")) c.params["a"] = f.a;
  if (given("--n")) c.params["n"] = f.n;
  if (given("--r")) c.params["r"] = f.r;
  if (given("--period")) c.params["period"] = f.period;
  if (!fixed_suites.empty()) c.suites = fixed_suites;
  if (fixed_suites.empty() && given("--suite")) c.suites = f.suites;
  if (given("--orientation")) c.orientations = f.orientations;
  if (given("--samples")) c.samples = f.samples;
  if (given("--seed")) c.seed = f.seed;
  if (given("--radii")) c.radii = f.radii;
  if (given("--resolution")) c.resolution = {f.resolution[0], f.resolution[1], f.resolution[2]};
  if (given("--max-doublings")) c.max_doublings = f.max_doublings;
  if (given("--fit-discard")) c.fit_discard = f.fit_discard;
  if (given("--quantity")) c.quantities = f.quantities;
  if (given("--k")) c.k = f.k;
  if (given("--plan-shells")) c.plan_shells = f.plan_shells;
  if (given("--plan-per-shell")) c.plan_per_shell = f.plan_per_shell;
  for (const auto& t : f.tolerances) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("--tol expects name=value, got '" + t + "'");
    c.tolerances[t.substr(0, eq)] = parse_number(t.substr(eq + 1), "--tol " + t.substr(0, eq));
  }
  if (given("--report")) c.report_path = f.report;
  if (given("--csv")) c.csv_path = f.csv;
  if (against_present) c.against = against;
  return config_from_json(to_json(c));
}

int execute(const RunConfig& c) {
  const RunResult r = run(c);
  write_text(c.report_path, report_text(r.report));
  if (!c.csv_path.empty()) write_text(c.csv_path, csv_text(r.csv_rows));
  return r.status;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  bool against_present = false;
  std::map<std::string, double> against;
  try {
    against = split_against(args, against_present);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }

  CLI::App app{"Curvature, Wu-criterion and asymptotic checks on gravitational instantons"};
  app.name("weylkit");
  app.require_subcommand(1);

  CLI::App* zoo = app.add_subcommand("zoo", "metric families");
  zoo->require_subcommand(1);
  CLI::App* zoo_list = zoo->add_subcommand("list", "list families with their parameters and flags");

  RunFlags verify_flags, flux_flags, falloff_flags, compare_flags;
  CLI::App* verify = app.add_subcommand("verify", "run verification suites at sampled points");
  add_run_options(verify, verify_flags, true);
  CLI::App* flux = app.add_subcommand("flux", "shell integrals, flux and hologram check");
  add_run_options(flux, flux_flags, false);
  CLI::App* falloff = app.add_subcommand("falloff", "fall-off exponents and the Killing asymptote");
  add_run_options(falloff, falloff_flags, false);
  CLI::App* compare = app.add_subcommand("compare", "weighted distance to a second metric given after --against");
  add_run_options(compare, compare_flags, false);

  CLI::App* report = app.add_subcommand("report", "report utilities");
  report->require_subcommand(1);
  CLI::App* merge = report->add_subcommand("merge", "merge reports of one family");
  std::vector<std::string> merge_inputs;
  std::string merge_output;
  merge->add_option("inputs", merge_inputs, "report files")->required();
  merge->add_option("-o,--output", merge_output, "merged report path (default: standard output)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (zoo_list->parsed()) {
      std::cout << report_text(zoo_listing());
      return kOk;
    }
    if (merge->parsed()) {
      std::vector<json> reports;
      for (const auto& path : merge_inputs) reports.push_back(parse_json(read_file(path), path));
      const json merged = merge_reports(reports);
      write_text(merge_output, report_text(merged));
      return merged.at("status").get<int>();
    }
    if (against_present && !compare->parsed()) throw ConfigError("--against is only valid for compare");

    struct Entry {
      CLI::App* cmd;
      RunFlags* flags;
      std::vector<std::string> suites;
    };
    for (const Entry& e : {Entry{verify, &verify_flags, {}}, Entry{flux, &flux_flags, {"flux"}},
                           Entry{falloff, &falloff_flags, {"falloff"}}, Entry{compare, &compare_flags, {"compare"}}}) {
      if (!e.cmd->parsed()) continue;
      const RunConfig c = resolve(e.cmd, *e.flags, e.suites, against, against_present);
      if (e.flags->emit_config) {
        std::cout << to_json(c).dump(2) << "\n";
        return kOk;
      }
      if (e.cmd == compare && c.against.empty()) throw ConfigError("compare needs --against with parameter flags");
      return execute(c);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return kNotConverged;
  }
  return kOk;
}
