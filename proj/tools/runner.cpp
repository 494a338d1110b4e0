#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "weylkit/identities.hpp"
#include "weylkit/parallel.hpp"

namespace weylkit::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kSuites{"curvature", "wu", "identities", "flux", "falloff", "compare"};

json point_json(const ChartPoint& p) { return {{"chart", p.chart}, {"coords", {p.coords[0], p.coords[1], p.coords[2], p.coords[3]}}}; }

json fit_json(const PowerFit& f) {
  json j{{"exact_zero", f.exact_zero}, {"valid", f.valid}, {"points_used", f.points_used},
         {"window_start", f.window_start}};
  if (f.valid) {
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r_squared"] = f.r_squared;
    j["ci95"] = {f.ci_low, f.ci_high};
  }
  return j;
}

json report_json(const ResidualReport& r) {
  json j{{"name", r.name}, {"residual", r.residual}, {"scale", r.scale}, {"tolerance", r.tolerance},
         {"pass", r.pass}};
  if (r.inequality) j["margin"] = r.margin;
  return j;
}

json flags_json(const FamilyFlags& f) {
  return {{"einstein", f.einstein},   {"ricci_flat", f.ricci_flat},
          {"wu_plus", f.wu_plus},     {"wu_minus", f.wu_minus},
          {"alf", f.alf},             {"hyperkahler_side", to_string(f.hyperkahler_side)}};
}

std::string orientation_name(Orientation o) { return o == Orientation::Positive ? "positive" : "negative"; }

Orientation orientation_from(const std::string& s) {
  if (s == "positive") return Orientation::Positive;
  if (s == "negative") return Orientation::Negative;
  throw ConfigError("orientation must be 'positive' or 'negative', got '" + s + "'");
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

// Per-point loop whose rows are filled in parallel and emitted in sample order.
template <typename F>
std::vector<json> rows_for(const std::vector<ChartPoint>& pts, F&& fn) {
  std::vector<json> rows(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { rows[i] = fn(pts[i]); });
  return rows;
}

struct Context {
  const RunConfig& config;
  FamilyInfo info;
  std::map<std::string, double> tol;
  std::vector<Orientation> orientations;
  std::vector<ChartPoint> points;
  std::vector<double> radii;
  QuadratureOptions quadrature;
};

bool all_pass(const std::vector<json>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const json& r) { return r.at("pass").get<bool>(); });
}

// ---------------------------------------------------------------------------

json curvature_suite(const Context& ctx) {
  const auto& info = ctx.info;
  const double tol = ctx.tol.at("ricci_relative");
  auto rows = rows_for(ctx.points, [&](const ChartPoint& p) {
    const auto [spec, q, jac] = conditioned_chart(info.spec, p);
    const CurvatureBundle c = curvature_at(spec, q);
    const double rm = c.riemann_norm(), ric = c.ricci_norm();
    const double rel = ric == 0.0 ? 0.0 : ric / std::max(rm, 1e-300);
    const double scale = std::max(1.0, c.w_plus.norm() + c.w_minus.norm());
    const double floor = 1e-12 * scale * scale * scale;
    const bool plus = c.w_plus.determinant() > floor, minus = c.w_minus.determinant() > floor;
    bool pass = plus == info.flags.wu_plus && minus == info.flags.wu_minus;
    if (info.flags.ricci_flat) pass = pass && rel < tol;
    return json{{"point", point_json(p)},
                {"riemann_norm", rm},
                {"ricci_norm", ric},
                {"ricci_relative", rel},
                {"scalar", c.scalar},
                {"w_plus_norm", c.w_plus.norm()},
                {"w_minus_norm", c.w_minus.norm()},
                {"det_w_plus", c.w_plus.determinant()},
                {"det_w_minus", c.w_minus.determinant()},
                {"pass", pass}};
  });
  const bool pass = all_pass(rows);
  return {{"points", rows}, {"tolerance", tol}, {"pass", pass}};
}

json wu_suite(const Context& ctx) {
  json out{{"orientations", json::object()}};
  bool pass = true;
  for (Orientation o : ctx.orientations) {
    auto rows = rows_for(ctx.points, [&](const ChartPoint& p) {
      const auto [spec, q, jac] = conditioned_chart(ctx.info.spec, p);
      const WuData d = rescaled_stack(spec, q, o);
      const double s_alpha = std::abs(d.s_g - 6.0 * d.spectrum_g.alpha) / std::abs(d.s_g);
      const double nabla = nabla_omega_residual(ctx.info.spec, p, o);
      const double killing = candidate_killing_residual(ctx.info.spec, p, o);
      const double jacobi = candidate_jacobi_residual(ctx.info.spec, p, o);
      const bool s_pos = d.s_g > 0.0, det_pos = d.spectrum_h.det_w > 0.0;
      const bool ok = s_pos && det_pos && s_alpha < ctx.tol.at("s_minus_6alpha") &&
                      nabla < ctx.tol.at("nabla_omega") && killing < ctx.tol.at("killing") &&
                      jacobi < ctx.tol.at("jacobi");
      return json{{"point", point_json(p)},
                  {"alpha_h", d.alpha_h},
                  {"alpha_g", d.alpha_g},
                  {"det_w_plus_h", d.spectrum_h.det_w},
                  {"det_w_plus_positive", det_pos},
                  {"s_g", d.s_g},
                  {"s_g_positive", s_pos},
                  {"s_minus_6alpha_relative", s_alpha},
                  {"nabla_omega", nabla},
                  {"killing_residual_h", killing},
                  {"jacobi_residual", jacobi},
                  {"pass", ok}};
    });
    const bool ok = all_pass(rows);
    pass = pass && ok;
    out["orientations"][orientation_name(o)] = {{"points", rows}, {"pass", ok}};
  }
  out["applicable"] = !ctx.orientations.empty();
  out["pass"] = pass;
  return out;
}

json identities_suite(const Context& ctx) {
  const auto& info = ctx.info;
  json out;
  bool pass = true;
  if (info.flags.einstein) {
    auto rows = rows_for(ctx.points, [&](const ChartPoint& p) {
      const auto r = weitzenbock_einstein_residual(info.spec, p, ctx.tol.at("weitzenbock_einstein"));
      const auto [spec, q, jac] = conditioned_chart(info.spec, p);
      const auto div = divergence_w_plus(spec, q, info.spec.orientation());
      const bool div_ok = div.norm < ctx.tol.at("divergence_w_plus");
      return json{{"point", point_json(p)},
                  {"weitzenbock", report_json(r)},
                  {"divergence_w_plus", div.norm},
                  {"pass", r.pass && div_ok}};
    });
    pass = all_pass(rows);
    out["einstein"] = {{"points", rows}, {"pass", pass}};
  }
  json by_orientation = json::object();
  for (Orientation o : ctx.orientations) {
    auto rows = rows_for(ctx.points, [&](const ChartPoint& p) {
      std::vector<ResidualReport> reps{
          weitzenbock_rescaled_residual(info.spec, p, o, ctx.tol.at("weitzenbock_rescaled")),
          rescaled_divergence_residual(info.spec, p, o, ctx.tol.at("divergence_rescaled")),
          hodge_weitzenbock_rescaled(info.spec, p, o, ctx.tol.at("hodge"))};
      for (auto& r : inequality_battery(info.spec, p, o)) reps.push_back(std::move(r));
      json list = json::array();
      bool ok = true;
      for (const auto& r : reps) {
        list.push_back(report_json(r));
        ok = ok && r.pass;
      }
      return json{{"point", point_json(p)}, {"reports", list}, {"pass", ok}};
    });
    const bool ok = all_pass(rows);
    pass = pass && ok;
    by_orientation[orientation_name(o)] = {{"points", rows}, {"pass", ok}};
  }
  out["rescaled"] = by_orientation;
  out["pass"] = pass;
  return out;
}

json flux_suite(const Context& ctx, std::vector<FluxRow>& csv) {
  json out{{"orientations", json::object()}};
  bool pass = true;
  if (!ctx.info.flags.alf) throw ConfigError(ctx.info.spec.name() + ": the flux suite needs an ALF family");
  for (Orientation o : ctx.orientations) {
    const FluxReport rep = boundary_integrals(ctx.info.spec, o, ctx.radii, ctx.quadrature);
    if (csv.empty()) csv = rep.rows;
    json rows = json::array();
    for (const auto& r : rep.rows)
      rows.push_back({{"radius", r.radius},
                      {"vol_g", r.vol_g},
                      {"wplus_int", r.wplus_int},
                      {"s_int", r.s_int},
                      {"omega_flux", r.omega_flux},
                      {"flux_magnitude", r.flux_magnitude},
                      {"s_radial", r.s_radial},
                      {"polar_nodes", r.polar_nodes}});
    json holo = json::array();
    bool holo_ok = true;
    if (ctx.radii.size() >= 2) {
      for (const auto& h : hologram_check(ctx.info.spec, o, ctx.radii, ctx.quadrature)) {
        holo.push_back({{"radius", h.radius},
                        {"boundary", h.boundary},
                        {"bulk", h.bulk},
                        {"margin", h.margin},
                        {"stokes_boundary", h.stokes_boundary},
                        {"stokes_bulk", h.stokes_bulk},
                        {"pass", h.pass}});
        holo_ok = holo_ok && h.pass;
      }
    }
    const L1Proxy l1 = scalar_curvature_l1(rep);
    const bool ok = holo_ok && l1.converges;
    pass = pass && ok;
    out["orientations"][orientation_name(o)] = {
        {"rows", rows},
        {"fits", {{"vol_g", fit_json(rep.vol_fit)}, {"wplus_int", fit_json(rep.wplus_fit)},
                  {"s_int", fit_json(rep.s_fit)}, {"omega_flux", fit_json(rep.flux_fit)}}},
        {"fit_discard", rep.discard},
        {"hologram", holo},
        {"scalar_curvature_l1",
         {{"partial_sums", l1.partial_sums}, {"tail", l1.tail}, {"converges", l1.converges},
          {"density_fit", fit_json(l1.density_fit)}}},
        {"pass", ok}};
  }
  out["applicable"] = !ctx.orientations.empty();
  out["pass"] = pass;
  return out;
}

json falloff_suite(const Context& ctx) {
  const Orientation o = ctx.orientations.empty() ? Orientation::Positive : ctx.orientations.front();
  json quantities = json::object();
  bool pass = true;
  for (const auto& name : ctx.config.quantities) {
    const FalloffQuantity q = falloff_quantity_from_string(name);
    const FalloffResult r = falloff_fit(ctx.info, q, ctx.radii, o, ctx.quadrature);
    const bool ok = r.fit.valid || r.fit.exact_zero;
    pass = pass && ok;
    quantities[name] = {{"radii", r.radii}, {"sup_values", r.sup_values}, {"fit", fit_json(r.fit)}, {"pass", ok}};
  }
  json out{{"orientation", orientation_name(o)}, {"quantities", quantities}};
  if (!ctx.orientations.empty() && ctx.info.alf) {
    const KillingAsymptote ka = killing_asymptote(ctx.info, o, ctx.radii, ctx.quadrature);
    const bool ok = ka.fit.valid || ka.fit.exact_zero;
    pass = pass && ok;
    out["killing_asymptote"] = {{"c", ka.c}, {"radii", ka.radii}, {"deviation", ka.deviation},
                                {"t_norm", ka.t_norm}, {"fit", fit_json(ka.fit)}, {"pass", ok}};
  }
  out["pass"] = pass;
  return out;
}

json compare_suite(const Context& ctx) {
  auto params = ctx.config.params;
  for (const auto& [k, v] : ctx.config.against) params[k] = v;
  const FamilyInfo other = describe(make_family(ctx.config.family, params));
  const auto plan =
      weighted_sample_plan(ctx.info, ctx.config.plan_shells, ctx.config.plan_per_shell, ctx.config.seed);
  const WeightedNorm w = weighted_distance(other.spec, ctx.info.spec, ctx.config.k, plan, ctx.info.base_radius);
  const bool ok = std::isfinite(w.value);
  return {{"against", other.family.params},
          {"k", w.k},
          {"value", w.value},
          {"per_order", w.per_order},
          {"argmax", point_json(w.argmax)},
          {"samples", w.samples},
          {"base_radius", ctx.info.base_radius},
          {"pass", ok}};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

std::map<std::string, double> default_tolerances() {
  return {{"ricci_relative", 1e-8},  {"s_minus_6alpha", 1e-8},      {"nabla_omega", 1e-6},
          {"killing", 1e-6},         {"jacobi", 1e-5},              {"weitzenbock_einstein", 1e-5},
          {"weitzenbock_rescaled", 1e-4}, {"divergence_rescaled", 1e-6}, {"hodge", 1e-5},
          {"divergence_w_plus", 1e-7}};
}

json to_json(const RunConfig& c) {
  return {{"family", c.family},
          {"params", c.params},
          {"suites", c.suites},
          {"orientations", c.orientations},
          {"samples", c.samples},
          {"seed", c.seed},
          {"radii", c.radii},
          {"resolution", {{"fibre", c.resolution.fibre}, {"polar", c.resolution.polar}, {"azimuth", c.resolution.azimuth}}},
          {"max_doublings", c.max_doublings},
          {"fit_discard", c.fit_discard},
          {"quantities", c.quantities},
          {"against", c.against},
          {"k", c.k},
          {"plan", {{"shells", c.plan_shells}, {"per_shell", c.plan_per_shell}}},
          {"tolerances", c.tolerances},
          {"report", c.report_path},
          {"csv", c.csv_path}};
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> keys{"family",  "params",     "suites",   "orientations", "samples",
                                          "seed",    "radii",      "resolution", "max_doublings", "fit_discard",
                                          "quantities", "against", "k",        "plan",         "tolerances",
                                          "report",  "csv"};
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw ConfigError("unknown config key '" + k + "'");
  RunConfig c;
  if (j.contains("family")) c.family = get<std::string>(j, "family");
  if (j.contains("params")) c.params = get<std::map<std::string, double>>(j, "params");
  if (j.contains("suites")) c.suites = get<std::vector<std::string>>(j, "suites");
  if (j.contains("orientations")) c.orientations = get<std::vector<std::string>>(j, "orientations");
  if (j.contains("samples")) c.samples = get<int>(j, "samples");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("radii")) c.radii = get<std::vector<double>>(j, "radii");
  if (j.contains("resolution")) {
    const json& r = j.at("resolution");
    if (!r.is_object()) throw ConfigError("config key 'resolution' must be an object");
    if (r.contains("fibre")) c.resolution.fibre = get<int>(r, "fibre");
    if (r.contains("polar")) c.resolution.polar = get<int>(r, "polar");
    if (r.contains("azimuth")) c.resolution.azimuth = get<int>(r, "azimuth");
  }
  if (j.contains("max_doublings")) c.max_doublings = get<int>(j, "max_doublings");
  if (j.contains("fit_discard")) c.fit_discard = get<double>(j, "fit_discard");
  if (j.contains("quantities")) c.quantities = get<std::vector<std::string>>(j, "quantities");
  if (j.contains("against")) c.against = get<std::map<std::string, double>>(j, "against");
  if (j.contains("k")) c.k = get<int>(j, "k");
  if (j.contains("plan")) {
    const json& p = j.at("plan");
    if (!p.is_object()) throw ConfigError("config key 'plan' must be an object");
    if (p.contains("shells")) c.plan_shells = get<int>(p, "shells");
    if (p.contains("per_shell")) c.plan_per_shell = get<int>(p, "per_shell");
  }
  if (j.contains("tolerances")) c.tolerances = get<std::map<std::string, double>>(j, "tolerances");
  if (j.contains("report")) c.report_path = get<std::string>(j, "report");
  if (j.contains("csv")) c.csv_path = get<std::string>(j, "csv");

  for (const auto& s : c.suites)
    if (!kSuites.count(s)) throw ConfigError("unknown suite '" + s + "'");
  for (const auto& o : c.orientations) orientation_from(o);
  for (const auto& q : c.quantities) falloff_quantity_from_string(q);
  const auto defaults = default_tolerances();
  for (const auto& [k, v] : c.tolerances) {
    if (!defaults.count(k)) throw ConfigError("unknown tolerance '" + k + "'");
    if (!(v > 0.0)) throw ConfigError("tolerance '" + k + "' must be positive");
  }
  if (c.samples < 1) throw ConfigError("samples must be positive");
  if (c.k < 0 || c.k > 3) throw ConfigError("k must lie in [0, 3]");
  if (c.resolution.fibre < 1 || c.resolution.polar < 1 || c.resolution.azimuth < 1)
    throw ConfigError("resolution entries must be positive");
  if (c.max_doublings < 1) throw ConfigError("max_doublings must be at least 1");
  if (!(c.fit_discard >= 0.0 && c.fit_discard < 1.0)) throw ConfigError("fit_discard must lie in [0, 1)");
  if (c.plan_shells < 1 || c.plan_per_shell < 1) throw ConfigError("plan entries must be positive");
  return c;
}

RunResult run(const RunConfig& c) {
  const RunConfig checked = config_from_json(to_json(c));
  const FamilyInfo info = [&] {
    try {
      return describe(make_family(checked.family, checked.params));
    } catch (const std::domain_error& e) {
      throw ConfigError(e.what());
    }
  }();
  Context ctx{checked, info, default_tolerances(), {}, {}, {}, {}};
  for (const auto& [k, v] : checked.tolerances) ctx.tol[k] = v;
  if (checked.orientations.empty()) {
    if (info.flags.wu_plus) ctx.orientations.push_back(Orientation::Positive);
    if (info.flags.wu_minus) ctx.orientations.push_back(Orientation::Negative);
  } else {
    for (const auto& o : checked.orientations) ctx.orientations.push_back(orientation_from(o));
  }
  ctx.points = sample_points(info, checked.samples, checked.seed);
  for (double r : checked.radii.empty() ? std::vector<double>{20, 40, 80, 160} : checked.radii)
    ctx.radii.push_back(r * info.mass_scale);
  ctx.quadrature.resolution = checked.resolution;
  ctx.quadrature.max_doublings = checked.max_doublings;
  ctx.quadrature.fit_discard = checked.fit_discard;

  RunResult out;
  json suites = json::object();
  bool pass = true, converged = true;
  for (const auto& name : checked.suites) {
    json s;
    try {
      if (name == "curvature") s = curvature_suite(ctx);
      if (name == "wu") s = wu_suite(ctx);
      if (name == "identities") s = identities_suite(ctx);
      if (name == "flux") s = flux_suite(ctx, out.csv_rows);
      if (name == "falloff") s = falloff_suite(ctx);
      if (name == "compare") s = compare_suite(ctx);
    } catch (const NumericalError& e) {
      s = {{"error", e.what()}, {"converged", false}, {"pass", false}};
      converged = false;
    } catch (const WuFailure& e) {
      s = {{"error", e.what()}, {"pass", false}};
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    pass = pass && s.at("pass").get<bool>();
    suites[name] = s;
  }
  out.status = !converged ? kNotConverged : pass ? kOk : kAssertionFailed;
  out.report = {{"schema_version", kSchemaVersion},
                {"config", to_json(checked)},
                {"family", {{"name", info.family.name()}, {"params", info.family.params}, {"flags", flags_json(info.flags)}}},
                {"suites", suites},
                {"pass", pass},
                {"status", out.status}};
  return out;
}

std::string csv_text(const std::vector<FluxRow>& rows) {
  std::string s = "radius,vol_g,wplus_int,s_int,omega_flux\n";
  for (const auto& r : rows)
    s += fmt(r.radius) + "," + fmt(r.vol_g) + "," + fmt(r.wplus_int) + "," + fmt(r.s_int) + "," + fmt(r.omega_flux) + "\n";
  return s;
}

std::string report_text(const json& report) { return report.dump(2) + "\n"; }

json merge_reports(const std::vector<json>& reports) {
  if (reports.empty()) throw ConfigError("nothing to merge");
  json out = reports.front();
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const json& r = reports[i];
    if (!r.contains("schema_version") || r.at("schema_version") != out.at("schema_version"))
      throw ConfigError("cannot merge reports with different schema versions");
    if (r.at("family") != out.at("family")) throw ConfigError("cannot merge reports of different families");
    for (const auto& [name, suite] : r.at("suites").items()) {
      if (out["suites"].contains(name) && out["suites"][name] != suite)
        throw ConfigError("conflicting results for suite '" + name + "'");
      out["suites"][name] = suite;
    }
    out["status"] = std::max(out.at("status").get<int>(), r.at("status").get<int>());
    out["pass"] = out.at("pass").get<bool>() && r.at("pass").get<bool>();
  }
  out.erase("config");
  json configs = json::array();
  for (const auto& r : reports)
    if (r.contains("config")) configs.push_back(r.at("config"));
  out["merged_configs"] = configs;
  return out;
}

json zoo_listing() {
  json list = json::array();
  for (const auto& name : family_names()) {
    const FamilyInfo info = describe(make_family(name));
    list.push_back({{"name", name},
                    {"chart", info.spec.chart()},
                    {"params", info.family.params},
                    {"flags", flags_json(info.flags)}});
  }
  return {{"schema_version", kSchemaVersion}, {"families", list}};
}

}  // namespace weylkit::cli
