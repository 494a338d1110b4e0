// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "runner.hpp"
#include "weylkit/identities.hpp"
#include "weylkit/parallel.hpp"

using namespace weylkit;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

FamilyInfo family(const char* name, const std::map<std::string, double>& params = {}) {
  return describe(make_family(name, params));
}

double det_of(const Mat3& w) { return cardano_alpha(w).det_w; }

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0.0, 1.0);
  auto random_orthogonal = [&] {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = n(rng);
    Eigen::HouseholderQR<Mat3> qr(m);
    return Mat3(qr.householderQ());
  };
  const auto t0 = Clock::now();
  double worst = 0.0, worst_degenerate = 0.0;
  for (int i = 0; i < 11000; ++i) {
    Mat3 w;
    const bool degenerate = i >= 10000;
    if (degenerate) {
      const double scale = std::exp(3.0 * n(rng));
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;  // beta = gamma, or alpha = beta
      const Mat3 q = random_orthogonal();
      w = q * (scale * sign * Vec3(2.0, -1.0, -1.0)).asDiagonal() * q.transpose();
      w = 0.5 * (w + w.transpose());
      w -= (w.trace() / 3.0) * Mat3::Identity();
    } else {
      for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) w(a, b) = w(b, a) = n(rng);
      w -= (w.trace() / 3.0) * Mat3::Identity();
    }
    const WuSpectrum c = cardano_alpha(w), j = jacobi_eigen_oracle(w);
    const double scale = std::max(1.0, std::sqrt(j.norm_sq_w));
    const double d =
        std::max({std::abs(c.alpha - j.alpha), std::abs(c.beta - j.beta), std::abs(c.gamma - j.gamma)}) / scale;
    (degenerate ? worst_degenerate : worst) = std::max(degenerate ? worst_degenerate : worst, d);
  }
  const double t = seconds_since(t0);
  return {std::max(worst, worst_degenerate) < 1e-11 && t < 5.0,
          fmt("max discrepancy %.2e generic, %.2e degenerate (limit 1e-11); %.2f s (limit 5 s)", worst,
              worst_degenerate, t)};
}

Outcome einstein_selfcheck() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (const char* name : {"schwarzschild", "kerr", "taub_nut", "taub_bolt", "eguchi_hanson"}) {
    const RicciReport r = ricci_flat_selfcheck(family(name), 100, 7, 1e-8);
    pass = pass && r.pass && r.samples == 100;
    detail += fmt("%s %.1e; ", name, r.max_relative);
  }
  const double t = seconds_since(t0);
  return {pass && t < 60.0, detail + fmt("limit 1e-8; %.1f s (limit 60 s)", t)};
}

Outcome wu_signs() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"kerr", "taub_bolt"}) {
    const auto info = family(name);
    double min_plus = INFINITY, min_minus = INFINITY;
    for (const auto& p : sample_points(info, 100, 11)) {
      const auto [spec, q, jac] = conditioned_chart(info.spec, p);
      const auto c = curvature_at(spec, q);
      min_plus = std::min(min_plus, det_of(c.w_plus));
      min_minus = std::min(min_minus, det_of(c.w_minus));
    }
    pass = pass && min_plus > 0.0 && min_minus > 0.0;
    detail += fmt("%s min det W+ %.2e, min det W- %.2e; ", name, min_plus, min_minus);
  }
  const auto nut = family("taub_nut");
  double flat_half = 0.0, other_det = INFINITY;
  for (const auto& p : sample_points(nut, 100, 11)) {
    const auto [spec, q, jac] = conditioned_chart(nut.spec, p);
    const auto c = curvature_at(spec, q);
    const bool plus_small = c.w_plus.norm() < c.w_minus.norm();
    flat_half = std::max(flat_half, plus_small ? c.w_plus.norm() : c.w_minus.norm());
    other_det = std::min(other_det, det_of(plus_small ? c.w_minus : c.w_plus));
  }
  pass = pass && flat_half < 1e-9 && other_det > 0.0;
  detail += fmt("taub_nut max |W| of flat half %.1e (limit 1e-9), min det of other half %.2e", flat_half, other_det);
  return {pass, detail};
}

struct KahlerCheck {
  double s_alpha = 0.0, nabla = 0.0, killing = 0.0, jacobi = 0.0, min_s = INFINITY;
  bool pass() const { return s_alpha < 1e-8 && min_s > 0 && nabla < 1e-6 && killing < 1e-6 && jacobi < 1e-5; }
  std::string str() const {
    return fmt("|s-6a|/|s| %.1e, min s_g %.3f, |grad omega| %.1e, Killing %.1e, Jacobi %.1e", s_alpha, min_s, nabla,
               killing, jacobi);
  }
};

KahlerCheck kahler_check(const FamilyInfo& info, int count, std::uint64_t seed) {
  const auto pts = sample_points(info, count, seed);
  std::vector<KahlerCheck> per(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& p = pts[i];
    const auto [spec, q, jac] = conditioned_chart(info.spec, p);
    const WuData d = rescaled_stack(spec, q, Orientation::Positive);
    per[i].s_alpha = std::abs(d.s_g - 6.0 * d.spectrum_g.alpha) / std::abs(d.s_g);
    per[i].min_s = d.s_g;
    per[i].nabla = nabla_omega_residual(info.spec, p, Orientation::Positive);
    per[i].killing = candidate_killing_residual(info.spec, p, Orientation::Positive);
    per[i].jacobi = candidate_jacobi_residual(info.spec, p, Orientation::Positive);
  });
  KahlerCheck k;
  for (const auto& c : per) {
    k.s_alpha = std::max(k.s_alpha, c.s_alpha);
    k.nabla = std::max(k.nabla, c.nabla);
    k.killing = std::max(k.killing, c.killing);
    k.jacobi = std::max(k.jacobi, c.jacobi);
    k.min_s = std::min(k.min_s, c.min_s);
  }
  return k;
}

Outcome conformal_kahler() {
  const auto t0 = Clock::now();
  const KahlerCheck k = kahler_check(family("kerr", {{"m", 1.0}, {"a", 0.3}}), 200, 21);
  const double t = seconds_since(t0);
  return {k.pass() && t < 600.0, k.str() + fmt(" at 200 points; %.1f s (limit 600 s)", t)};
}

Outcome identity_suite() {
  double einstein = 0.0, rescaled = 0.0, hodge = 0.0, div = 0.0, div_fw = 0.0;
  const auto schw = family("schwarzschild");
  for (const auto& p : sample_points(schw, 50, 31)) {
    const auto r = weitzenbock_einstein_residual(schw.spec, p, 1e-5);
    einstein = std::max(einstein, r.residual / std::max(r.scale, kResidualFloor));
  }
  const auto kerr = family("kerr");
  for (const auto& p : sample_points(kerr, 50, 31)) {
    const auto r = weitzenbock_rescaled_residual(kerr.spec, p, Orientation::Positive, 1e-4);
    rescaled = std::max(rescaled, r.residual / std::max(r.scale, kResidualFloor));
    const auto hw = hodge_weitzenbock_rescaled(kerr.spec, p, Orientation::Positive, 1e-5);
    hodge = std::max(hodge, hw.residual / std::max(hw.scale, kResidualFloor));
  }
  std::string families;
  for (const auto& name : family_names()) {
    const auto info = family(name.c_str());
    if (!info.flags.einstein) continue;
    families += name + " ";
    for (const auto& p : sample_points(info, 20, 32)) {
      const auto [spec, q, jac] = conditioned_chart(info.spec, p);
      div = std::max(div, divergence_w_plus(spec, q, info.spec.orientation()).norm);
      for (Orientation o : {Orientation::Positive, Orientation::Negative}) {
        if (!(o == Orientation::Positive ? info.flags.wu_plus : info.flags.wu_minus)) continue;
        div_fw = std::max(div_fw, rescaled_divergence_residual(info.spec, p, o).residual);
      }
    }
  }
  const bool pass = einstein < 1e-5 && rescaled < 1e-4 && hodge < 1e-5 && div < 1e-7 && div_fw < 1e-6;
  return {pass, fmt("Einstein Weitzenbock %.1e (1e-5), rescaled Weitzenbock %.1e (1e-4), Hodge %.1e (1e-5), "
                    "|div W+| %.1e (1e-7), |div(fW+)| %.1e (1e-6) over %s",
                    einstein, rescaled, hodge, div, div_fw, families.c_str())};
}

Outcome inequality_battery_check() {
  int violations = 0, checks = 0;
  double worst_margin = INFINITY;
  for (const char* name : {"kerr", "taub_bolt"}) {
    const auto info = family(name);
    const auto pts = sample_points(info, 200, 41);
    std::vector<std::vector<ResidualReport>> reps(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { reps[i] = inequality_battery(info.spec, pts[i], Orientation::Positive); });
    for (const auto& list : reps)
      for (const auto& r : list) {
        ++checks;
        if (!r.pass) ++violations;
        worst_margin = std::min(worst_margin, r.margin);
      }
  }
  return {violations == 0 && checks > 0,
          fmt("%d violations in %d checks; smallest margin %.1e (rounding slack %.0e)", violations, checks,
              worst_margin, kInequalitySlack)};
}

std::vector<double> ladder(const FamilyInfo& info) {
  std::vector<double> r;
  for (double x : {20.0, 40.0, 80.0, 160.0}) r.push_back(x * info.mass_scale);
  return r;
}

Outcome falloff() {
  const auto kerr = family("kerr");
  const auto w = falloff_fit(kerr, FalloffQuantity::WPlus, ladder(kerr));
  const auto a = falloff_fit(kerr, FalloffQuantity::AlphaG, ladder(kerr));
  const bool pass = w.fit.valid && a.fit.valid && std::abs(w.fit.slope + 3.0) <= 0.1 && std::abs(a.fit.slope + 1.0) <= 0.1;
  return {pass, fmt("sup|W+_h| slope %.3f (-3 +- 0.1), alpha_g slope %.3f (-1 +- 0.1)", w.fit.slope, a.fit.slope)};
}

Outcome flux_limits() {
  const auto t0 = Clock::now();
  const auto kerr = family("kerr");
  const FluxReport r = boundary_integrals(kerr.spec, Orientation::Positive, ladder(kerr));
  const bool vol = r.vol_fit.valid && std::abs(r.vol_fit.slope + 1.0) <= 0.3;
  const bool wp = r.wplus_fit.valid && std::abs(r.wplus_fit.slope + 2.0) <= 0.3;
  bool flux = false;
  std::string flux_detail;
  if (r.flux_fit.exact_zero) {
    double sup = 0.0;
    for (const auto& row : r.rows) sup = std::max(sup, std::abs(row.omega_flux));
    flux = true;
    flux_detail = fmt("flux exact zero (sup %.1e, below floor)", sup);
  } else {
    flux = true;
    for (std::size_t i = 1; i < r.rows.size(); ++i)
      flux = flux && std::abs(r.rows[i].omega_flux) < std::abs(r.rows[i - 1].omega_flux);
    flux_detail = fmt("flux %.3e -> %.3e, monotone %s", r.rows.front().omega_flux, r.rows.back().omega_flux,
                      flux ? "yes" : "no");
  }
  const double t = seconds_since(t0);
  return {vol && wp && flux && t < 900.0,
          fmt("vol_g slope %.3f (-1 +- 0.3), int|W+_g| slope %.3f (-2 +- 0.3), ", r.vol_fit.slope, r.wplus_fit.slope) +
              flux_detail + fmt("; %.1f s (limit 900 s)", t)};
}

Outcome perturbation() {
  const auto base = family("kerr", {{"m", 1.0}, {"a", 0.3}});
  const auto plan = weighted_sample_plan(base, 12, 16, 5);
  std::vector<double> deltas{1e-3, 2e-3, 4e-3}, values;
  bool finite = true, killing = true;
  std::string kdetail;
  for (double d : deltas) {
    const auto pert = family("kerr", {{"m", 1.0}, {"a", 0.3 + d}});
    const auto w = weighted_distance(pert.spec, base.spec, 3, plan, base.base_radius);
    finite = finite && std::isfinite(w.value);
    values.push_back(w.value);
    const KahlerCheck k = kahler_check(pert, 50, 51);
    killing = killing && k.killing < 1e-6 && k.jacobi < 1e-5;
    kdetail = fmt("Killing %.1e, Jacobi %.1e at the largest delta", k.killing, k.jacobi);
  }
  // Linear scaling: a straight line through the origin explains the distances.
  double sxy = 0, sxx = 0, syy = 0, mean = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i) mean += values[i] / deltas.size();
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    sxy += deltas[i] * values[i];
    sxx += deltas[i] * deltas[i];
  }
  const double slope = sxy / sxx;
  double ss_res = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    ss_res += std::pow(values[i] - slope * deltas[i], 2);
    syy += std::pow(values[i] - mean, 2);
  }
  const double r2 = 1.0 - ss_res / syy;
  const PowerFit pf = power_fit(deltas, values, 0.0, 0.0);
  return {finite && r2 > 0.99 && killing,
          fmt("C3_1 distances %.3e, %.3e, %.3e; R^2 %.5f (limit 0.99), log-log slope %.3f; ", values[0], values[1],
              values[2], r2, pf.slope) +
              kdetail};
}

Outcome ambitoric() {
  const auto kerr = family("kerr");
  const auto pts = sample_points(kerr, 100, 61);
  std::vector<double> res(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { res[i] = ambitoric_stack(kerr.spec, pts[i]).killing_tensor_residual; });
  const double worst = *std::max_element(res.begin(), res.end());
  return {worst < 1e-5, fmt("max Killing-tensor residual %.1e at 100 points (limit 1e-5)", worst)};
}

Outcome killing_asymptote_check() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"kerr", "taub_bolt"}) {
    const auto info = family(name);
    const auto k = killing_asymptote(info, Orientation::Positive, ladder(info));
    if (k.fit.exact_zero) {
      double sup = 0.0;
      for (double d : k.deviation) sup = std::max(sup, d);
      detail += fmt("%s exact zero (xi = %.4f T, sup deviation %.1e); ", name, k.c, sup);
    } else {
      const bool ok = k.fit.valid && std::abs(k.fit.slope + 1.0) <= 0.3;
      pass = pass && ok;
      detail += fmt("%s slope %.3f (-1 +- 0.3); ", name, k.fit.slope);
    }
  }
  return {pass, detail};
}

Outcome determinism() {
  cli::RunConfig c;
  c.family = "kerr";
  c.suites = {"curvature", "wu", "identities", "falloff", "compare"};
  c.samples = 8;
  c.seed = 99;
  c.against = {{"a", 0.31}};
  c.plan_shells = 4;
  c.plan_per_shell = 4;
  const std::string a = cli::report_text(cli::run(c).report);
  const std::string b = cli::report_text(cli::run(c).report);
  return {a == b, fmt("two runs, %zu bytes each, %s", a.size(), a == b ? "identical" : "different")};
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"oracle equivalence", oracle_equivalence},
      {"Einstein self-check", einstein_selfcheck},
      {"Wu-criterion signs", wu_signs},
      {"conformal Kahler construction on Kerr", conformal_kahler},
      {"identity suite", identity_suite},
      {"inequality battery", inequality_battery_check},
      {"fall-off exponents", falloff},
      {"flux limits", flux_limits},
      {"weighted-norm perturbation", perturbation},
      {"ambitoric Killing tensor", ambitoric},
      {"Killing asymptote", killing_asymptote_check},
      {"determinism", determinism},
  };
  int failed = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d %s  %s: %s\n", index, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
