#include "weylkit/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "weylkit/exterior.hpp"
#include "weylkit/parallel.hpp"

namespace weylkit {

namespace {

double frob(const Mat3& w) { return std::sqrt((w.array() * w.array()).sum()); }

Mat3 symmetric_part(const Mat3& m) { return 0.5 * (m + m.transpose()); }

bool is_cyclic(const MetricSpec& spec, int i) {
  const auto& c = spec.cyclic_coordinates();
  return std::find(c.begin(), c.end(), i) != c.end();
}

// Two-sided 97.5% quantile of Student's t.
double t_quantile(int dof) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                 2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                 2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof <= 0) return std::numeric_limits<double>::infinity();
  if (dof <= 30) return table[dof - 1];
  return 1.96 + 2.4 / dof;
}

void check_radii(const MetricSpec& spec, const std::vector<double>& radii) {
  if (radii.empty()) throw std::invalid_argument("empty radius list");
  const auto& r = spec.domain().ranges[1];
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > r.lo + r.lo_margin) || !(radii[i] < r.hi - r.hi_margin))
      throw DomainError(spec.name() + ": radius " + std::to_string(radii[i]) + " outside the chart");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw std::invalid_argument("radii must increase");
  }
}

// Integrand values shared by the construction and the generic evaluator.  geo
// and omega live in the evaluation chart, n is d rho in that chart.
void form_terms(const LocalGeometry& geo, const TwoForm& omega, const Vec4& n, ShellIntegrands& out) {
  const Mat4 ginv = values(geo.ginv);
  out.wplus = frob(symmetric_part(values(geo.w_plus)));
  out.s = geo.scalar.value();

  const TwoForm om2 = truncate(omega, 2);
  const auto dw = exterior_derivative(om2);
  const auto flux_form = wedge(truncate(om2, 1), hodge_star(dw, geo));
  out.divergence = top_form_scalar(exterior_derivative(flux_form)(0, 1, 2, 3), geo).value();

  // omega ^ * d omega = i_V vol, so V_flat = - * (omega ^ * d omega).
  const auto star = hodge_star(flux_form, geo);
  Vec4 v;
  for (int a = 0; a < 4; ++a) v[a] = -star(a).value();
  out.flux = v.dot(ginv * n) / std::sqrt(n.dot(ginv * n));
  out.flux_magnitude = std::sqrt(std::max(0.0, v.dot(ginv * v)));

  const auto grad = tensor_values(covariant_derivative(truncate(om2, 1), geo.christoffel));
  out.energy = 0.25 * norm_sq(grad, ginv) + 3.0 * form_norm_sq(tensor_values(dw), ginv);
}

// Chart-dependent parts, from the primary-chart components of g.
void primary_terms(const Mat4& g, ShellIntegrands& out) {
  Mat3 sigma;
  const int idx[3] = {0, 2, 3};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) sigma(i, j) = g(idx[i], idx[j]);
  out.density = std::sqrt(std::max(0.0, sigma.determinant()));
  out.volume = std::sqrt(std::max(0.0, g.determinant()));
  out.lapse = 1.0 / std::sqrt(g.inverse()(1, 1));
}

Vec4 radial_covector(const Mat4& jacobian) {
  if (jacobian.isIdentity(0.0)) return Vec4(0.0, 1.0, 0.0, 0.0);
  return jacobian.inverse().row(1).transpose();
}

struct ColumnSums {
  double vol = 0, wplus = 0, s = 0, flux = 0, s_radial = 0, flux_magnitude = 0;
};

ColumnSums integrate_shell(const HypersurfaceGrid& grid, const ShellEvaluator& eval) {
  const std::size_t n = grid.nodes.size();
  std::vector<ShellIntegrands> vals(n);
  parallel_for(n, [&](std::size_t i) { vals[i] = eval(grid.nodes[i].x); });
  std::vector<double> c[6];
  for (auto& v : c) v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = grid.nodes[i].weight * vals[i].density;
    c[0][i] = w;
    c[1][i] = w * vals[i].wplus;
    c[2][i] = w * std::abs(vals[i].s);
    c[3][i] = w * vals[i].flux;
    c[4][i] = w * std::abs(vals[i].s) * vals[i].lapse;
    c[5][i] = w * vals[i].flux_magnitude;
  }
  return {pairwise_sum(c[0]), pairwise_sum(c[1]), pairwise_sum(c[2]),
          pairwise_sum(c[3]), pairwise_sum(c[4]), pairwise_sum(c[5])};
}

bool converged(const ColumnSums& a, const ColumnSums& b, double tol) {
  // Columns that vanish identically are judged against an absolute floor
  // built from the shell volume, which fixes the length scale.
  const double abs_floor = 1e-12 * std::max(std::abs(b.vol), 1e-300);
  auto ok = [&](double x, double y, double scale) {
    return std::abs(x - y) <= tol * std::max(std::abs(y), scale) + abs_floor;
  };
  return ok(a.vol, b.vol, 0.0) && ok(a.wplus, b.wplus, 0.0) && ok(a.s, b.s, b.wplus) &&
         ok(a.flux, b.flux, b.flux_magnitude) && ok(a.s_radial, b.s_radial, 0.0);
}

double zero_floor(const std::vector<double>& scale, double rel) {
  double m = 0.0;
  for (double v : scale) m = std::max(m, std::abs(v));
  return rel * m;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

// ---------------------------------------------------------------------------

void gauss_legendre(int n, double lo, double hi, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  // Golub-Welsch: eigen-decomposition of the Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jm(k, k - 1) = jm(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  nodes.resize(n);
  weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double x = es.eigenvalues()[k];
    // Enforce the exact symmetry of the rule.
    if (2 * k + 1 == n) x = 0.0;
    nodes[k] = mid + half * x;
    const double v = es.eigenvectors()(0, k);
    weights[k] = 2.0 * v * v * half;
  }
  for (int k = 0; k < n / 2; ++k) {
    const double w = 0.5 * (weights[k] + weights[n - 1 - k]);
    weights[k] = weights[n - 1 - k] = w;
  }
}

HypersurfaceGrid make_grid(const MetricSpec& spec, double radius, const ShellResolution& res, bool collapse_cyclic) {
  HypersurfaceGrid grid;
  grid.radius = radius;
  grid.resolution = res;
  const int dirs[3] = {0, 2, 3};
  const int counts[3] = {res.fibre, res.polar, res.azimuth};
  std::vector<double> x[3], w[3];
  for (int d = 0; d < 3; ++d) {
    const int i = dirs[d];
    const auto& r = spec.domain().ranges[i];
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi))
      throw DomainError(spec.name() + ": coordinate " + std::to_string(i) + " is unbounded, no shell quadrature");
    if (counts[d] < 1) throw std::invalid_argument("make_grid: node counts must be positive");
    if (collapse_cyclic && r.periodic && is_cyclic(spec, i)) {
      x[d] = {0.5 * (r.lo + r.hi)};
      w[d] = {r.period()};
    } else if (r.periodic) {
      const double h = r.period() / counts[d];
      for (int k = 0; k < counts[d]; ++k) {
        x[d].push_back(r.lo + k * h);
        w[d].push_back(h);
      }
    } else {
      gauss_legendre(counts[d], r.lo, r.hi, x[d], w[d]);
    }
  }
  grid.nodes.reserve(x[0].size() * x[1].size() * x[2].size());
  for (std::size_t a = 0; a < x[0].size(); ++a)
    for (std::size_t b = 0; b < x[1].size(); ++b)
      for (std::size_t c = 0; c < x[2].size(); ++c)
        grid.nodes.push_back({Vec4(x[0][a], radius, x[1][b], x[2][c]), w[0][a] * w[1][b] * w[2][c]});
  return grid;
}

std::vector<double> induced_volume_element(const HypersurfaceGrid& grid, const MetricSpec& metric) {
  std::vector<double> out(grid.nodes.size());
  parallel_for(out.size(), [&](std::size_t i) {
    ShellIntegrands v;
    primary_terms(metric.components(grid.nodes[i].x), v);
    out[i] = v.density * grid.nodes[i].weight;
  });
  return out;
}

// ---------------------------------------------------------------------------

PowerFit power_fit(const std::vector<double>& radii, const std::vector<double>& values, double discard,
                   double floor) {
  if (radii.size() != values.size()) throw std::invalid_argument("power_fit: size mismatch");
  PowerFit fit;
  const int n = static_cast<int>(radii.size());
  if (n == 0) return fit;
  fit.exact_zero = std::all_of(values.begin(), values.end(), [&](double v) { return std::abs(v) <= floor; });
  int skip = static_cast<int>(std::floor(std::clamp(discard, 0.0, 1.0) * n));
  skip = std::min(skip, std::max(0, n - 2));
  fit.window_start = radii[skip];
  fit.points_used = n - skip;
  if (fit.exact_zero || fit.points_used < 2) return fit;
  std::vector<double> lx, ly;
  for (int i = skip; i < n; ++i) {
    if (!(std::abs(values[i]) > 0.0) || !(radii[i] > 0.0)) return fit;
    lx.push_back(std::log(radii[i]));
    ly.push_back(std::log(std::abs(values[i])));
  }
  const int m = fit.points_used;
  double mx = 0, my = 0;
  for (int i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) return fit;
  fit.valid = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ssr = std::max(0.0, syy - fit.slope * sxy);
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  if (m > 2) {
    const double se = std::sqrt(ssr / (m - 2) / sxx);
    const double t = t_quantile(m - 2);
    fit.ci_low = fit.slope - t * se;
    fit.ci_high = fit.slope + t * se;
  } else {
    fit.ci_low = -std::numeric_limits<double>::infinity();
    fit.ci_high = std::numeric_limits<double>::infinity();
  }
  return fit;
}

// ---------------------------------------------------------------------------

ShellEvaluator rescaled_shell_evaluator(const MetricSpec& h, Orientation o) {
  return [h, o](const Vec4& x) {
    const ConditionedPoint c = conditioned_chart(h, {x, h.chart()});
    const RescaledStack st = rescaled_stack_jets(c.spec, c.point.coords, 4, o);
    ShellIntegrands v;
    form_terms(st.g, st.omega, radial_covector(c.jacobian), v);
    primary_terms(st.base.weight.value() * h.components(x), v);
    return v;
  };
}

ShellEvaluator shell_evaluator(const MetricSpec& g, const TwoFormField& omega) {
  return [g, omega](const Vec4& x) {
    const LocalGeometry geo = local_geometry(g.expand(x, 2), g.orientation(), Depth::Weyl);
    ShellIntegrands v;
    form_terms(geo, omega(x, 2), Vec4(0.0, 1.0, 0.0, 0.0), v);
    primary_terms(values(geo.g), v);
    return v;
  };
}

FluxReport boundary_integrals(const MetricSpec& chart_spec, const ShellEvaluator& eval,
                              const std::vector<double>& radii, const QuadratureOptions& opts) {
  check_radii(chart_spec, radii);
  FluxReport rep;
  rep.discard = opts.fit_discard;
  for (double r : radii) {
    ShellResolution res = opts.resolution;
    ColumnSums prev = integrate_shell(make_grid(chart_spec, r, res, opts.collapse_cyclic), eval);
    bool done = false;
    for (int d = 0; d < opts.max_doublings && !done; ++d) {
      res = res.doubled();
      const ColumnSums next = integrate_shell(make_grid(chart_spec, r, res, opts.collapse_cyclic), eval);
      done = converged(prev, next, opts.convergence_tol);
      prev = next;
    }
    if (!done)
      throw NumericalError(chart_spec.name() + ": shell quadrature at radius " + std::to_string(r) +
                           " not stable under node doubling");
    rep.rows.push_back({r, prev.vol, prev.wplus, prev.s, prev.flux, prev.s_radial, prev.flux_magnitude, res.polar});
  }
  std::vector<double> vol, wp, s, fl, mag;
  for (const auto& row : rep.rows) {
    vol.push_back(row.vol_g);
    wp.push_back(row.wplus_int);
    s.push_back(row.s_int);
    fl.push_back(row.omega_flux);
    mag.push_back(row.vol_g);
  }
  rep.vol_fit = power_fit(radii, vol, opts.fit_discard, 0.0);
  rep.wplus_fit = power_fit(radii, wp, opts.fit_discard, 0.0);
  rep.s_fit = power_fit(radii, s, opts.fit_discard, 0.0);
  // The flux is an exact zero when it stays at quadrature noise relative to the shell volume.
  rep.flux_fit = power_fit(radii, fl, opts.fit_discard, zero_floor(mag, 1e-10));
  return rep;
}

FluxReport boundary_integrals(const MetricSpec& h, Orientation o, const std::vector<double>& radii,
                              const QuadratureOptions& opts) {
  return boundary_integrals(h, rescaled_shell_evaluator(h, o), radii, opts);
}

FluxReport boundary_integrals(const MetricSpec& g, const TwoFormField& omega, const std::vector<double>& radii,
                              QuadratureOptions opts) {
  opts.collapse_cyclic = false;
  return boundary_integrals(g, shell_evaluator(g, omega), radii, opts);
}

std::vector<HologramRow> hologram_check(const MetricSpec& h, Orientation o, const std::vector<double>& radii,
                                        const QuadratureOptions& opts, int radial_nodes) {
  if (radii.size() < 2) throw std::invalid_argument("hologram_check: need at least two radii");
  const ShellEvaluator eval = rescaled_shell_evaluator(h, o);
  const FluxReport flux = boundary_integrals(h, eval, radii, opts);
  const HypersurfaceGrid shape = make_grid(h, radii.front(), opts.resolution, opts.collapse_cyclic);

  std::vector<HologramRow> out;
  double energy = 0.0, divergence = 0.0, scale = 0.0;
  for (std::size_t k = 1; k < radii.size(); ++k) {
    std::vector<double> rn, rw;
    gauss_legendre(radial_nodes, radii[k - 1], radii[k], rn, rw);
    const std::size_t m = shape.nodes.size();
    std::vector<ShellIntegrands> vals(rn.size() * m);
    parallel_for(vals.size(), [&](std::size_t i) {
      Vec4 x = shape.nodes[i % m].x;
      x[1] = rn[i / m];
      vals[i] = eval(x);
    });
    std::vector<double> e(vals.size()), d(vals.size()), a(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double w = rw[i / m] * shape.nodes[i % m].weight * vals[i].volume;
      e[i] = w * vals[i].energy;
      d[i] = w * vals[i].divergence;
      a[i] = w * std::abs(vals[i].divergence);
    }
    energy += pairwise_sum(e);
    divergence += pairwise_sum(d);
    scale += pairwise_sum(a);

    HologramRow row;
    row.radius = radii[k];
    row.stokes_boundary = flux.rows[k].omega_flux - flux.rows[0].omega_flux;
    row.boundary = 3.0 * row.stokes_boundary;
    row.bulk = energy;
    row.stokes_bulk = divergence;
    row.margin = row.boundary - row.bulk;
    const double slack = 1e-6 * std::max({std::abs(row.boundary), row.bulk, 3.0 * scale}) +
                         1e-10 * flux.rows[k].vol_g;
    row.pass = row.margin >= -slack;
    out.push_back(row);
  }
  return out;
}

L1Proxy scalar_curvature_l1(const FluxReport& report) {
  L1Proxy out;
  std::vector<double> r, v;
  for (const auto& row : report.rows) {
    r.push_back(row.radius);
    v.push_back(row.s_radial);
  }
  double sum = 0.0;
  out.partial_sums.push_back(0.0);
  for (std::size_t k = 1; k < r.size(); ++k) {
    sum += 0.5 * (v[k] + v[k - 1]) * (r[k] - r[k - 1]);
    out.partial_sums.push_back(sum);
  }
  out.density_fit = power_fit(r, v, report.discard, 0.0);
  if (out.density_fit.exact_zero) {
    out.converges = true;
  } else if (out.density_fit.valid && out.density_fit.ci_high < -1.0) {
    out.converges = true;
    out.tail = -v.back() * r.back() / (out.density_fit.slope + 1.0);
  } else {
    out.tail = std::numeric_limits<double>::infinity();
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(FalloffQuantity q) {
  switch (q) {
    case FalloffQuantity::Riemann: return "riemann";
    case FalloffQuantity::WPlus: return "w_plus";
    case FalloffQuantity::AlphaH: return "alpha_h";
    case FalloffQuantity::AlphaG: return "alpha_g";
    case FalloffQuantity::GradAlphaG: return "grad_alpha_g";
  }
  return "";
}

FalloffQuantity falloff_quantity_from_string(const std::string& s) {
  for (auto q : {FalloffQuantity::Riemann, FalloffQuantity::WPlus, FalloffQuantity::AlphaH, FalloffQuantity::AlphaG,
                 FalloffQuantity::GradAlphaG})
    if (to_string(q) == s) return q;
  throw ConfigError("unknown fall-off quantity '" + s + "'");
}

double falloff_value(const MetricSpec& h, const Vec4& x, FalloffQuantity q, Orientation o) {
  // Shell nodes may sit inside the axis margin; the conditioned chart (or the
  // raw chart where none is registered) is evaluated without the margin check.
  const ConditionedPoint c = conditioned_chart(h, {x, h.chart()});
  const Vec4& y = c.point.coords;
  auto alpha_of = [](const Mat3& w) { return cardano_alpha(w - (w.trace() / 3.0) * Mat3::Identity()).alpha; };
  switch (q) {
    case FalloffQuantity::Riemann:
    case FalloffQuantity::WPlus:
    case FalloffQuantity::AlphaH: {
      const LocalGeometry geo = local_geometry(c.spec.expand(y, 2), o, Depth::Weyl);
      if (q == FalloffQuantity::Riemann) return std::sqrt(std::max(0.0, norm_sq(tensor_values(geo.riemann), values(geo.ginv))));
      const Mat3 w = symmetric_part(values(geo.w_plus));
      return q == FalloffQuantity::WPlus ? frob(w) : alpha_of(w);
    }
    case FalloffQuantity::AlphaG:
      return alpha_of(symmetric_part(values(rescaled_stack_jets(c.spec, y, 4, o).g.w_plus)));
    case FalloffQuantity::GradAlphaG: {
      // alpha_g = f^2 alpha_h = alpha_h^{1/3}
      const ConformalData cd = conformal_data(c.spec, y, 3, o);
      const JetD ag = cbrt(cd.alpha_h);
      const Mat4 ginv = values(cd.g).inverse();
      Vec4 d;
      for (int a = 0; a < 4; ++a) d[a] = ag.derivative(a).value();
      return std::sqrt(std::max(0.0, d.dot(ginv * d)));
    }
  }
  return 0.0;
}

FalloffResult falloff_fit(const FamilyInfo& info, FalloffQuantity q, const std::vector<double>& radii, Orientation o,
                          const QuadratureOptions& opts) {
  if (!info.flags.alf) throw DomainError(info.spec.name() + ": fall-off fits need an ALF family");
  check_radii(info.spec, radii);
  FalloffResult out;
  out.quantity = q;
  out.radii = radii;
  for (double r : radii) {
    const HypersurfaceGrid grid = make_grid(info.spec, r, opts.resolution, opts.collapse_cyclic);
    std::vector<double> v(grid.nodes.size());
    parallel_for(v.size(), [&](std::size_t i) { v[i] = std::abs(falloff_value(info.spec, grid.nodes[i].x, q, o)); });
    out.sup_values.push_back(*std::max_element(v.begin(), v.end()));
  }
  const double l = info.mass_scale;
  out.fit = power_fit(radii, out.sup_values, opts.fit_discard, 1e-12 / (l * l));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<ChartPoint> weighted_sample_plan(const FamilyInfo& info, int shells, int per_shell, std::uint64_t seed,
                                             double outer) {
  if (!info.flags.alf) throw DomainError(info.spec.name() + ": weighted norms are defined on ALF ends");
  if (shells < 1 || per_shell < 1) throw std::invalid_argument("weighted_sample_plan: empty plan");
  // The first shell sits just outside the core so that nearby parameter values share it.
  const double r0 = info.inner_radius + 0.1 * info.mass_scale, r1 = outer * info.mass_scale;
  if (!(r1 > r0)) throw std::invalid_argument("weighted_sample_plan: outer radius inside the core");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ChartPoint> plan;
  for (int k = 0; k < shells; ++k) {
    const double r = shells == 1 ? r0 : r0 * std::pow(r1 / r0, static_cast<double>(k) / (shells - 1));
    for (int j = 0; j < per_shell; ++j) {
      Vec4 x;
      for (int i = 0; i < 4; ++i) x[i] = info.box.lo[i] + u(rng) * (info.box.hi[i] - info.box.lo[i]);
      x[1] = r;
      plan.push_back({x, info.spec.chart()});
    }
  }
  return plan;
}

namespace {

template <std::size_t R>
double tensor_norm(const Tensor<JetD, R>& t, const Mat4& ginv) {
  return std::sqrt(std::max(0.0, norm_sq(tensor_values(t), ginv)));
}

struct NormSample {
  double total = 0.0;
  std::array<double, 4> terms{};
};

NormSample weighted_terms(const MetricSpec& h, const MetricSpec& h0, int k, const ChartPoint& p, double dist) {
  const ConditionedPoint a = conditioned_chart(h, p);
  const ConditionedPoint b = conditioned_chart(h0, p);
  // Both metrics move to the regular chart only when their coordinate changes agree.
  const bool shared = a.point.chart == b.point.chart && a.point.coords == b.point.coords && a.jacobian == b.jacobian;
  const MetricSpec& hs = shared ? a.spec : h;
  const MetricSpec& h0s = shared ? b.spec : h0;
  const Vec4 x = shared ? b.point.coords : p.coords;

  const auto e = h0s.expand(x, std::max(k, 1));
  const LocalGeometry geo = local_geometry(e, Orientation::Positive, Depth::Connection);
  const Mat4 ginv = values(geo.ginv);
  const auto diff = truncate(hs.expand(x, k) - e, k);

  NormSample s;
  auto add = [&](int j, double norm) {
    s.terms[j] = std::pow(1.0 + dist, j + 1) * norm;
    s.total += s.terms[j];
  };
  add(0, tensor_norm(diff, ginv));
  // nabla^j of the difference carries a jet of order k - j.
  if (k >= 1) {
    const auto d1 = covariant_derivative(diff, truncate(geo.christoffel, k - 1));
    add(1, tensor_norm(d1, ginv));
    if (k >= 2) {
      const auto d2 = covariant_derivative(d1, truncate(geo.christoffel, k - 2));
      add(2, tensor_norm(d2, ginv));
      if (k >= 3) add(3, tensor_norm(covariant_derivative(d2, truncate(geo.christoffel, k - 3)), ginv));
    }
  }
  return s;
}

}  // namespace

WeightedNorm weighted_distance(const MetricSpec& h, const MetricSpec& h0, int k, const std::vector<ChartPoint>& plan,
                               double base_radius) {
  if (k < 0 || k > 3) throw std::invalid_argument("weighted_distance: k must lie in [0, 3]");
  if (h.chart() != h0.chart())
    throw DomainError("chart mismatch: " + h.name() + " on " + h.chart() + ", " + h0.name() + " on " + h0.chart());
  for (const auto& p : plan) {
    if (!p.chart.empty() && p.chart != h0.chart()) throw DomainError("chart mismatch: sample point on " + p.chart);
    if (!h.domain().contains(p.coords) || !h0.domain().contains(p.coords))
      throw DomainError("weighted_distance: sample point outside a domain");
  }
  std::vector<NormSample> s(plan.size());
  parallel_for(plan.size(), [&](std::size_t i) {
    s[i] = weighted_terms(h, h0, k, plan[i], std::abs(plan[i].coords[1] - base_radius));
  });
  WeightedNorm out;
  out.k = k;
  out.samples = static_cast<int>(plan.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == 0 || s[i].total > out.value) {
      out.value = s[i].total;
      out.argmax = plan[i];
    }
    for (int j = 0; j < 4; ++j) out.per_order[j] = std::max(out.per_order[j], s[i].terms[j]);
  }
  return out;
}

// ---------------------------------------------------------------------------

KillingAsymptote killing_asymptote(const MetricSpec& h, const Vec4& T, const PointVectorField& xi,
                                   const std::vector<double>& radii, const QuadratureOptions& opts) {
  check_radii(h, radii);
  struct Shell {
    std::vector<Vec4> x, xi;
    std::vector<Mat4> g;
  };
  std::vector<Shell> shells;
  for (double r : radii) {
    const HypersurfaceGrid grid = make_grid(h, r, opts.resolution, opts.collapse_cyclic);
    Shell s;
    const std::size_t n = grid.nodes.size();
    s.x.resize(n);
    s.xi.resize(n);
    s.g.resize(n);
    parallel_for(n, [&](std::size_t i) {
      const Vec4& x = grid.nodes[i].x;
      s.x[i] = x;
      s.g[i] = h.components(x);
      s.xi[i] = xi({x, h.chart()});
    });
    shells.push_back(std::move(s));
  }

  KillingAsymptote out;
  out.radii = radii;
  const Shell& last = shells.back();
  std::vector<double> ratio;
  double xi_sup = 0.0, t_sup = 0.0;
  for (std::size_t i = 0; i < last.x.size(); ++i) {
    const double tt = T.dot(last.g[i] * T);
    ratio.push_back(last.xi[i].dot(last.g[i] * T) / tt);
    xi_sup = std::max(xi_sup, std::sqrt(last.xi[i].dot(last.g[i] * last.xi[i])));
    t_sup = std::max(t_sup, std::sqrt(tt));
  }
  out.c = median(ratio);
  if (!std::isfinite(out.c) || std::abs(out.c) * t_sup <= 1e-8 * xi_sup || xi_sup == 0.0)
    throw NumericalError(h.name() + ": xi is not asymptotic to a multiple of T");

  for (const Shell& s : shells) {
    double dev = 0.0, tn = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const Vec4 d = s.xi[i] / out.c - T;
      dev = std::max(dev, std::sqrt(std::max(0.0, d.dot(s.g[i] * d))));
      tn = std::max(tn, std::sqrt(T.dot(s.g[i] * T)));
    }
    out.deviation.push_back(dev);
    out.t_norm.push_back(tn);
  }
  out.fit = power_fit(radii, out.deviation, opts.fit_discard, zero_floor(out.t_norm, 1e-9));
  return out;
}

KillingAsymptote killing_asymptote(const FamilyInfo& info, Orientation o, const std::vector<double>& radii,
                                   const QuadratureOptions& opts) {
  if (!info.flags.alf || !info.alf) throw DomainError(info.spec.name() + ": no fibre field at infinity");
  const MetricSpec h = info.spec;
  const Vec4 T = info.alf->T;
  // omega, hence J and xi, is fixed only up to sign; take the sign with <xi, T> >= 0.
  PointVectorField xi = [h, o, T](const ChartPoint& p) {
    const Vec4 v = killing_candidate_at(h, p, o);
    return v.dot(h.components(p.coords) * T) < 0.0 ? Vec4(-v) : v;
  };
  return killing_asymptote(h, T, xi, radii, opts);
}

}  // namespace weylkit
