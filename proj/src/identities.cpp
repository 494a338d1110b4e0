#include "weylkit/identities.hpp"

#include <algorithm>
#include <cmath>

#include "weylkit/exterior.hpp"

namespace weylkit {

namespace {

double frob(const Mat3& m) { return m.norm(); }

std::array<Mat4, 3> form_basis(const LocalGeometry& geo) {
  std::array<Mat4, 3> b;
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 4; ++c) b[i](a, c) = geo.plus_forms[i](a, c).value();
  return b;
}

std::array<TwoForm, 3> truncated_forms(const LocalGeometry& geo, int order) {
  std::array<TwoForm, 3> f;
  for (int i = 0; i < 3; ++i) f[i] = truncate(geo.plus_forms[i], order);
  return f;
}

Mat3 symmetric_part(const Mat3& m) { return 0.5 * (m + m.transpose()); }

// Matrix of nabla^* nabla (weight * W+) on Lambda^+, in the frame basis.
Mat3 laplacian_matrix(const LocalGeometry& geo, const Mat3J& w, const JetD& weight) {
  const int n = geo.order - 2;
  Mat3J fw = w;
  for (auto& row : fw)
    for (auto& v : row) v = weight * v.truncated(n);
  const auto lap = rough_laplacian(tensor_from_matrix(fw, truncated_forms(geo, n)), geo);
  return symmetric_part(self_dual_matrix(tensor_values(lap), form_basis(geo), values(geo.ginv)));
}

// `floor` is |Rm|^2, the natural size of every term when W+ itself vanishes.
ResidualReport weitzenbock_report(std::string name, const ChartPoint& p, const Mat3& lap, const Mat3& w, double s,
                                  double f, double floor, double tol) {
  const Mat3 sq = w * w;
  const double n2 = w.squaredNorm();
  const Mat3 r = lap + f * (0.5 * s * w - 6.0 * sq + 2.0 * n2 * Mat3::Identity());
  const double scale = std::max({frob(lap), std::abs(f * 0.5 * s) * frob(w), 6.0 * std::abs(f) * frob(sq),
                                 2.0 * std::abs(f) * n2 * std::sqrt(3.0), std::abs(f) * floor});
  return identity_report(std::move(name), p, frob(r), scale, tol);
}

double form_norm(const Tensor<JetD, 2>& t, const Mat4& ginv) {
  return std::sqrt(std::max(0.0, form_norm_sq(tensor_values(t), ginv)));
}

ResidualReport hodge_report(std::string name, const ChartPoint& p, const LocalGeometry& geo, const TwoForm& phi,
                            double tol) {
  const TwoForm phi2 = truncate(phi, 2);
  const TwoForm lhs = hodge_laplacian(phi2, geo);
  const TwoForm rough = rough_laplacian(phi2, geo);
  const TwoForm phi0 = truncate(phi2, 0);
  const TwoForm wphi = apply_to_form(truncate(geo.weyl, 0), phi0, truncate(geo.ginv, 0));
  const double s = geo.scalar.value();
  const Mat4 ginv = values(geo.ginv);
  TwoForm rhs;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) rhs(a, b) = rough(a, b).truncated(0) - 2.0 * wphi(a, b) + (s / 3.0) * phi0(a, b);
  TwoForm diff;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) diff(a, b) = lhs(a, b).truncated(0) - rhs(a, b);
  const double scale = std::max({form_norm(lhs, ginv), form_norm(rough, ginv), 2.0 * form_norm(wphi, ginv),
                                 std::abs(s / 3.0) * form_norm(phi0, ginv)});
  return identity_report(std::move(name), p, form_norm(diff, ginv), scale, tol);
}

// 1/2 W^{ab}_{cd} phi_{ab} on plain arrays.
Tensor<double, 2> apply_weyl(const Tensor<double, 4>& w, const Tensor<double, 2>& phi, const Mat4& ginv) {
  Tensor<double, 2> up(0.0);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0.0;
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) s += ginv(a, c) * ginv(b, d) * phi(c, d);
      up(a, b) = s;
    }
  Tensor<double, 2> out(0.0);
  for (int c = 0; c < 4; ++c)
    for (int d = 0; d < 4; ++d) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) s += w(a, b, c, d) * up(a, b);
      out(c, d) = 0.5 * s;
    }
  return out;
}

// 1/2 A_{ab} B^{ab}
double form_dot(const Tensor<double, 2>& a, const Tensor<double, 2>& b, const Mat4& ginv) {
  double s = 0.0;
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      for (int r = 0; r < 4; ++r)
        for (int t = 0; t < 4; ++t) s += a(p, q) * ginv(p, r) * ginv(q, t) * b(r, t);
  return 0.5 * s;
}

void check_domain(const MetricSpec& h, const ChartPoint& p) {
  if (!p.chart.empty() && p.chart != h.chart())
    throw DomainError(h.name() + ": point given in chart " + p.chart + ", metric lives on " + h.chart());
  if (!h.domain().contains(p.coords)) throw DomainError(h.name() + ": point outside domain");
}

}  // namespace

ResidualReport identity_report(std::string name, const ChartPoint& p, double residual, double scale, double tol) {
  ResidualReport r;
  r.name = std::move(name);
  r.point = p;
  r.residual = residual;
  r.scale = scale;
  r.tolerance = tol;
  r.pass = std::isfinite(residual) && residual <= tol * std::max(scale, kResidualFloor);
  return r;
}

ResidualReport inequality_report(std::string name, const ChartPoint& p, double greater, double lesser, double scale) {
  ResidualReport r;
  r.name = std::move(name);
  r.point = p;
  r.inequality = true;
  r.margin = greater - lesser;
  r.residual = lesser - greater;
  r.scale = std::max({std::abs(greater), std::abs(lesser), scale});
  r.tolerance = kInequalitySlack;
  r.pass = std::isfinite(r.margin) && r.margin >= -kInequalitySlack * std::max(r.scale, kResidualFloor);
  return r;
}

ResidualReport weitzenbock_einstein_residual(const MetricSpec& spec, const ChartPoint& p, double tol,
                                             double einstein_tol) {
  const auto [sc, pc, jc] = conditioned_chart(spec, p);
  const LocalGeometry geo = local_geometry(expand_checked(sc, pc, 4), sc.orientation(), Depth::Weyl);
  const Mat4 ginv = values(geo.ginv);
  const auto ric = tensor_values(geo.ricci);
  const double s = geo.scalar.value();
  Tensor<double, 2> ric0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) ric0(a, b) = ric(a, b) - 0.25 * s * geo.g(a, b).value();
  const double rm = std::sqrt(std::max(0.0, norm_sq(tensor_values(geo.riemann), ginv)));
  const double r0 = std::sqrt(std::max(0.0, norm_sq(ric0, ginv)));
  if (r0 > einstein_tol * std::max(rm, kResidualFloor))
    throw DomainError(spec.name() + ": metric is not Einstein at the given point");
  const Mat3 lap = laplacian_matrix(geo, geo.w_plus, JetD(1.0));
  return weitzenbock_report("weitzenbock_einstein", p, lap, symmetric_part(values(geo.w_plus)), s, 1.0, rm * rm, tol);
}

ResidualReport weitzenbock_rescaled_residual(const MetricSpec& h, const ChartPoint& p, Orientation o, double tol) {
  check_domain(h, p);
  const auto [hc, pc, jc] = conditioned_chart(h, p);
  const RescaledStack st = rescaled_stack_jets(hc, pc.coords, 6, o);
  const Mat3 lap = laplacian_matrix(st.g, st.g.w_plus, st.base.f.truncated(2));
  const double rm_sq = norm_sq(tensor_values(truncate(st.g.riemann, 0)), values(st.g.ginv));
  return weitzenbock_report("weitzenbock_rescaled", p, lap, symmetric_part(values(st.g.w_plus)), st.s_g.value(),
                            st.base.f.value(), rm_sq, tol);
}

ResidualReport rescaled_divergence_residual(const MetricSpec& h, const ChartPoint& p, Orientation o, double tol) {
  check_domain(h, p);
  const auto [hc, pc, jc] = conditioned_chart(h, p);
  const RescaledStack st = rescaled_stack_jets(hc, pc.coords, 5, o);
  const int n = st.g.order - 2;
  Mat3J fw = st.g.w_plus;
  for (auto& row : fw)
    for (auto& v : row) v = st.base.f.truncated(n) * v;
  const auto t = tensor_from_matrix(fw, truncated_forms(st.g, n));
  const Mat4 ginv = values(st.g.ginv);
  const double div = std::sqrt(std::max(0.0, norm_sq(tensor_values(divergence(t, st.g)), ginv)));
  const double grad = std::sqrt(std::max(0.0, norm_sq(tensor_values(covariant_derivative(t, st.g.christoffel)), ginv)));
  // f W+ is dimensionless (f alpha = 1), so its own size is a usable floor.
  const double size = values(fw).norm();
  return identity_report("rescaled_divergence", p, div, std::max(grad, size), tol);
}

ResidualReport hodge_weitzenbock_residual(const MetricSpec& spec, const ChartPoint& p, const TwoFormField& phi,
                                          double tol) {
  const LocalGeometry geo = local_geometry(expand_checked(spec, p, 2), spec.orientation(), Depth::Weyl);
  return hodge_report("hodge_weitzenbock", p, geo, phi(p.coords, 2), tol);
}

ResidualReport hodge_weitzenbock_rescaled(const MetricSpec& h, const ChartPoint& p, Orientation o, double tol) {
  check_domain(h, p);
  const auto [hc, pc, jc] = conditioned_chart(h, p);
  const RescaledStack st = rescaled_stack_jets(hc, pc.coords, 4, o);
  return hodge_report("hodge_weitzenbock_rescaled", p, st.g, st.omega, tol);
}

KahlerTerms kahler_terms(const MetricSpec& h, const ChartPoint& p, Orientation o) {
  check_domain(h, p);
  const auto [hc, pc, jc] = conditioned_chart(h, p);
  const RescaledStack st = rescaled_stack_jets(hc, pc.coords, 6, o);
  const LocalGeometry& geo = st.g;
  const Mat4 ginv = values(geo.ginv);
  KahlerTerms t;
  const Mat3 w = symmetric_part(values(geo.w_plus));
  t.alpha = cardano_alpha(w - (w.trace() / 3.0) * Mat3::Identity()).alpha;
  t.s = st.s_g.value();
  t.f = st.base.f.value();
  t.w_plus_norm = frob(w);

  const auto grad = tensor_values(covariant_derivative(truncate(st.omega, 1), geo.christoffel));
  t.grad_omega_sq = 0.5 * norm_sq(grad, ginv);
  const auto weyl = tensor_values(geo.weyl);
  std::array<Tensor<double, 2>, 4> slices, wslices;
  for (int e = 0; e < 4; ++e) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) slices[e](a, b) = grad(e, a, b);
    wslices[e] = apply_weyl(weyl, slices[e], ginv);
  }
  for (int e = 0; e < 4; ++e)
    for (int q = 0; q < 4; ++q) t.w_grad_grad += ginv(e, q) * form_dot(wslices[e], slices[q], ginv);

  // <nabla^* nabla (f W+), omega (x) omega> = 1/4 L_{abcd} omega^{ab} omega^{cd}
  {
    const int n = geo.order - 2;
    Mat3J fw = geo.w_plus;
    for (auto& row : fw)
      for (auto& v : row) v = st.base.f.truncated(n) * v;
    const auto lap = tensor_values(rough_laplacian(tensor_from_matrix(fw, truncated_forms(geo, n)), geo));
    Tensor<double, 2> om, up(0.0);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) om(a, b) = st.omega(a, b).value();
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) up(a, b) += ginv(a, c) * ginv(b, d) * om(c, d);
    double s = 0.0;
    for (std::size_t f = 0; f < Tensor<double, 4>::kSize; ++f) {
      const auto i = Tensor<double, 4>::unflat(f);
      s += lap.at_flat(f) * up(i[0], i[1]) * up(i[2], i[3]);
    }
    t.lap_fw_omega = 0.25 * s;
  }

  const TwoForm om2 = truncate(st.omega, 2);
  const TwoForm lap = hodge_laplacian(om2, geo);
  t.omega_hodge_lap = form_dot(tensor_values(truncate(om2, 0)), tensor_values(lap), ginv);
  t.omega_wedge_lap = top_form_scalar(wedge_top(truncate(om2, 0), lap), geo).value();

  const auto dw = exterior_derivative(om2);
  t.d_omega_sq = form_norm_sq(tensor_values(dw), ginv);
  const auto star_dw = hodge_star(dw, geo);
  const auto flux = wedge(truncate(om2, 1), star_dw);
  t.flux_form_norm = std::sqrt(std::max(0.0, form_norm_sq(tensor_values(flux), ginv)));
  const auto delta = tensor_values(codifferential(om2, geo));
  t.codiff_norm = std::sqrt(std::max(0.0, norm_sq(delta, ginv)));
  const auto dflux = exterior_derivative(flux);
  t.d_flux = top_form_scalar(dflux(0, 1, 2, 3), geo).value();
  return t;
}

std::vector<ResidualReport> inequality_battery(const KahlerTerms& t, const ChartPoint& p) {
  // Natural magnitudes of the curvature-type quantities entering each side.
  const double k1 = std::abs(t.s) + t.w_plus_norm + t.alpha;
  std::vector<ResidualReport> out;
  out.push_back(inequality_report("(a) W+(grad omega, grad omega) <= 0", p, 0.0, t.w_grad_grad, k1 * t.grad_omega_sq));
  out.push_back(inequality_report("(b) <lap(fW+), omega x omega> >= 2|grad omega|^2", p, t.lap_fw_omega,
                                  2.0 * t.grad_omega_sq, k1));
  out.push_back(inequality_report("(c) 0 >= |grad omega|^2/2 + 3/2 <omega, hodge lap omega>", p, 0.0,
                                  0.5 * t.grad_omega_sq + 1.5 * t.omega_hodge_lap, k1));
  out.push_back(inequality_report("(d) 2 sqrt6 |W+| - s >= 2|grad omega|^2", p,
                                  2.0 * std::sqrt(6.0) * t.w_plus_norm - t.s, 2.0 * t.grad_omega_sq, k1));
  const double g = std::sqrt(t.grad_omega_sq);
  out.push_back(inequality_report("(e) 2 sqrt2 |grad omega| >= |omega ^ *d omega|", p, 2.0 * std::sqrt(2.0) * g,
                                  t.flux_form_norm, std::sqrt(k1)));
  out.push_back(inequality_report("(e') |grad omega| >= |omega ^ *d omega|", p, g, t.flux_form_norm, std::sqrt(k1)));
  out.push_back(inequality_report("(f) 3 *d[omega ^ *d omega] >= |grad omega|^2/2 + 3|d omega|^2", p, 3.0 * t.d_flux,
                                  0.5 * t.grad_omega_sq + 3.0 * t.d_omega_sq, k1));
  out.push_back(inequality_report("4 sqrt3 alpha >= s_+", p, 4.0 * std::sqrt(3.0) * t.alpha, std::max(t.s, 0.0), k1));
  return out;
}

std::vector<ResidualReport> inequality_battery(const MetricSpec& h, const ChartPoint& p, Orientation o) {
  return inequality_battery(kahler_terms(h, p, o), p);
}

}  // namespace weylkit
