#include "weylkit/wu.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace weylkit {

namespace {

constexpr int kPairOrder[6][2] = {{0, 1}, {2, 3}, {0, 2}, {3, 1}, {0, 3}, {1, 2}};

double frob(const Mat3& w) { return std::sqrt((w.array() * w.array()).sum()); }

Mat3 checked_tracefree(const Mat3& w, const char* who) {
  if (!w.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite input");
  const double n = frob(w);
  const double tol = 1e-12 * n + 1e-300;
  if (frob(w - w.transpose()) > tol) throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
  if (std::abs(w.trace()) > tol) throw std::invalid_argument(std::string(who) + ": matrix is not trace-free");
  Mat3 s = 0.5 * (w + w.transpose());
  s -= (s.trace() / 3.0) * Mat3::Identity();
  return s;
}

// Largest root of x^3 - (n2/2) x - det on the principal branch.
double top_root(double n2, double det) {
  const double cube = n2 * n2 * n2 / 54.0;
  double rad = cube - det * det;
  if (rad < 0.0) {
    if (rad < -1e-12 * n2 * n2 * n2) throw NumericalError("cardano: negative discriminant beyond rounding");
    rad = 0.0;
  }
  const std::complex<double> z(det, std::sqrt(rad));
  const double r = std::cbrt(std::abs(z));
  const double theta = std::arg(z);
  return std::cbrt(4.0) * r * std::cos(theta / 3.0);
}

// Eigenvalues of w restricted to the orthogonal complement of v, descending.
std::pair<double, double> deflate(const Mat3& w, const Vec3& v) {
  int k = 0;
  v.cwiseAbs().minCoeff(&k);
  const Vec3 seed = Vec3::Unit(k);
  Vec3 u1 = (seed - seed.dot(v) * v).normalized();
  Vec3 u2 = v.cross(u1).normalized();
  const double b11 = u1.dot(w * u1), b22 = u2.dot(w * u2), b12 = u1.dot(w * u2);
  const double mean = 0.5 * (b11 + b22);
  const double rad = std::hypot(0.5 * (b11 - b22), b12);
  return {mean + rad, mean - rad};
}

Mat4 form_values(const TwoForm& t) {
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = t(i, j).value();
  return m;
}

// +1 or -1 such that the form (coordinate components `w`) gets the reference sign.
double anchor_sign(const Mat4& w, const std::optional<Mat4>& anchor) {
  if (anchor) {
    double dot = 0.0, na = 0.0, nw = 0.0;
    for (const auto& pr : kPairOrder) {
      dot += (*anchor)(pr[0], pr[1]) * w(pr[0], pr[1]);
      na += (*anchor)(pr[0], pr[1]) * (*anchor)(pr[0], pr[1]);
      nw += w(pr[0], pr[1]) * w(pr[0], pr[1]);
    }
    if (std::abs(dot) > 1e-8 * std::sqrt(na * nw)) return dot > 0.0 ? 1.0 : -1.0;
  }
  double big = 0.0;
  for (const auto& pr : kPairOrder) big = std::max(big, std::abs(w(pr[0], pr[1])));
  for (const auto& pr : kPairOrder) {
    const double v = w(pr[0], pr[1]);
    if (std::abs(v) > 1e-3 * big) return v > 0.0 ? 1.0 : -1.0;
  }
  return 1.0;
}

JetD det3(const Mat3J& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3J symmetrized(const Mat3J& m) {
  Mat3J s = m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s[i][j] = 0.5 * (m[i][j] + m[j][i]);
  return s;
}

int iterations_for(int order) {
  int n = 1;
  while ((1 << (n - 1)) <= order + 1) ++n;
  return n + 1;
}

Tensor<JetD, 2> raise_first(const Tensor<JetD, 2>& ginv, const TwoForm& w) {
  // J^c_a = g^{cb} w_{ab}
  Tensor<JetD, 2> j(JetD(0.0));
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a) {
      JetD s(0.0);
      for (int b = 0; b < 4; ++b) s += ginv(c, b) * w(a, b);
      j(c, a) = s;
    }
  return j;
}

std::array<JetD, 4> lower(const Tensor<JetD, 2>& g, const std::array<JetD, 4>& v) {
  std::array<JetD, 4> out;
  for (int a = 0; a < 4; ++a) {
    JetD s(0.0);
    for (int b = 0; b < 4; ++b) s += g(a, b) * v[b];
    out[a] = s;
  }
  return out;
}

LocalGeometry geometry_of(const MetricSpec& spec, const ChartPoint& p, int order, Depth depth) {
  return local_geometry(expand_checked(spec, p, order), spec.orientation(), depth);
}

}  // namespace

// ---------------------------------------------------------------------------

WuSpectrum cardano_alpha(const Mat3& w_in) {
  const Mat3 w = checked_tracefree(w_in, "cardano_alpha");
  WuSpectrum s;
  s.norm_sq_w = (w.array() * w.array()).sum();
  s.det_w = w.determinant();
  if (s.norm_sq_w == 0.0) return s;
  if (s.det_w >= 0.0) {
    s.alpha = top_root(s.norm_sq_w, s.det_w);
    const auto [b, g] = deflate(w, eigenvector_for(w, s.alpha));
    s.beta = std::min(b, s.alpha);
    s.gamma = g;
  } else {
    // The principal branch loses accuracy when the two upper roots merge; the
    // reflected matrix has them at the bottom, where the formula is stable.
    s.gamma = -top_root(s.norm_sq_w, -s.det_w);
    const auto [a, b] = deflate(w, eigenvector_for(w, s.gamma));
    s.alpha = a;
    s.beta = std::max(b, s.gamma);
  }
  return s;
}

WuSpectrum jacobi_eigen_oracle(const Mat3& w_in) {
  Mat3 a = checked_tracefree(w_in, "jacobi_eigen_oracle");
  WuSpectrum s;
  s.norm_sq_w = (a.array() * a.array()).sum();
  s.det_w = a.determinant();
  const double target = 1e-14 * std::sqrt(s.norm_sq_w);
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = std::sqrt(2.0 * (a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2)));
    if (off <= target) {
      std::array<double, 3> d{a(0, 0), a(1, 1), a(2, 2)};
      std::sort(d.begin(), d.end(), std::greater<>());
      s.alpha = d[0];
      s.beta = d[1];
      s.gamma = d[2];
      return s;
    }
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (a(p, q) == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
        rot(p, p) = c;
        rot(q, q) = c;
        rot(p, q) = t * c;
        rot(q, p) = -t * c;
        a = rot.transpose() * a * rot;
        a(p, q) = a(q, p) = 0.0;
      }
  }
  throw NumericalError("jacobi_eigen_oracle: no convergence");
}

Vec3 eigenvector_for(const Mat3& w, double lambda) {
  const Mat3 a = w - lambda * Mat3::Identity();
  const Vec3 r0 = a.row(0), r1 = a.row(1), r2 = a.row(2);
  const Vec3 cands[3] = {r0.cross(r1), r0.cross(r2), r1.cross(r2)};
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (cands[i].squaredNorm() > cands[best].squaredNorm()) best = i;
  if (cands[best].squaredNorm() == 0.0) {
    // a has rank <= 1: any vector orthogonal to its nonzero row works.
    Vec3 r = r0.squaredNorm() >= r1.squaredNorm() ? r0 : r1;
    if (r2.squaredNorm() > r.squaredNorm()) r = r2;
    if (r.squaredNorm() == 0.0) return Vec3::Unit(0);
    int k = 0;
    r.cwiseAbs().minCoeff(&k);
    return r.cross(Vec3::Unit(k)).normalized();
  }
  return cands[best].normalized();
}

Eigenform top_eigenform(const Mat3& w, const std::array<Mat4, 3>* basis, const std::optional<Vec3>& anchor) {
  const WuSpectrum s = cardano_alpha(w);
  if (!(s.det_w > 0.0)) throw WuFailure("top_eigenform: det W is not positive");
  const double scale = std::sqrt(s.norm_sq_w);
  Eigenform out;
  out.gap = s.alpha - s.beta;
  if (out.gap < 1e-10 * scale) throw NumericalError("top_eigenform: alpha is not a simple eigenvalue");
  Vec3 c = eigenvector_for(w, s.alpha);
  double sign = 0.0;
  if (anchor) {
    const double dot = anchor->dot(c);
    if (std::abs(dot) > 1e-12 * anchor->norm()) sign = dot > 0.0 ? 1.0 : -1.0;
  }
  if (sign == 0.0) {
    sign = 1.0;
    for (int i = 0; i < 3; ++i)
      if (std::abs(c[i]) > 1e-3) {
        sign = c[i] > 0.0 ? 1.0 : -1.0;
        break;
      }
  }
  out.coefficients = sign * c;
  out.form = Mat4::Zero();
  if (basis)
    for (int i = 0; i < 3; ++i) out.form += out.coefficients[i] * (*basis)[i];
  return out;
}

double conformal_factor(double alpha_h) {
  if (!(alpha_h > 0.0)) throw WuFailure("conformal_factor: alpha must be positive");
  return 1.0 / std::cbrt(alpha_h);
}

// ---------------------------------------------------------------------------

ConformalData conformal_data(const MetricSpec& h, const Vec4& p, int order, Orientation o,
                             const std::optional<Mat4>& anchor, Eigenbranch branch) {
  if (order < 2) throw std::invalid_argument("conformal_data: order must be at least 2");
  ConformalData cd;
  cd.h = local_geometry(h.expand(p, order), o, Depth::Weyl);
  const int n = order - 2;
  cd.w = symmetrized(cd.h.w_plus);
  const Mat3 w0 = values(cd.w);
  cd.spectrum_h = cardano_alpha(w0 - (w0.trace() / 3.0) * Mat3::Identity());
  const auto& sp = cd.spectrum_h;
  // Relative to the full Weyl tensor, so that a vanishing half (hyperkahler
  // side) is not mistaken for a positive determinant made of rounding noise.
  const double weyl_scale = std::sqrt(sp.norm_sq_w + (values(cd.h.w_minus).array().square()).sum());
  if (!(sp.det_w > 1e-12 * weyl_scale * weyl_scale * weyl_scale) || sp.norm_sq_w <= 1e-20 * weyl_scale * weyl_scale)
    throw WuFailure(h.name() + ": det W+ is not positive");
  if (sp.alpha - sp.beta < 1e-10 * std::sqrt(sp.norm_sq_w))
    throw NumericalError(h.name() + ": top eigenvalue of W+ is not simple");

  // alpha as the simple root of the characteristic polynomial, lifted by Newton.
  JetD n2(0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) n2 += cd.w[i][j] * cd.w[i][j];
  const JetD det = det3(cd.w);
  JetD x = JetD::constant(sp.alpha, n);
  for (int it = 0; it < iterations_for(n); ++it) {
    const JetD chi = x * x * x - 0.5 * n2 * x - det;
    const JetD dchi = 3.0 * x * x - 0.5 * n2;
    x = x - chi / dchi;
  }
  cd.alpha_h = x;

  // Spectral projector onto the alpha line.
  Mat3J proj;
  const JetD denom = 3.0 * x * x - 0.5 * n2;
  const JetD shift = det / x;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      JetD m2(0.0);
      for (int k = 0; k < 3; ++k) m2 += cd.w[i][k] * cd.w[k][j];
      JetD v = m2 + x * cd.w[i][j];
      if (i == j) v += shift;
      proj[i][j] = v / denom;
    }

  Vec3 seed = eigenvector_for(w0, sp.alpha);
  if (branch == Eigenbranch::Complement) {
    const double lo = sp.beta - sp.gamma;
    if (lo > 1e-8 * std::sqrt(sp.norm_sq_w)) {
      seed = eigenvector_for(w0, sp.beta);
    } else {
      int k = 0;
      seed.cwiseAbs().minCoeff(&k);
      seed = seed.cross(Vec3::Unit(k)).normalized();
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) proj[i][j] = (i == j ? JetD(1.0) : JetD(0.0)) - proj[i][j];
  }

  std::array<JetD, 3> c;
  for (int i = 0; i < 3; ++i) {
    JetD v(0.0);
    for (int j = 0; j < 3; ++j) v += proj[i][j] * seed[j];
    c[i] = v;
  }
  const JetD inv_len = 1.0 / sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
  for (auto& ci : c) ci = ci * inv_len;

  TwoForm omega(JetD(0.0));
  for (int i = 0; i < 3; ++i) omega += truncate(cd.h.plus_forms[i], n).map([&](const JetD& e) { return c[i] * e; });
  const double sign = anchor_sign(form_values(omega), anchor);
  if (sign < 0.0) {
    for (auto& ci : c) ci = -ci;
    omega = omega.map([](const JetD& e) { return -e; });
  }
  cd.c = c;
  cd.c0 = Vec3(c[0].value(), c[1].value(), c[2].value());
  cd.omega_h = omega;

  const JetD root = cbrt(x);
  cd.f = 1.0 / root;
  cd.weight = root * root;
  const auto hn = truncate(cd.h.g, n);
  cd.g = hn.map([&](const JetD& e) { return cd.weight * e; });
  return cd;
}

MetricSpec rescaled_metric(const MetricSpec& h, Orientation o) {
  MetricSpec::ExpandFn fn = [h, o](const Vec4& p, int k) {
    if (k + 2 > kMaxJetOrder) throw std::invalid_argument("rescaled_metric: expansion order too high");
    return conformal_data(h, p, k + 2, o).g;
  };
  MetricSpec g(h.name() + "_rescaled", h.chart(), h.domain(), fn, o);
  g.set_cyclic_coordinates(h.cyclic_coordinates());
  if (h.has_regular_chart()) {
    g.set_regular_chart([h, o](const Vec4& p, MetricSpec& out, Vec4& q, Mat4& jac) {
      const ConditionedPoint c = conditioned_chart(h, {p, h.chart()});
      if (c.point.chart == h.chart()) return false;
      out = rescaled_metric(c.spec, o);
      q = c.point.coords;
      jac = c.jacobian;
      return true;
    });
  }
  return g;
}

RescaledStack rescaled_stack_jets(const MetricSpec& h, const Vec4& p, int order, Orientation o,
                                  const std::optional<Mat4>& anchor) {
  RescaledStack st;
  st.base = conformal_data(h, p, order, o, anchor);
  const int n = order - 2;
  st.g = local_geometry(st.base.g, o, n >= 2 ? Depth::Weyl : Depth::Connection);
  st.omega = st.base.omega_h.map([&](const JetD& e) { return st.base.weight * e; });
  st.J = raise_first(st.g.ginv, st.omega);
  if (n >= 2) st.s_g = st.g.scalar;
  if (n >= 3) {
    st.has_xi = true;
    const int m = n - 3;
    const auto ginv = truncate(st.g.ginv, m);
    const auto J = truncate(st.J, m);
    std::array<JetD, 4> grad;
    for (int a = 0; a < 4; ++a) {
      JetD s(0.0);
      for (int d = 0; d < 4; ++d) s += ginv(a, d) * st.s_g.derivative(d);
      grad[a] = s;
    }
    for (int c = 0; c < 4; ++c) {
      JetD s(0.0);
      for (int a = 0; a < 4; ++a) s += J(c, a) * grad[a];
      st.xi[c] = s;
    }
  }
  return st;
}

WuData rescaled_stack(const MetricSpec& h, const ChartPoint& p, Orientation o, const std::optional<Mat4>& anchor) {
  if (!p.chart.empty() && p.chart != h.chart())
    throw DomainError(h.name() + ": point given in chart " + p.chart + ", metric lives on " + h.chart());
  if (!h.domain().contains(p.coords)) throw DomainError(h.name() + ": point outside domain");
  const RescaledStack st = rescaled_stack_jets(h, p.coords, 5, o, anchor);
  WuData d;
  d.point = p;
  d.orientation = o;
  d.spectrum_h = st.base.spectrum_h;
  d.w_plus_g = values(symmetrized(st.g.w_plus));
  d.spectrum_g = cardano_alpha(d.w_plus_g - (d.w_plus_g.trace() / 3.0) * Mat3::Identity());
  d.omega = form_values(st.omega);
  d.f = st.base.f.value();
  d.alpha_h = st.base.alpha_h.value();
  d.alpha_g = d.spectrum_g.alpha;
  d.J = form_values(st.J);
  d.s_g = st.s_g.value();
  for (int c = 0; c < 4; ++c) d.xi[c] = st.xi[c].value();
  d.g = form_values(st.g.g);

  const Mat4 ginv = d.g.inverse();
  const auto wo = apply_to_form(truncate(st.g.weyl, 0), truncate(st.omega, 0), truncate(st.g.ginv, 0));
  Tensor<double, 2> diff;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) diff(a, b) = wo(a, b).value() - d.alpha_g * d.omega(a, b);
  d.eigen_residual = std::sqrt(std::max(0.0, form_norm_sq(diff, ginv)));
  d.j_square_residual = (d.J * d.J + Mat4::Identity()).norm();
  return d;
}

std::vector<Mat4> eigenforms_along(const MetricSpec& h, const std::vector<ChartPoint>& path, Orientation o,
                                   const std::optional<Mat4>& seed) {
  std::vector<Mat4> out;
  out.reserve(path.size());
  std::optional<Mat4> anchor = seed;
  for (const auto& p : path) {
    if (!h.domain().contains(p.coords)) throw DomainError(h.name() + ": path leaves the domain");
    const ConformalData cd = conformal_data(h, p.coords, 2, o, anchor);
    Mat4 w = form_values(cd.omega_h) * cd.weight.value();
    out.push_back(w);
    anchor = w;
  }
  return out;
}

// ---------------------------------------------------------------------------

ScalarField alpha_field(const MetricSpec& h, Orientation o) {
  return [h, o](const Vec4& p, int k) { return conformal_data(h, p, k + 2, o).alpha_h; };
}

ScalarField conformal_factor_field(const MetricSpec& h, Orientation o) {
  return [h, o](const Vec4& p, int k) { return conformal_data(h, p, k + 2, o).f; };
}

ScalarField scalar_curvature_g_field(const MetricSpec& h, Orientation o) {
  return [h, o](const Vec4& p, int k) { return rescaled_stack_jets(h, p, k + 4, o).s_g; };
}

VectorField killing_candidate(const MetricSpec& h, Orientation o) {
  return [h, o](const Vec4& p, int k) { return rescaled_stack_jets(h, p, k + 5, o).xi; };
}

TwoFormField eigenform_field(const MetricSpec& h, Orientation o, Eigenbranch branch) {
  return [h, o, branch](const Vec4& p, int k) {
    const ConformalData cd = conformal_data(h, p, k + 2, o, std::nullopt, branch);
    return cd.omega_h.map([&](const JetD& e) { return cd.weight * e; });
  };
}

double parallel_form_residual(const MetricSpec& g, const TwoFormField& omega, const ChartPoint& p) {
  const LocalGeometry geo = geometry_of(g, p, 1, Depth::Connection);
  const TwoForm w = truncate(omega(p.coords, 1), 1);
  const auto dw = tensor_values(covariant_derivative(w, geo.christoffel));
  return std::sqrt(std::max(0.0, 0.5 * norm_sq(dw, values(geo.g).inverse())));
}

double nabla_omega_residual(const MetricSpec& h, const ChartPoint& p, Orientation o) {
  if (!h.domain().contains(p.coords)) throw DomainError(h.name() + ": point outside domain");
  const ConditionedPoint c = conditioned_chart(h, p);
  const RescaledStack st = rescaled_stack_jets(c.spec, c.point.coords, 3, o);
  const auto dw = tensor_values(covariant_derivative(st.omega, st.g.christoffel));
  return std::sqrt(std::max(0.0, 0.5 * norm_sq(dw, values(st.g.g).inverse())));
}

Vec4 killing_candidate_at(const MetricSpec& h, const ChartPoint& p, Orientation o) {
  const ConditionedPoint c = conditioned_chart(h, p);
  const auto xi = rescaled_stack_jets(c.spec, c.point.coords, 5, o).xi;
  const Vec4 v(xi[0].value(), xi[1].value(), xi[2].value(), xi[3].value());
  return c.jacobian.partialPivLu().solve(v);
}

double candidate_killing_residual(const MetricSpec& h, const ChartPoint& p, Orientation o, bool in_g) {
  if (!h.domain().contains(p.coords)) throw DomainError(h.name() + ": point outside domain");
  const ConditionedPoint c = conditioned_chart(h, p);
  const VectorField xi = killing_candidate(c.spec, o);
  return in_g ? killing_residual(rescaled_metric(c.spec, o), xi, c.point) : killing_residual(c.spec, xi, c.point);
}

double candidate_jacobi_residual(const MetricSpec& h, const ChartPoint& p, Orientation o) {
  if (!h.domain().contains(p.coords)) throw DomainError(h.name() + ": point outside domain");
  const ConditionedPoint c = conditioned_chart(h, p);
  return jacobi_killing_residual(c.spec, killing_candidate(c.spec, o), c.point);
}

double killing_residual(const MetricSpec& spec, const VectorField& xi, const ChartPoint& p) {
  const LocalGeometry geo = geometry_of(spec, p, 1, Depth::Connection);
  std::array<JetD, 4> v = xi(p.coords, 1);
  for (auto& e : v) e = e.truncated(1);
  const auto lo = lower(geo.g, v);
  Tensor<JetD, 1> t;
  for (int a = 0; a < 4; ++a) t(a) = lo[a];
  const auto dxi = tensor_values(covariant_derivative(t, geo.christoffel));
  Tensor<double, 2> sym;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) sym(a, b) = 0.5 * (dxi(a, b) + dxi(b, a));
  return std::sqrt(std::max(0.0, norm_sq(sym, values(geo.g).inverse())));
}

double jacobi_killing_residual(const MetricSpec& spec, const VectorField& xi, const ChartPoint& p) {
  const LocalGeometry geo = geometry_of(spec, p, 2, Depth::Curvature);
  std::array<JetD, 4> v = xi(p.coords, 2);
  for (auto& e : v) e = e.truncated(2);
  const auto lo = lower(geo.g, v);
  Tensor<JetD, 1> t;
  for (int a = 0; a < 4; ++a) t(a) = lo[a];
  const auto ddxi = tensor_values(covariant_derivative(covariant_derivative(t, geo.christoffel), geo.christoffel));
  const auto rm = tensor_values(geo.riemann);
  Tensor<double, 3> res;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double r = 0.0;
        for (int d = 0; d < 4; ++d) r += rm(c, b, a, d) * v[d].value();
        res(a, b, c) = ddxi(a, b, c) - r;
      }
  return std::sqrt(std::max(0.0, norm_sq(res, values(geo.g).inverse())));
}

// ---------------------------------------------------------------------------

AmbiKahlerPair ambitoric_stack(const MetricSpec& h, const ChartPoint& p, KillingTensorMetric metric) {
  constexpr int kOrder = 3;
  AmbiKahlerPair out;
  if (!h.domain().contains(p.coords)) throw DomainError(h.name() + ": point outside domain");
  out.plus = rescaled_stack(h, p, Orientation::Positive);
  out.minus = rescaled_stack(h, p, Orientation::Negative);

  const ConformalData cp = conformal_data(h, p.coords, kOrder, Orientation::Positive);
  const ConformalData cm = conformal_data(h, p.coords, kOrder, Orientation::Negative);
  const int n = kOrder - 2;
  const auto hg = truncate(cp.h.g, n);
  const auto hinv = truncate(cp.h.ginv, n);
  JetD ap = cbrt(cp.alpha_h), am = cbrt(cm.alpha_h);
  Tensor<JetD, 2> jp = raise_first(hinv, cp.omega_h), jm = raise_first(hinv, cm.omega_h);

  // xi_pm = alpha_pm^{-2} J_pm grad_h alpha_pm, at the base point.
  auto xi_of = [&](const JetD& a, const Tensor<JetD, 2>& J) {
    const Mat4 hi = values(cp.h.ginv);
    Vec4 da;
    for (int k = 0; k < 4; ++k) da[k] = a.derivative(k).value();
    return Vec4((form_values(J) * (hi * da)) / (a.value() * a.value()));
  };
  const Mat4 h0 = values(cp.h.g);
  const Vec4 xp = xi_of(ap, jp), xm = xi_of(am, jm);
  const double norm_p = xp.dot(h0 * xp);
  if (!(norm_p > 0.0)) throw NumericalError("ambitoric_stack: xi_+ vanishes");
  out.k = xm.dot(h0 * xp) / norm_p;
  if (out.k == 0.0) throw NumericalError("ambitoric_stack: xi_- is orthogonal to xi_+");
  // Rescaling alpha_- by c with h fixed multiplies xi_- by 1/c.
  am = am * std::abs(out.k);
  if (out.k < 0.0) jm = jm.map([](const JetD& e) { return -e; });

  // S = (1/2)(a+^-2 + a-^-2) I + (a+ a-)^-1 J+ J-
  Tensor<JetD, 2> S(JetD(0.0));
  const JetD diag = 0.5 * (1.0 / (ap * ap) + 1.0 / (am * am));
  const JetD cross = 1.0 / (ap * am);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      JetD s(0.0);
      for (int c = 0; c < 4; ++c) s += jp(a, c) * jm(c, b);
      S(a, b) = cross * s + (a == b ? diag : JetD(0.0));
    }
  out.S = form_values(S);

  // Killing tensor K_ab = m(S., .) in the selected metric m.
  JetD scale(1.0);
  if (metric == KillingTensorMetric::GPlus) scale = ap * ap;
  if (metric == KillingTensorMetric::GMinus) scale = am * am;
  const MetricExpansion<double> m = hg.map([&](const JetD& e) { return scale * e; });
  const LocalGeometry mg = local_geometry(m, Orientation::Positive, Depth::Connection);
  Tensor<JetD, 2> K;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      JetD s(0.0);
      for (int c = 0; c < 4; ++c) s += m(a, c) * S(c, b);
      K(a, b) = s;
    }
  Tensor<double, 2> asym;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) asym(a, b) = 0.5 * (K(a, b).value() - K(b, a).value());
  const Mat4 minv = values(m).inverse();
  out.symmetry_residual = std::sqrt(std::max(0.0, norm_sq(asym, minv)));
  Tensor<JetD, 2> Ks;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) Ks(a, b) = 0.5 * (K(a, b) + K(b, a));
  const auto dk = tensor_values(covariant_derivative(Ks, mg.christoffel));
  Tensor<double, 3> sym;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        sym(a, b, c) = (dk(a, b, c) + dk(b, c, a) + dk(c, a, b) + dk(a, c, b) + dk(c, b, a) + dk(b, a, c)) / 6.0;
  out.killing_tensor_residual = std::sqrt(std::max(0.0, norm_sq(sym, minv)));
  out.killing_tensor_scale = std::sqrt(std::max(0.0, norm_sq(dk, minv)));
  return out;
}

}  // namespace weylkit
