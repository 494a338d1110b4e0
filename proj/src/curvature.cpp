#include "weylkit/curvature.hpp"

#include <stdexcept>

namespace weylkit {

namespace {

int permutation_sign(int a, int b, int c, int d) {
  if (a == b || a == c || a == d || b == c || b == d || c == d) return 0;
  int p[4] = {a, b, c, d};
  int s = 1;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

TwoForm wedge_frame(const Tensor<JetD, 2>& e, int a, int b) {
  TwoForm w;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) w(mu, nu) = e(a, mu) * e(b, nu) - e(a, nu) * e(b, mu);
  return w;
}

TwoForm raise_form(const TwoForm& w, const Tensor<JetD, 2>& ginv) {
  // (g^{-1} w g^{-1})^{mu nu}
  TwoForm half(JetD(0.0)), up(JetD(0.0));
  for (int mu = 0; mu < 4; ++mu)
    for (int b = 0; b < 4; ++b) {
      JetD s(0.0);
      for (int a = 0; a < 4; ++a) s += ginv(mu, a) * w(a, b);
      half(mu, b) = s;
    }
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu + 1; nu < 4; ++nu) {
      JetD s(0.0);
      for (int b = 0; b < 4; ++b) s += half(mu, b) * ginv(b, nu);
      up(mu, nu) = s;
      up(nu, mu) = -s;
    }
  return up;
}

}  // namespace

LocalGeometry local_geometry(const MetricExpansion<double>& gx, Orientation o, Depth depth) {
  LocalGeometry geo;
  geo.orientation = o;
  geo.order = gx(0, 0).order();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) geo.order = std::min(geo.order, gx(i, j).order());
  geo.g = gx;
  auto inv = detail::spd_inverse(gx);
  geo.ginv = std::move(inv.inverse);
  geo.sqrt_det = inv.sqrt_det;

  const double os = sign_of(o);
  geo.epsilon = Tensor<JetD, 4>(JetD(0.0));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          if (int s = permutation_sign(a, b, c, d)) geo.epsilon(a, b, c, d) = (os * s) * geo.sqrt_det;

  geo.coframe = detail::gram_schmidt_coframe(geo.ginv, o, kCanonicalOrder);
  geo.vectors = detail::frame_vectors(geo.ginv, geo.coframe);
  static constexpr int kPairs[3][4] = {{0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}};
  for (int i = 0; i < 3; ++i) {
    const TwoForm p = wedge_frame(geo.coframe, kPairs[i][0], kPairs[i][1]);
    const TwoForm q = wedge_frame(geo.coframe, kPairs[i][2], kPairs[i][3]);
    geo.plus_forms[i] = p + q;
    geo.minus_forms[i] = p - q;
  }

  if (geo.order < 1) return geo;

  // Christoffel symbols from the first derivatives.
  std::array<Tensor<JetD, 2>, 4> dg;
  for (int e = 0; e < 4; ++e) dg[e] = gx.map([e](const JetD& j) { return j.derivative(e); });
  Tensor<JetD, 3> lower;  // Gamma_{d b c}
  for (int d = 0; d < 4; ++d)
    for (int b = 0; b < 4; ++b)
      for (int c = b; c < 4; ++c) {
        JetD v = 0.5 * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
        lower(d, b, c) = v;
        lower(d, c, b) = v;
      }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = b; c < 4; ++c) {
        JetD s(0.0);
        for (int d = 0; d < 4; ++d) s += geo.ginv(a, d) * lower(d, b, c);
        geo.christoffel(a, b, c) = s;
        geo.christoffel(a, c, b) = s;
      }

  if (depth == Depth::Connection || geo.order < 2) return geo;

  // R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
  std::array<Tensor<JetD, 3>, 4> dgamma;
  for (int e = 0; e < 4; ++e) dgamma[e] = geo.christoffel.map([e](const JetD& j) { return j.derivative(e); });
  const auto& gam = geo.christoffel;
  geo.riemann_up = Tensor<JetD, 4>(JetD(0.0));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = c + 1; d < 4; ++d) {
          JetD v = dgamma[c](a, d, b) - dgamma[d](a, c, b);
          for (int e = 0; e < 4; ++e) v += gam(a, c, e) * gam(e, d, b) - gam(a, d, e) * gam(e, c, b);
          geo.riemann_up(a, b, c, d) = v;
          geo.riemann_up(a, b, d, c) = -v;
        }
  geo.riemann = Tensor<JetD, 4>(JetD(0.0));
  const int ro = geo.order - 2;
  const auto g_lo = truncate(gx, ro);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = c + 1; d < 4; ++d) {
          JetD s(0.0);
          for (int e = 0; e < 4; ++e) s += g_lo(a, e) * geo.riemann_up(e, b, c, d);
          geo.riemann(a, b, c, d) = s;
          geo.riemann(a, b, d, c) = -s;
        }
  const auto ginv_lo = truncate(geo.ginv, ro);
  geo.ricci = Tensor<JetD, 2>(JetD(0.0));
  for (int b = 0; b < 4; ++b)
    for (int d = b; d < 4; ++d) {
      JetD s(0.0);
      for (int a = 0; a < 4; ++a) s += geo.riemann_up(a, b, a, d);
      geo.ricci(b, d) = s;
      geo.ricci(d, b) = s;
    }
  geo.scalar = JetD(0.0);
  for (int b = 0; b < 4; ++b)
    for (int d = 0; d < 4; ++d) geo.scalar += ginv_lo(b, d) * geo.ricci(b, d);

  if (depth == Depth::Curvature) return geo;

  const JetD s6 = geo.scalar * (1.0 / 6.0);
  const auto& r = geo.ricci;
  geo.weyl = Tensor<JetD, 4>(JetD(0.0));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = c + 1; d < 4; ++d) {
          const JetD gg = g_lo(a, c) * g_lo(b, d) - g_lo(a, d) * g_lo(b, c);
          JetD v = geo.riemann(a, b, c, d) -
                   0.5 * (g_lo(a, c) * r(b, d) - g_lo(a, d) * r(b, c) - g_lo(b, c) * r(a, d) + g_lo(b, d) * r(a, c)) +
                   s6 * gg;
          geo.weyl(a, b, c, d) = v;
          geo.weyl(a, b, d, c) = -v;
        }
  std::array<TwoForm, 3> pf, mf;
  for (int i = 0; i < 3; ++i) {
    pf[i] = truncate(geo.plus_forms[i], ro);
    mf[i] = truncate(geo.minus_forms[i], ro);
  }
  geo.w_plus = self_dual_matrix(geo.weyl, pf, ginv_lo);
  geo.w_minus = self_dual_matrix(geo.weyl, mf, ginv_lo);
  return geo;
}

Mat3J self_dual_matrix(const Tensor<JetD, 4>& t, const std::array<TwoForm, 3>& forms, const Tensor<JetD, 2>& ginv) {
  std::array<TwoForm, 3> up;
  for (int i = 0; i < 3; ++i) up[i] = raise_form(forms[i], ginv);
  // A_{j, rs} = T_{mn rs} omega_j^{mn}, using antisymmetry in (m, n).
  std::array<TwoForm, 3> a;
  for (int j = 0; j < 3; ++j) {
    a[j] = TwoForm(JetD(0.0));
    for (int rr = 0; rr < 4; ++rr)
      for (int ss = rr + 1; ss < 4; ++ss) {
        JetD s(0.0);
        for (int m = 0; m < 4; ++m)
          for (int n = m + 1; n < 4; ++n) s += t(m, n, rr, ss) * up[j](m, n);
        a[j](rr, ss) = 2.0 * s;
      }
  }
  Mat3J out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      JetD s(0.0);
      for (int rr = 0; rr < 4; ++rr)
        for (int ss = rr + 1; ss < 4; ++ss) s += a[j](rr, ss) * up[i](rr, ss);
      out[i][j] = 0.25 * s;  // (1/8) * 2 from the antisymmetric sum
    }
  return out;
}

Mat3 self_dual_matrix(const Tensor<double, 4>& t, const std::array<Mat4, 3>& forms, const Mat4& ginv) {
  Mat3 out;
  std::array<Mat4, 3> up;
  for (int i = 0; i < 3; ++i) up[i] = ginv * forms[i] * ginv;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
          for (int rr = 0; rr < 4; ++rr)
            for (int ss = 0; ss < 4; ++ss) s += t(m, n, rr, ss) * up[j](m, n) * up[i](rr, ss);
      out(i, j) = s / 8.0;
    }
  return out;
}

Tensor<JetD, 4> tensor_from_matrix(const Mat3J& m, const std::array<TwoForm, 3>& forms) {
  Tensor<JetD, 4> t(JetD(0.0));
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = c + 1; d < 4; ++d) {
          JetD s(0.0);
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) s += m[i][j] * forms[j](a, b) * forms[i](c, d);
          s = 0.5 * s;
          t(a, b, c, d) = s;
          t(b, a, c, d) = -s;
          t(a, b, d, c) = -s;
          t(b, a, d, c) = s;
        }
  return t;
}

Mat3 values(const Mat3J& m) {
  Mat3 v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v(i, j) = m[i][j].value();
  return v;
}

Mat3J truncate(const Mat3J& m, int order) {
  Mat3J r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = m[i][j].truncated(order);
  return r;
}

Tensor<JetD, 2> apply_to_form(const Tensor<JetD, 4>& t, const TwoForm& phi, const Tensor<JetD, 2>& ginv) {
  const TwoForm up = raise_form(phi, ginv);
  TwoForm out(JetD(0.0));
  for (int c = 0; c < 4; ++c)
    for (int d = c + 1; d < 4; ++d) {
      JetD s(0.0);
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) s += t(a, b, c, d) * up(a, b);
      out(c, d) = s;
      out(d, c) = -s;
    }
  return out;
}

SelfDualBasis self_dual_basis(const Frame& frame) {
  static constexpr int kPairs[3][4] = {{0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}};
  auto wedge = [&](int a, int b) {
    const Eigen::RowVector4d ea = frame.coframe.row(a), eb = frame.coframe.row(b);
    return Mat4(ea.transpose() * eb - eb.transpose() * ea);
  };
  SelfDualBasis basis;
  for (int i = 0; i < 3; ++i) {
    const Mat4 p = wedge(kPairs[i][0], kPairs[i][1]), q = wedge(kPairs[i][2], kPairs[i][3]);
    basis.plus[i] = p + q;
    basis.minus[i] = p - q;
  }
  return basis;
}

CurvatureBundle curvature_at(const MetricJet& jet, Orientation o) {
  if (jet.order < 2) throw std::invalid_argument("curvature_at: metric jet of order >= 2 required");
  const LocalGeometry geo = local_geometry(to_expansion(jet), o, Depth::Weyl);
  CurvatureBundle b;
  b.point = jet.point;
  b.orientation = o;
  b.g = values(geo.g);
  b.ginv = values(geo.ginv);
  for (int a = 0; a < 4; ++a)
    for (int mu = 0; mu < 4; ++mu) {
      b.frame.coframe(a, mu) = geo.coframe(a, mu).value();
      b.frame.vectors(mu, a) = geo.vectors(a, mu).value();
    }
  b.frame.orientation = o;
  b.christoffel = tensor_values(geo.christoffel);
  for (int d = 0; d < 4; ++d)
    for (int a = 0; a < 4; ++a)
      for (int bb = 0; bb < 4; ++bb)
        for (int c = 0; c < 4; ++c) b.dchristoffel(d, a, bb, c) = geo.christoffel(a, bb, c).partial(MultiIndex{
            d == 0 ? 1 : 0, d == 1 ? 1 : 0, d == 2 ? 1 : 0, d == 3 ? 1 : 0});
  b.riemann = tensor_values(geo.riemann);
  b.ricci = tensor_values(geo.ricci);
  b.scalar = geo.scalar.value();
  b.weyl = tensor_values(geo.weyl);
  b.w_plus = values(geo.w_plus);
  b.w_minus = values(geo.w_minus);
  return b;
}

CurvatureBundle curvature_at(const MetricSpec& spec, const ChartPoint& p) {
  return curvature_at(evaluate_jet(spec, p, 2), spec.orientation());
}

MetricExpansion<double> expand_checked(const MetricSpec& spec, const ChartPoint& p, int order) {
  if (!p.chart.empty() && p.chart != spec.chart())
    throw DomainError(spec.name() + ": point given in chart " + p.chart + ", metric lives on " + spec.chart());
  if (!spec.domain().contains(p.coords)) throw DomainError(spec.name() + ": point outside domain");
  return spec.expand(p.coords, order);
}

DivergenceResult divergence_w_plus(const MetricSpec& spec, const ChartPoint& p, Orientation o) {
  const LocalGeometry geo = local_geometry(expand_checked(spec, p, 3), o, Depth::Weyl);
  std::array<TwoForm, 3> forms;
  for (int i = 0; i < 3; ++i) forms[i] = truncate(geo.plus_forms[i], 1);
  const auto wp = tensor_from_matrix(geo.w_plus, forms);
  const auto dw = covariant_derivative(wp, geo.christoffel);
  const auto div = JetD(-1.0) * trace_first_pair(dw, geo.ginv);
  const Mat4 ginv = values(geo.ginv);
  DivergenceResult r;
  r.components = tensor_values(div);
  r.norm = std::sqrt(norm_sq(r.components, ginv));
  r.scale = std::sqrt(norm_sq(tensor_values(dw), ginv));
  return r;
}

Mat3 rough_laplacian_fw(const MetricSpec& spec, const ChartPoint& p, const ScalarField& f, Orientation o) {
  const LocalGeometry geo = local_geometry(expand_checked(spec, p, 4), o, Depth::Weyl);
  const JetD fj = f(p.coords, 2);
  if (!(fj.value() > 0.0)) throw DomainError("rough_laplacian_fw: weight must be positive");
  std::array<TwoForm, 3> forms;
  for (int i = 0; i < 3; ++i) forms[i] = truncate(geo.plus_forms[i], 2);
  Mat3J fw = geo.w_plus;
  for (auto& row : fw)
    for (auto& v : row) v = fj * v;
  const auto lap = rough_laplacian(tensor_from_matrix(fw, forms), geo);
  std::array<Mat4, 3> basis;
  for (int i = 0; i < 3; ++i) basis[i] = values(geo.plus_forms[i]);
  return self_dual_matrix(tensor_values(lap), basis, values(geo.ginv));
}

}  // namespace weylkit
