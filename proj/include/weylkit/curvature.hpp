#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "weylkit/geometry.hpp"

namespace weylkit {

using Mat3J = std::array<std::array<JetD, 3>, 3>;
using TwoForm = Tensor<JetD, 2>;

// Smooth fields handed to the differential operators: each returns its Taylor
// expansion of the requested order about the given chart point.
using ScalarField = std::function<JetD(const Vec4& p, int order)>;
using VectorField = std::function<std::array<JetD, 4>(const Vec4& p, int order)>;
using TwoFormField = std::function<TwoForm(const Vec4& p, int order)>;

// ---------------------------------------------------------------------------
// Jet-valued local geometry about a point.  Every field is a Taylor expansion;
// the truncation order drops by one per derivative taken.

enum class Depth { Connection, Curvature, Weyl };

struct LocalGeometry {
  int order = 0;
  Orientation orientation = Orientation::Positive;
  Tensor<JetD, 2> g, ginv;
  JetD sqrt_det;
  Tensor<JetD, 4> epsilon;      // volume form, epsilon_{0123} = o sqrt(det g)
  Tensor<JetD, 2> coframe;      // (a, mu) -> e^a_mu
  Tensor<JetD, 2> vectors;      // (a, mu) -> e_a^mu
  std::array<TwoForm, 3> plus_forms, minus_forms;  // e^0^e^i +- e^j^e^k, lower indices

  Tensor<JetD, 3> christoffel;  // (a, b, c) -> Gamma^a_{bc}

  // Present from Depth::Curvature on (requires order >= 2).
  Tensor<JetD, 4> riemann_up;   // (a, b, c, d) -> R^a_{bcd}
  Tensor<JetD, 4> riemann;      // R_{abcd}
  Tensor<JetD, 2> ricci;
  JetD scalar;

  // Present at Depth::Weyl.
  Tensor<JetD, 4> weyl;
  Mat3J w_plus, w_minus;

  int curvature_order() const { return order - 2; }
  const std::array<TwoForm, 3>& forms(bool plus) const { return plus ? plus_forms : minus_forms; }
};

LocalGeometry local_geometry(const MetricExpansion<double>& g, Orientation o, Depth depth = Depth::Weyl);

// ---------------------------------------------------------------------------
// Tensor calculus on jet-valued coordinate tensors (all indices down).

template <std::size_t R>
Tensor<double, R> tensor_values(const Tensor<JetD, R>& t) {
  return t.map([](const JetD& j) { return j.value(); });
}

template <std::size_t R>
Tensor<JetD, R> truncate(const Tensor<JetD, R>& t, int order) {
  return t.map([order](const JetD& j) { return j.truncated(order); });
}

// nabla_e A_{a_1..a_R}, derivative index first.
template <std::size_t R>
Tensor<JetD, R + 1> covariant_derivative(const Tensor<JetD, R>& a, const Tensor<JetD, 3>& gamma) {
  std::array<Tensor<JetD, R>, 4> da;
  for (int e = 0; e < 4; ++e) da[e] = a.map([e](const JetD& j) { return j.derivative(e); });
  Tensor<JetD, R + 1> out;
  for (std::size_t f = 0; f < Tensor<JetD, R + 1>::kSize; ++f) {
    const auto idx = Tensor<JetD, R + 1>::unflat(f);
    typename Tensor<JetD, R>::Index rest{};
    for (std::size_t k = 0; k < R; ++k) rest[k] = idx[k + 1];
    const int e = idx[0];
    JetD v = da[e][rest];
    for (std::size_t k = 0; k < R; ++k) {
      auto r2 = rest;
      for (int m = 0; m < 4; ++m) {
        r2[k] = m;
        v -= gamma(m, e, rest[k]) * a[r2];
      }
    }
    out.at_flat(f) = v;
  }
  return out;
}

// Contraction g^{ef} T_{e f ...} of the first two slots.
template <std::size_t R>
Tensor<JetD, R - 2> trace_first_pair(const Tensor<JetD, R>& t, const Tensor<JetD, 2>& ginv) {
  Tensor<JetD, R - 2> out(JetD(0.0));
  for (std::size_t f = 0; f < Tensor<JetD, R - 2>::kSize; ++f) {
    const auto rest = Tensor<JetD, R - 2>::unflat(f);
    JetD s(0.0);
    typename Tensor<JetD, R>::Index idx{};
    for (std::size_t k = 0; k < R - 2; ++k) idx[k + 2] = rest[k];
    for (int e = 0; e < 4; ++e)
      for (int q = 0; q < 4; ++q) {
        idx[0] = e;
        idx[1] = q;
        s += ginv(e, q) * t[idx];
      }
    out.at_flat(f) = s;
  }
  return out;
}

// Rough Laplacian nabla^* nabla A = -g^{ef} nabla_e nabla_f A.
template <std::size_t R>
Tensor<JetD, R> rough_laplacian(const Tensor<JetD, R>& a, const LocalGeometry& geo) {
  const auto dda = covariant_derivative(covariant_derivative(a, geo.christoffel), geo.christoffel);
  return JetD(-1.0) * trace_first_pair(dda, geo.ginv);
}

// Divergence g^{ea} nabla_e A_{a ...}.
template <std::size_t R>
Tensor<JetD, R - 1> divergence(const Tensor<JetD, R>& a, const LocalGeometry& geo) {
  return trace_first_pair(covariant_derivative(a, geo.christoffel), geo.ginv);
}

// Full contraction |T|^2 = T_{a..} T^{a..} of a covariant tensor.
template <std::size_t R>
double norm_sq(const Tensor<double, R>& t, const Mat4& ginv) {
  Tensor<double, R> up = t;
  for (std::size_t k = 0; k < R; ++k) {
    Tensor<double, R> next(0.0);
    for (std::size_t f = 0; f < Tensor<double, R>::kSize; ++f) {
      auto idx = Tensor<double, R>::unflat(f);
      const int m = idx[k];
      double s = 0.0;
      for (int n = 0; n < 4; ++n) {
        idx[k] = n;
        s += ginv(m, n) * up[idx];
      }
      next.at_flat(f) = s;
    }
    up = next;
  }
  double s = 0.0;
  for (std::size_t f = 0; f < Tensor<double, R>::kSize; ++f) s += t.at_flat(f) * up.at_flat(f);
  return s;
}

template <std::size_t R>
double form_norm_sq(const Tensor<double, R>& t, const Mat4& ginv) {
  double fact = 1.0;
  for (std::size_t k = 2; k <= R; ++k) fact *= static_cast<double>(k);
  return norm_sq(t, ginv) / fact;
}

// Matrix of a 4-tensor with the curvature symmetries acting on Lambda^+ (or
// Lambda^-) through phi -> (1/2) T^{ab}_{cd} phi_{ab}, in the basis `forms`
// (|omega_i|^2 = 2).
Mat3J self_dual_matrix(const Tensor<JetD, 4>& t, const std::array<TwoForm, 3>& forms, const Tensor<JetD, 2>& ginv);
Mat3 self_dual_matrix(const Tensor<double, 4>& t, const std::array<Mat4, 3>& forms, const Mat4& ginv);
// The 4-tensor (1/2) sum_ij M_ij omega_j (x) omega_i inverting self_dual_matrix on Lambda^+ (x) Lambda^+.
Tensor<JetD, 4> tensor_from_matrix(const Mat3J& m, const std::array<TwoForm, 3>& forms);

Mat3 values(const Mat3J& m);
Mat3J truncate(const Mat3J& m, int order);

// Endomorphism phi -> (1/2) T^{ab}_{cd} phi_{ab} on a 2-form, all lower indices.
Tensor<JetD, 2> apply_to_form(const Tensor<JetD, 4>& t, const TwoForm& phi, const Tensor<JetD, 2>& ginv);

// ---------------------------------------------------------------------------
// Pointwise curvature summary.

struct SelfDualBasis {
  std::array<Mat4, 3> plus;   // coordinate components of omega^+_i
  std::array<Mat4, 3> minus;  // coordinate components of omega^-_i
};

SelfDualBasis self_dual_basis(const Frame& frame);

struct CurvatureBundle {
  ChartPoint point;
  Orientation orientation = Orientation::Positive;
  Frame frame;
  Mat4 g, ginv;
  Tensor<double, 3> christoffel;
  Tensor<double, 4> dchristoffel;  // (d, a, b, c) -> d_d Gamma^a_{bc}
  Tensor<double, 4> riemann;
  Tensor<double, 2> ricci;
  double scalar = 0.0;
  Tensor<double, 4> weyl;
  Mat3 w_plus, w_minus;

  double riemann_norm() const { return std::sqrt(norm_sq(riemann, ginv)); }
  double ricci_norm() const { return std::sqrt(norm_sq(ricci, ginv)); }
};

CurvatureBundle curvature_at(const MetricJet& jet, Orientation o);
CurvatureBundle curvature_at(const MetricSpec& spec, const ChartPoint& p);

struct DivergenceResult {
  Tensor<double, 3> components;  // -nabla^a W^+_{abcd}, coordinate components
  double norm = 0.0;
  double scale = 0.0;            // |nabla W^+|, for relative judgement
};

DivergenceResult divergence_w_plus(const MetricSpec& spec, const ChartPoint& p, Orientation o);

// nabla^* nabla (f W^+) on Lambda^+ of the given metric, as a 3x3 matrix in the
// frame basis of plus_forms.
Mat3 rough_laplacian_fw(const MetricSpec& spec, const ChartPoint& p, const ScalarField& f, Orientation o);

// Convenience: metric expansion about p with a domain check.
MetricExpansion<double> expand_checked(const MetricSpec& spec, const ChartPoint& p, int order);

}  // namespace weylkit
