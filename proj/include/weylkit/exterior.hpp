#pragma once

// Exterior calculus on jet-valued coordinate forms.  A p-form is stored as a
// fully antisymmetric rank-p tensor of lower components; inner products and
// norms carry the 1/p! normalization, so |e^0 ^ e^1|^2 = 1.

#include "weylkit/curvature.hpp"

namespace weylkit {

template <std::size_t R>
Tensor<JetD, R + 1> exterior_derivative(const Tensor<JetD, R>& phi) {
  std::array<Tensor<JetD, R>, 4> dphi;
  for (int e = 0; e < 4; ++e) dphi[e] = phi.map([e](const JetD& j) { return j.derivative(e); });
  Tensor<JetD, R + 1> out;
  for (std::size_t f = 0; f < Tensor<JetD, R + 1>::kSize; ++f) {
    const auto idx = Tensor<JetD, R + 1>::unflat(f);
    JetD s(0.0);
    for (std::size_t i = 0; i <= R; ++i) {
      typename Tensor<JetD, R>::Index rest{};
      for (std::size_t k = 0, m = 0; k <= R; ++k)
        if (k != i) rest[m++] = idx[k];
      if (i % 2 == 0)
        s += dphi[idx[i]][rest];
      else
        s -= dphi[idx[i]][rest];
    }
    out.at_flat(f) = s;
  }
  return out;
}

// All indices raised with g^{-1}.
template <std::size_t R>
Tensor<JetD, R> raise_all(const Tensor<JetD, R>& t, const Tensor<JetD, 2>& ginv) {
  Tensor<JetD, R> up = t;
  for (std::size_t k = 0; k < R; ++k) {
    Tensor<JetD, R> next;
    for (std::size_t f = 0; f < Tensor<JetD, R>::kSize; ++f) {
      auto idx = Tensor<JetD, R>::unflat(f);
      const int m = idx[k];
      JetD s(0.0);
      for (int n = 0; n < 4; ++n) {
        idx[k] = n;
        s += ginv(m, n) * up[idx];
      }
      next.at_flat(f) = s;
    }
    up = std::move(next);
  }
  return up;
}

// (*phi)_{c..} = (1/p!) phi^{a..} epsilon_{a.. c..}
template <std::size_t R>
Tensor<JetD, 4 - R> hodge_star(const Tensor<JetD, R>& phi, const LocalGeometry& geo) {
  const auto up = raise_all(phi, geo.ginv);
  double fact = 1.0;
  for (std::size_t k = 2; k <= R; ++k) fact *= static_cast<double>(k);
  Tensor<JetD, 4 - R> out;
  for (std::size_t f = 0; f < Tensor<JetD, 4 - R>::kSize; ++f) {
    const auto c = Tensor<JetD, 4 - R>::unflat(f);
    JetD s(0.0);
    for (std::size_t a = 0; a < Tensor<JetD, R>::kSize; ++a) {
      const auto ai = Tensor<JetD, R>::unflat(a);
      std::array<int, 4> full{};
      for (std::size_t k = 0; k < R; ++k) full[k] = ai[k];
      for (std::size_t k = 0; k < 4 - R; ++k) full[R + k] = c[k];
      const JetD& e = geo.epsilon[full];
      if (e.value() == 0.0 && e.is_constant()) continue;
      s += up.at_flat(a) * e;
    }
    out.at_flat(f) = s * (1.0 / fact);
  }
  return out;
}

// d^* = - * d * on forms of a 4-manifold.
template <std::size_t R>
Tensor<JetD, R - 1> codifferential(const Tensor<JetD, R>& phi, const LocalGeometry& geo) {
  const auto out = hodge_star(exterior_derivative(hodge_star(phi, geo)), geo);
  return out.map([](const JetD& j) { return -j; });
}

// (d d^* + d^* d) phi for a 2-form.
inline TwoForm hodge_laplacian(const TwoForm& phi, const LocalGeometry& geo) {
  return exterior_derivative(codifferential(phi, geo)) + codifferential(exterior_derivative(phi), geo);
}

// (w ^ t)_{abc} = w_ab t_c + w_bc t_a + w_ca t_b
inline Tensor<JetD, 3> wedge(const TwoForm& w, const Tensor<JetD, 1>& t) {
  Tensor<JetD, 3> out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) out(a, b, c) = w(a, b) * t(c) + w(b, c) * t(a) + w(c, a) * t(b);
  return out;
}

// Component (0123) of w ^ v for two 2-forms.
inline JetD wedge_top(const TwoForm& w, const TwoForm& v) {
  return w(0, 1) * v(2, 3) - w(0, 2) * v(1, 3) + w(0, 3) * v(1, 2) + w(1, 2) * v(0, 3) - w(1, 3) * v(0, 2) +
         w(2, 3) * v(0, 1);
}

// Scalar * F of a 4-form given by its (0123) component.
inline JetD top_form_scalar(const JetD& f0123, const LocalGeometry& geo) {
  return f0123 * (static_cast<double>(sign_of(geo.orientation)) / geo.sqrt_det);
}

}  // namespace weylkit
