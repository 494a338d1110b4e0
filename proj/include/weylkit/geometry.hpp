#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "weylkit/jet.hpp"
#include "weylkit/tensor.hpp"

namespace weylkit {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

template <typename S>
using MetricExpansion = Tensor<Jet<S>, 2>;

// ---------------------------------------------------------------------------
// Errors

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Wu's criterion det W+ > 0 fails (or is numerically indistinguishable from failing).
class WuFailure : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure did not reach its own convergence target.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------

enum class Orientation : int { Positive = 1, Negative = -1 };

inline int sign_of(Orientation o) { return static_cast<int>(o); }
inline Orientation flipped(Orientation o) {
  return o == Orientation::Positive ? Orientation::Negative : Orientation::Positive;
}

struct ChartPoint {
  Vec4 coords = Vec4::Zero();
  std::string chart;
};

// One coordinate of a chart box.  Non-periodic coordinates are open intervals
// (lo, hi); the margins carve out the excluded neighbourhoods of coordinate
// singularities (axes, horizons, bolts).  Periodic coordinates record their
// fundamental interval and are unrestricted.
struct CoordinateRange {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  double lo_margin = 0.0;
  double hi_margin = 0.0;
  bool periodic = false;

  double period() const { return hi - lo; }
  static CoordinateRange periodic_range(double lo, double hi) { return {lo, hi, 0.0, 0.0, true}; }
};

struct ChartDomain {
  std::array<CoordinateRange, 4> ranges;

  // Inside the box with the singular neighbourhoods removed.
  bool contains(const Vec4& x) const;
  // Inside the raw coordinate chart (margins ignored).
  bool within_chart(const Vec4& x) const;
};

// A metric given by closed-form (or derived) component functions on one chart.
// The component function is exposed through its Taylor expansion about a point,
// which is what every curvature computation consumes.
class MetricSpec {
 public:
  using ExpandFn = std::function<MetricExpansion<double>(const Vec4& p, int order)>;

  MetricSpec(std::string name, std::string chart, ChartDomain domain, ExpandFn expand,
             Orientation orientation = Orientation::Positive);

  // Builds a spec from a generic callable F(const std::array<JetD,4>& x) returning
  // the lower-triangle-complete 4x4 component tensor.
  template <typename F>
  static MetricSpec from_components(std::string name, std::string chart, ChartDomain domain, F fn,
                                    Orientation orientation = Orientation::Positive) {
    ExpandFn expand = [fn](const Vec4& p, int order) {
      std::array<JetD, 4> x{JetD::variable(p[0], 0, order), JetD::variable(p[1], 1, order),
                            JetD::variable(p[2], 2, order), JetD::variable(p[3], 3, order)};
      MetricExpansion<double> g = fn(x);
      // Constant components still need the requested truncation order.
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          if (g(i, j).is_constant()) g(i, j) = JetD::constant(g(i, j).value(), order);
      return g;
    };
    return MetricSpec(std::move(name), std::move(chart), std::move(domain), std::move(expand), orientation);
  }

  const std::string& name() const { return name_; }
  const std::string& chart() const { return chart_; }
  const ChartDomain& domain() const { return domain_; }
  Orientation orientation() const { return orientation_; }

  MetricSpec with_orientation(Orientation o) const;
  MetricSpec reversed() const { return with_orientation(flipped(orientation_)); }

  // Coordinates on which the components do not depend (isometry generators).
  const std::vector<int>& cyclic_coordinates() const { return cyclic_; }
  MetricSpec& set_cyclic_coordinates(std::vector<int> c) {
    cyclic_ = std::move(c);
    return *this;
  }

  // Optional switch to a chart that stays well conditioned near the axis of a
  // polar chart.  The callback fills `out`, the new coordinates `q` and the
  // Jacobian dq/dx, and returns true when p is close enough to the axis for
  // the switch to pay off.
  using RechartFn = std::function<bool(const Vec4& p, MetricSpec& out, Vec4& q, Mat4& jacobian)>;
  MetricSpec& set_regular_chart(RechartFn fn) {
    rechart_ = std::move(fn);
    return *this;
  }
  bool has_regular_chart() const { return static_cast<bool>(rechart_); }

  bool contains(const ChartPoint& p) const;

  // Taylor expansion of g_{mu nu} about p.  Requires p inside the raw chart.
  MetricExpansion<double> expand(const Vec4& p, int order) const;
  Mat4 components(const Vec4& p) const;

 private:
  std::string name_;
  std::string chart_;
  ChartDomain domain_;
  ExpandFn expand_;
  Orientation orientation_;
  std::vector<int> cyclic_;
  RechartFn rechart_;

  friend struct ConditionedPoint conditioned_chart(const MetricSpec&, const ChartPoint&);
};

struct ConditionedPoint {
  MetricSpec spec;
  ChartPoint point;
  Mat4 jacobian = Mat4::Identity();  // d(new coordinates)/d(old coordinates)
};

// The chart in which chart-independent quantities at p are best evaluated:
// the regular chart when one is registered and p is near its axis, otherwise
// (spec, p) unchanged.  Orientation is preserved.  Points outside the raw
// chart are returned unchanged.
ConditionedPoint conditioned_chart(const MetricSpec& spec, const ChartPoint& p);

// ---------------------------------------------------------------------------
// Metric jets as plain derivative arrays.

struct MetricJet {
  int order = 0;
  ChartPoint point;
  Mat4 g = Mat4::Identity();
  // derivs[k-1] holds d^k g: entry (i, j, a_1..a_k) at ((i*4 + j)*4 + a_1)*4 + ... + a_k.
  std::vector<std::vector<double>> derivs;

  bool has(int k) const { return k <= order; }
  double d(int i, int j, std::initializer_list<int> along) const;
  double d(int i, int j, const std::vector<int>& along) const;
  const std::vector<double>& array(int k) const;
  int max_derivative_order() const { return order; }
};

inline constexpr int kMaxMetricJetOrder = 4;

MetricJet evaluate_jet(const MetricSpec& spec, const ChartPoint& p, int order);
MetricJet finite_difference_jet(const MetricSpec& spec, const ChartPoint& p, int order, double step);
// Richardson extrapolation (4 FD(h) - FD(2h)) / 3 of the central-difference jet.
MetricJet richardson_jet(const MetricSpec& spec, const ChartPoint& p, int order, double step);
// Rebuilds the Taylor expansion carried by a MetricJet.
MetricExpansion<double> to_expansion(const MetricJet& jet);
double max_abs_difference(const MetricJet& a, const MetricJet& b);

// ---------------------------------------------------------------------------
// Orthonormal frames.

struct Frame {
  Mat4 coframe;  // row a holds the components of the covector e^a
  Mat4 vectors;  // column a holds the components of the vector e_a
  Orientation orientation = Orientation::Positive;

  Mat4 gram(const Mat4& g) const { return coframe * g.inverse() * coframe.transpose(); }
};

using IndexOrder = std::array<int, 4>;
inline constexpr IndexOrder kCanonicalOrder{0, 1, 2, 3};

Frame orthonormal_frame(const Mat4& g, Orientation o, const IndexOrder& order = kCanonicalOrder);

// ---------------------------------------------------------------------------
// Templated linear algebra shared by the double and jet pipelines.

namespace detail {

using std::sqrt;

template <typename T>
struct SpdInverse {
  Tensor<T, 2> inverse;
  T sqrt_det;
};

// Cholesky-based inverse of a symmetric positive-definite 4x4 tensor.
template <typename T>
SpdInverse<T> spd_inverse(const Tensor<T, 2>& g) {
  Tensor<T, 2> l(T(0.0));
  for (int j = 0; j < 4; ++j) {
    T diag = g(j, j);
    for (int k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(value_of(diag) > 0.0)) throw DomainError("metric is not positive definite");
    l(j, j) = sqrt(diag);
    const T inv = T(1.0) / l(j, j);
    for (int i = j + 1; i < 4; ++i) {
      T s = g(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s * inv;
    }
  }
  // m = L^{-1}, lower triangular.
  Tensor<T, 2> m(T(0.0));
  for (int i = 0; i < 4; ++i) {
    m(i, i) = T(1.0) / l(i, i);
    for (int j = 0; j < i; ++j) {
      T s(0.0);
      for (int k = j; k < i; ++k) s -= l(i, k) * m(k, j);
      m(i, j) = s * m(i, i);
    }
  }
  SpdInverse<T> r{Tensor<T, 2>(T(0.0)), l(0, 0) * l(1, 1) * l(2, 2) * l(3, 3)};
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      T s(0.0);
      for (int k = j; k < 4; ++k) s += m(k, i) * m(k, j);
      r.inverse(i, j) = s;
      r.inverse(j, i) = s;
    }
  return r;
}

// Gram-Schmidt on the coordinate coframe dx^{order[0]}, ..., dx^{order[3]}
// with respect to g^{-1}; the last covector is flipped if needed so that
// e^0 ^ e^1 ^ e^2 ^ e^3 has the sign demanded by the orientation.
template <typename T>
Tensor<T, 2> gram_schmidt_coframe(const Tensor<T, 2>& ginv, Orientation o, const IndexOrder& order) {
  Tensor<T, 2> e(T(0.0));
  auto inner = [&](int a, const std::array<T, 4>& v) {
    T s(0.0);
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) s += ginv(mu, nu) * e(a, mu) * v[nu];
    return s;
  };
  for (int a = 0; a < 4; ++a) {
    std::array<T, 4> v{T(0.0), T(0.0), T(0.0), T(0.0)};
    v[order[a]] = T(1.0);
    for (int b = 0; b < a; ++b) {
      const T c = inner(b, v);
      for (int mu = 0; mu < 4; ++mu) v[mu] -= c * e(b, mu);
    }
    T n2(0.0);
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) n2 += ginv(mu, nu) * v[mu] * v[nu];
    const T inv = T(1.0) / sqrt(n2);
    for (int mu = 0; mu < 4; ++mu) e(a, mu) = v[mu] * inv;
  }
  // Orientation of the coframe relative to dx^0 ^ ... ^ dx^3.
  Mat4 ev;
  for (int a = 0; a < 4; ++a)
    for (int mu = 0; mu < 4; ++mu) ev(a, mu) = value_of(e(a, mu));
  const double det = ev.determinant();
  if ((det > 0.0) != (o == Orientation::Positive))
    for (int mu = 0; mu < 4; ++mu) e(3, mu) = -e(3, mu);
  return e;
}

// Frame vectors e_a^mu = g^{mu nu} e^a_nu of an orthonormal coframe.
template <typename T>
Tensor<T, 2> frame_vectors(const Tensor<T, 2>& ginv, const Tensor<T, 2>& coframe) {
  Tensor<T, 2> v(T(0.0));
  for (int a = 0; a < 4; ++a)
    for (int mu = 0; mu < 4; ++mu) {
      T s(0.0);
      for (int nu = 0; nu < 4; ++nu) s += ginv(mu, nu) * coframe(a, nu);
      v(a, mu) = s;
    }
  return v;
}

}  // namespace detail

Mat4 to_matrix(const Tensor<double, 2>& t);
Tensor<double, 2> from_matrix(const Mat4& m);
Mat4 values(const MetricExpansion<double>& g);

}  // namespace weylkit
