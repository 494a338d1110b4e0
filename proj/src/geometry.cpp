#include "weylkit/geometry.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace weylkit {

bool ChartDomain::contains(const Vec4& x) const {
  for (int i = 0; i < 4; ++i) {
    const auto& r = ranges[i];
    if (!std::isfinite(x[i])) return false;
    if (r.periodic) continue;
    if (!(x[i] > r.lo + r.lo_margin && x[i] < r.hi - r.hi_margin)) return false;
  }
  return true;
}

bool ChartDomain::within_chart(const Vec4& x) const {
  for (int i = 0; i < 4; ++i) {
    const auto& r = ranges[i];
    if (!std::isfinite(x[i])) return false;
    if (r.periodic) continue;
    if (!(x[i] > r.lo && x[i] < r.hi)) return false;
  }
  return true;
}

MetricSpec::MetricSpec(std::string name, std::string chart, ChartDomain domain, ExpandFn expand,
                       Orientation orientation)
    : name_(std::move(name)),
      chart_(std::move(chart)),
      domain_(domain),
      expand_(std::move(expand)),
      orientation_(orientation) {}

MetricSpec MetricSpec::with_orientation(Orientation o) const {
  MetricSpec m = *this;
  m.orientation_ = o;
  return m;
}

bool MetricSpec::contains(const ChartPoint& p) const {
  return (p.chart.empty() || p.chart == chart_) && domain_.contains(p.coords);
}

ConditionedPoint conditioned_chart(const MetricSpec& spec, const ChartPoint& p) {
  if (spec.rechart_ && (p.chart.empty() || p.chart == spec.chart_) && spec.domain_.within_chart(p.coords)) {
    MetricSpec out = spec;
    Vec4 q;
    Mat4 jac;
    if (spec.rechart_(p.coords, out, q, jac)) {
      out.orientation_ = spec.orientation_;
      ChartPoint at{q, out.chart()};
      return {std::move(out), std::move(at), jac};
    }
  }
  return {spec, p, Mat4::Identity()};
}

static std::string describe(const Vec4& x) {
  std::ostringstream os;
  os << "(" << x[0] << ", " << x[1] << ", " << x[2] << ", " << x[3] << ")";
  return os.str();
}

MetricExpansion<double> MetricSpec::expand(const Vec4& p, int order) const {
  if (!domain_.within_chart(p))
    throw DomainError(name_ + ": point " + describe(p) + " outside chart " + chart_);
  return expand_(p, order);
}

Mat4 MetricSpec::components(const Vec4& p) const { return values(expand(p, 0)); }

Mat4 to_matrix(const Tensor<double, 2>& t) {
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = t(i, j);
  return m;
}

Tensor<double, 2> from_matrix(const Mat4& m) {
  Tensor<double, 2> t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) t(i, j) = m(i, j);
  return t;
}

Mat4 values(const MetricExpansion<double>& g) {
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = g(i, j).value();
  return m;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t pow4(int k) { return std::size_t{1} << (2 * k); }

MultiIndex multi_index(const std::vector<int>& along) {
  MultiIndex a{0, 0, 0, 0};
  for (int v : along) ++a[v];
  return a;
}

std::vector<int> unflat_directions(std::size_t f, int k) {
  std::vector<int> along(k);
  for (int m = k - 1; m >= 0; --m) {
    along[m] = static_cast<int>(f % 4);
    f /= 4;
  }
  return along;
}

void check_jet_request(const MetricSpec& spec, const ChartPoint& p, int order) {
  if (order < 0 || order > kMaxMetricJetOrder)
    throw std::invalid_argument("metric jet order must lie in [0, 4]");
  if (!p.chart.empty() && p.chart != spec.chart())
    throw DomainError(spec.name() + ": point given in chart " + p.chart + ", metric lives on " + spec.chart());
  if (!spec.domain().contains(p.coords))
    throw DomainError(spec.name() + ": point " + describe(p.coords) + " outside domain");
}

// Fills a MetricJet from any callable d(i, j, multi-index) -> derivative.
template <typename F>
MetricJet assemble(const ChartPoint& p, int order, const Mat4& g, F&& deriv) {
  MetricJet jet;
  jet.order = order;
  jet.point = p;
  jet.g = g;
  for (int k = 1; k <= order; ++k) {
    std::vector<double> arr(16 * pow4(k));
    std::map<MultiIndex, std::array<double, 16>> cache;
    for (std::size_t f = 0; f < pow4(k); ++f) {
      const MultiIndex alpha = multi_index(unflat_directions(f, k));
      auto it = cache.find(alpha);
      if (it == cache.end()) {
        std::array<double, 16> v{};
        for (int i = 0; i < 4; ++i)
          for (int j = i; j < 4; ++j) v[i * 4 + j] = v[j * 4 + i] = deriv(i, j, alpha);
        it = cache.emplace(alpha, v).first;
      }
      for (int ij = 0; ij < 16; ++ij) arr[ij * pow4(k) + f] = it->second[ij];
    }
    jet.derivs.push_back(std::move(arr));
  }
  return jet;
}

// Second-order central stencils for d^n / dx^n, n = 0..4: (offset, weight) pairs
// in units of the step, weights to be divided by h^n.
const std::vector<std::pair<int, double>>& stencil(int n) {
  static const std::vector<std::pair<int, double>> s[5] = {
      {{0, 1.0}},
      {{-1, -0.5}, {1, 0.5}},
      {{-1, 1.0}, {0, -2.0}, {1, 1.0}},
      {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}},
      {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}},
  };
  return s[n];
}

}  // namespace

double MetricJet::d(int i, int j, const std::vector<int>& along) const {
  const int k = static_cast<int>(along.size());
  if (k == 0) return g(i, j);
  if (k > order) throw std::domain_error("MetricJet: derivative order exceeds jet order");
  std::size_t f = 0;
  for (int v : along) f = 4 * f + static_cast<std::size_t>(v);
  return derivs[k - 1][(i * 4 + j) * pow4(k) + f];
}

double MetricJet::d(int i, int j, std::initializer_list<int> along) const {
  return d(i, j, std::vector<int>(along));
}

const std::vector<double>& MetricJet::array(int k) const {
  if (k < 1 || k > order) throw std::domain_error("MetricJet: no derivative array of that order");
  return derivs[k - 1];
}

MetricJet evaluate_jet(const MetricSpec& spec, const ChartPoint& p, int order) {
  check_jet_request(spec, p, order);
  const MetricExpansion<double> e = spec.expand(p.coords, order);
  const Mat4 g = values(e);
  if (!g.isApprox(g.transpose(), 1e-12)) throw DomainError(spec.name() + ": metric components not symmetric");
  return assemble(p, order, g, [&](int i, int j, const MultiIndex& a) { return e(i, j).partial(a); });
}

MetricJet finite_difference_jet(const MetricSpec& spec, const ChartPoint& p, int order, double step) {
  check_jet_request(spec, p, order);
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  std::map<std::array<int, 4>, Mat4> samples;
  auto sample = [&](const std::array<int, 4>& off) -> const Mat4& {
    auto it = samples.find(off);
    if (it != samples.end()) return it->second;
    Vec4 x = p.coords;
    for (int v = 0; v < 4; ++v) x[v] += off[v] * step;
    if (!spec.domain().within_chart(x))
      throw DomainError(spec.name() + ": finite-difference stencil leaves the chart");
    return samples.emplace(off, spec.components(x)).first->second;
  };
  const Mat4 g = sample({0, 0, 0, 0});
  return assemble(p, order, g, [&](int i, int j, const MultiIndex& a) {
    double acc = 0.0;
    for (const auto& [o0, w0] : stencil(a[0]))
      for (const auto& [o1, w1] : stencil(a[1]))
        for (const auto& [o2, w2] : stencil(a[2]))
          for (const auto& [o3, w3] : stencil(a[3])) acc += w0 * w1 * w2 * w3 * sample({o0, o1, o2, o3})(i, j);
    const int n = a[0] + a[1] + a[2] + a[3];
    return acc / std::pow(step, n);
  });
}

MetricJet richardson_jet(const MetricSpec& spec, const ChartPoint& p, int order, double step) {
  MetricJet fine = finite_difference_jet(spec, p, order, step);
  const MetricJet coarse = finite_difference_jet(spec, p, order, 2.0 * step);
  for (std::size_t k = 0; k < fine.derivs.size(); ++k)
    for (std::size_t f = 0; f < fine.derivs[k].size(); ++f)
      fine.derivs[k][f] = (4.0 * fine.derivs[k][f] - coarse.derivs[k][f]) / 3.0;
  return fine;
}

MetricExpansion<double> to_expansion(const MetricJet& jet) {
  const auto& t = detail::MonomialTables::get();
  const int n = detail::term_count(jet.order);
  MetricExpansion<double> e;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      std::vector<double> c(n);
      for (int m = 0; m < n; ++m) {
        const MultiIndex& a = t.exponents[m];
        std::vector<int> along;
        double fact = 1.0;
        for (int v = 0; v < 4; ++v)
          for (int q = 0; q < a[v]; ++q) {
            along.push_back(v);
            fact *= (q + 1);
          }
        c[m] = jet.d(i, j, along) / fact;
      }
      e(i, j) = JetD::from_coefficients(jet.order, std::move(c));
    }
  return e;
}

double max_abs_difference(const MetricJet& a, const MetricJet& b) {
  double m = (a.g - b.g).cwiseAbs().maxCoeff();
  const std::size_t n = std::min(a.derivs.size(), b.derivs.size());
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t f = 0; f < a.derivs[k].size(); ++f)
      m = std::max(m, std::abs(a.derivs[k][f] - b.derivs[k][f]));
  return m;
}

Frame orthonormal_frame(const Mat4& g, Orientation o, const IndexOrder& order) {
  const auto inv = detail::spd_inverse(from_matrix(g));
  const auto e = detail::gram_schmidt_coframe(inv.inverse, o, order);
  const auto v = detail::frame_vectors(inv.inverse, e);
  Frame f;
  f.orientation = o;
  for (int a = 0; a < 4; ++a)
    for (int mu = 0; mu < 4; ++mu) {
      f.coframe(a, mu) = e(a, mu);
      f.vectors(mu, a) = v(a, mu);
    }
  return f;
}

}  // namespace weylkit
