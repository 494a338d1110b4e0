#pragma once

// Reference metrics used only by the test suite.

#include <cmath>

#include "weylkit/geometry.hpp"

namespace weylkit::testing {

// S^2 (unit radius) x R^2 in coordinates (theta, phi, x, y).  Kahler with
// scalar curvature 2, so W^+ has spectrum (1/3, -1/6, -1/6).
inline MetricSpec sphere_times_plane() {
  ChartDomain d;
  d.ranges[0] = {0.0, M_PI, 1e-2, 1e-2, false};
  d.ranges[1] = CoordinateRange::periodic_range(0.0, 2 * M_PI);
  return MetricSpec::from_components("s2xr2", "product", d, [](const std::array<JetD, 4>& x) {
    MetricExpansion<double> g(JetD(0.0));
    const JetD s = sin(x[0]);
    g(0, 0) = JetD(1.0);
    g(1, 1) = s * s;
    g(2, 2) = JetD(1.0);
    g(3, 3) = JetD(1.0);
    return g;
  });
}

// Flat metric plus a smooth, non-Einstein bump scaled by eps.
inline MetricSpec perturbed_flat(double eps) {
  ChartDomain d;
  return MetricSpec::from_components("bumped", "cartesian", d, [eps](const std::array<JetD, 4>& x) {
    MetricExpansion<double> g(JetD(0.0));
    for (int i = 0; i < 4; ++i) g(i, i) = JetD(1.0);
    const JetD q = exp(-(x[0] * x[0] + 0.5 * x[1] * x[1] + x[2] * x[2] * 0.3 + x[3] * x[3] * 0.7));
    g(0, 0) += eps * q * (1.0 + x[1]);
    g(1, 2) += eps * q * x[3];
    g(2, 1) = g(1, 2);
    g(3, 3) += eps * sin(x[0] + x[2]) * q;
    return g;
  });
}

}  // namespace weylkit::testing

namespace weylkit::testing {

// `base` plus eps times a smooth bump in the (1,1), (2,2) and (0,3) components,
// centred at chart radius r0.  Not Einstein, generically not Kahler.
inline MetricSpec bumped(const MetricSpec& base, double eps, double r0) {
  MetricSpec::ExpandFn fn = [base, eps, r0](const Vec4& p, int k) {
    auto g = base.expand(p, k);
    const JetD r = JetD::variable(p[1], 1, k), th = JetD::variable(p[2], 2, k), ph = JetD::variable(p[3], 3, k);
    const JetD b = exp(-(r - r0) * (r - r0) * 0.25);
    g(1, 1) += eps * b * (1.0 + 0.5 * cos(th));
    g(2, 2) += eps * b * r * r * (0.3 + sin(ph) * 0.2);
    const JetD c = eps * b * sin(th) * sin(th) * 0.4 * (1.0 + 0.3 * sin(2.0 * ph));
    g(0, 3) += c;
    g(3, 0) += c;
    return g;
  };
  return MetricSpec(base.name() + "_bumped", base.chart(), base.domain(), fn, base.orientation());
}

}  // namespace weylkit::testing

namespace weylkit::testing {

// `base` with its (2,2) and (3,3) components scaled by 1 + eps times a radial
// bump centred at r0.  Smooth across the axis and keeps the cyclic
// coordinates; for a static base the Kahler form of the rescaled metric is
// no longer closed.
inline MetricSpec radially_bumped(const MetricSpec& base, double eps, double r0) {
  MetricSpec::ExpandFn fn = [base, eps, r0](const Vec4& p, int k) {
    auto g = base.expand(p, k);
    const JetD r = JetD::variable(p[1], 1, k);
    const JetD scale = 1.0 + eps * exp(-(r - r0) * (r - r0) * 0.25);
    g(2, 2) = g(2, 2) * scale;
    g(3, 3) = g(3, 3) * scale;
    return g;
  };
  MetricSpec out(base.name() + "_radially_bumped", base.chart(), base.domain(), fn, base.orientation());
  out.set_cyclic_coordinates(base.cyclic_coordinates());
  return out;
}

}  // namespace weylkit::testing
