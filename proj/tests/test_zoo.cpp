#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "weylkit/zoo.hpp"

using namespace weylkit;

namespace {

constexpr double kPi = 3.14159265358979323846;

FamilyInfo family(const char* name, const std::map<std::string, double>& params = {}) {
  return describe(make_family(name, params));
}

}  // namespace

TEST_CASE("catalog parsing and admissibility") {
  CHECK(family_names().size() == 8);
  CHECK_THROWS_AS(make_family("chen_teo"), ConfigError);
  CHECK_THROWS_AS(make_family("kerr", {{"q", 1.0}}), ConfigError);
  CHECK_THROWS_AS(make_family("kerr", {{"a", 1.0}}), std::domain_error);
  CHECK_THROWS_AS(make_family("kerr", {{"a", -1.5}}), std::domain_error);
  CHECK_THROWS_AS(make_family("schwarzschild", {{"m", 0.0}}), std::domain_error);
  CHECK_THROWS_AS(make_family("taub_bolt", {{"n", -1.0}}), std::domain_error);
  CHECK_THROWS_AS(make_family("kerr", {{"a", std::nan("")}}), ConfigError);
  CHECK(make_family("kerr").param("a") == 0.3);
}

TEST_CASE("flat components are the identity") {
  const auto info = family("flat");
  for (const auto& p : sample_points(info, 10, 3)) CHECK((info.spec.components(p.coords) - Mat4::Identity()).norm() == 0.0);
  const auto rep = ricci_flat_selfcheck(info, 10);
  CHECK(rep.pass);
  CHECK(rep.max_ricci == 0.0);
}

TEST_CASE("Ricci-flat self-check") {
  const auto schw = family("schwarzschild");
  for (const auto& p : sample_points(schw, 100, 7)) CHECK(curvature_at(schw.spec, p).ricci_norm() < 1e-9);

  const auto kerr = ricci_flat_selfcheck(family("kerr"), 50);
  CHECK(kerr.pass);
  CHECK(kerr.max_relative < 1e-8);
  for (const char* name : {"taub_nut", "taub_bolt", "eguchi_hanson"}) CHECK(ricci_flat_selfcheck(family(name), 20).pass);

  // m replaced by m (1 + 1e-3 r)
  const MetricSpec corrupted = MetricSpec::from_components(
      "corrupted", "boyer_lindquist", schw.spec.domain(), [](const std::array<JetD, 4>& x) {
        const JetD& r = x[1];
        const JetD v = 1.0 - 2.0 * (1.0 + 1e-3 * r) / r;
        Tensor<JetD, 2> g(JetD(0.0));
        g(0, 0) = v;
        g(1, 1) = 1.0 / v;
        g(2, 2) = r * r;
        g(3, 3) = r * r * sin(x[2]) * sin(x[2]);
        return g;
      });
  const auto bad = ricci_flat_selfcheck(corrupted, sample_points(schw, 20, 1));
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_relative > 1e-4);
}

TEST_CASE("kerr with a = 0 is schwarzschild") {
  const auto kerr = family("kerr", {{"m", 1.7}, {"a", 0.0}});
  const auto schw = family("schwarzschild", {{"m", 1.7}});
  for (const auto& p : sample_points(schw, 30, 5)) {
    if (!kerr.spec.domain().contains(p.coords)) continue;
    const auto a = kerr.spec.expand(p.coords, 3);
    const auto b = schw.spec.expand(p.coords, 3);
    for (std::size_t i = 0; i < Tensor<JetD, 2>::kSize; ++i) {
      const JetD d = a.at_flat(i) - b.at_flat(i);
      double worst = 0.0;
      for (double c : d.coefficients()) worst = std::max(worst, std::abs(c));
      CHECK(worst < 1e-12);
    }
  }
}

TEST_CASE("Taub-NUT is half conformally flat") {
  const auto info = family("taub_nut");
  CHECK(info.flags.hyperkahler_side == HyperkahlerSide::Minus);
  for (const auto& p : sample_points(info, 30, 9)) {
    const auto c = curvature_at(info.spec, p);
    CHECK(std::min(c.w_plus.norm(), c.w_minus.norm()) < 1e-9);
    CHECK(c.w_minus.norm() < 1e-9);
    CHECK(c.w_plus.norm() > 1e-6);
  }
}

TEST_CASE("flags are reproduced by measurement") {
  for (const auto& name : family_names()) {
    const auto info = describe(make_family(name));
    bool plus = true, minus = true;
    for (const auto& p : sample_points(info, 25, 21)) {
      const auto c = curvature_at(info.spec, p);
      const double scale = std::max(1.0, c.w_plus.norm() + c.w_minus.norm());
      plus = plus && c.w_plus.determinant() > 1e-12 * scale * scale * scale;
      minus = minus && c.w_minus.determinant() > 1e-12 * scale * scale * scale;
      if (info.flags.ricci_flat) CHECK(c.ricci_norm() < 1e-8 * std::max(1.0, c.riemann_norm()));
    }
    INFO(name);
    CHECK(plus == info.flags.wu_plus);
    CHECK(minus == info.flags.wu_minus);
  }
}

TEST_CASE("ALF fibred data is consistent") {
  for (const auto& name : family_names()) {
    const auto info = describe(make_family(name));
    if (!info.flags.alf) continue;
    REQUIRE(info.alf.has_value());
    REQUIRE(info.alf->model.has_value());
    INFO(name);
    for (const auto& p : sample_points(info, 10, 4)) {
      const auto r = alf_structure_residuals(*info.alf, p.coords);
      CHECK(r.eta_of_T < 1e-12);
      CHECK(r.T_into_deta < 1e-12);
      CHECK(r.lie_T_gamma < 1e-12);
    }
  }
}

TEST_CASE("pole charts carry the same geometry") {
  for (const char* name : {"schwarzschild", "kerr", "taub_nut", "taub_bolt", "eguchi_hanson"}) {
    const auto info = family(name);
    for (double th : {0.4, kPi - 0.4, 0.2}) {
      const ChartPoint p{Vec4(0.3, info.inner_radius + 1.3, th, 1.1), info.spec.chart()};
      const auto [spec, q, jac] = conditioned_chart(info.spec, p);
      INFO(name << " theta=" << th);
      CHECK(q.chart != p.chart);
      CHECK(spec.orientation() == info.spec.orientation());
      CHECK(ricci_flat_selfcheck(spec, {q}).pass);
      // Components pull back through the Jacobian.
      const Mat4 g = info.spec.components(p.coords);
      CHECK((jac.transpose() * spec.components(q.coords) * jac - g).norm() < 1e-12 * g.norm());
      for (Orientation o : {Orientation::Positive, Orientation::Negative}) {
        const auto a = curvature_at(info.spec.with_orientation(o), p);
        const auto b = curvature_at(spec.with_orientation(o), q);
        const double w = std::max(a.w_plus.norm(), a.w_minus.norm());
        CHECK(std::abs((a.w_plus * a.w_plus).trace() - (b.w_plus * b.w_plus).trace()) < 1e-9 * w * w);
        CHECK(std::abs(a.w_plus.determinant() - b.w_plus.determinant()) < 1e-9 * w * w * w);
        CHECK(std::abs(a.w_minus.determinant() - b.w_minus.determinant()) < 1e-9 * w * w * w);
      }
    }
  }
  // Away from the axis, outside the chart, or without a registered pole chart nothing changes.
  const auto kerr = family("kerr");
  const ChartPoint equator{Vec4(0.0, 4.0, 1.2, 0.0), kerr.spec.chart()};
  CHECK(conditioned_chart(kerr.spec, equator).point.chart == kerr.spec.chart());
  const ChartPoint beyond{Vec4(0.0, 4.0, -0.1, 0.0), kerr.spec.chart()};
  CHECK(conditioned_chart(kerr.spec, beyond).point.chart == kerr.spec.chart());
  // Inside the axis margin the pole chart still applies (quadrature nodes live there).
  const ChartPoint near_axis{Vec4(0.0, 4.0, 0.001, 0.0), kerr.spec.chart()};
  CHECK(conditioned_chart(kerr.spec, near_axis).point.chart == "boyer_lindquist_north");
  const auto sphere = family("round_sphere");
  CHECK(conditioned_chart(sphere.spec, sphere.reference).point.coords == sphere.reference.coords);
}
