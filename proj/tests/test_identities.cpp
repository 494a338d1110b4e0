#include <doctest.h>

#include "test_support.hpp"
#include "weylkit/exterior.hpp"
#include "weylkit/identities.hpp"
#include "weylkit/zoo.hpp"

using namespace weylkit;

namespace {

FamilyInfo family(const char* name) { return describe(make_family(name)); }

TwoFormField self_dual_field(std::function<JetD(const std::array<JetD, 4>&)> coeff) {
  return [coeff](const Vec4& p, int k) {
    std::array<JetD, 4> x{JetD::variable(p[0], 0, k), JetD::variable(p[1], 1, k), JetD::variable(p[2], 2, k),
                          JetD::variable(p[3], 3, k)};
    JetD c = coeff(x);
    if (c.is_constant()) c = JetD::constant(c.value(), k);
    TwoForm w(JetD::zero(k));
    w(0, 1) = c;
    w(1, 0) = -c;
    w(2, 3) = c;
    w(3, 2) = -c;
    return w;
  };
}

bool all_pass(const std::vector<ResidualReport>& rs) {
  for (const auto& r : rs)
    if (!r.pass) return false;
  return true;
}

}  // namespace

TEST_CASE("report conventions") {
  const ChartPoint p;
  CHECK(identity_report("x", p, 1e-7, 1.0, 1e-6).pass);
  CHECK_FALSE(identity_report("x", p, 1e-5, 1.0, 1e-6).pass);
  CHECK(identity_report("x", p, 0.0, 0.0, 1e-6).pass);
  CHECK(inequality_report("x", p, 1.0, 1.0 + 1e-12).pass);
  CHECK_FALSE(inequality_report("x", p, 1.0, 1.0 + 1e-6).pass);
  CHECK(inequality_report("x", p, 2.0, 1.0).margin == 1.0);
}

TEST_CASE("Einstein Weitzenbock identity") {
  const auto flat = family("flat");
  const auto r0 = weitzenbock_einstein_residual(flat.spec, {Vec4(0.1, 0.2, 0.3, 0.4), "cartesian"});
  CHECK(r0.pass);
  CHECK(r0.residual == 0.0);

  const auto sphere = family("round_sphere");
  const auto r1 = weitzenbock_einstein_residual(sphere.spec, {Vec4(0.3, -0.1, 0.2, 0.5), "stereographic"});
  CHECK(r1.pass);
  CHECK(r1.residual < 1e-12);

  const auto schw = family("schwarzschild");
  for (double r : {3.0, 5.0, 8.0}) {
    const auto rep = weitzenbock_einstein_residual(schw.spec, {Vec4(0.0, r, 1.1, 0.3), "boyer_lindquist"});
    CHECK(rep.pass);
    CHECK(rep.residual < 1e-5 * rep.scale);
    CHECK(rep.scale > 0.0);
  }
  for (const auto& p : sample_points(family("kerr"), 5, 2)) CHECK(weitzenbock_einstein_residual(family("kerr").spec, p).pass);

  const auto bumped = testing::bumped(schw.spec, 0.05, 4.0);
  CHECK_THROWS_AS(weitzenbock_einstein_residual(bumped, {Vec4(0.0, 4.2, 1.0, 0.3), ""}), DomainError);
}

TEST_CASE("rescaled Weitzenbock identity and weighted divergence") {
  for (const char* name : {"kerr", "taub_bolt"}) {
    const auto info = family(name);
    for (const auto& p : sample_points(info, 4, 11)) {
      for (Orientation o : {Orientation::Positive, Orientation::Negative}) {
        const auto w = weitzenbock_rescaled_residual(info.spec, p, o);
        CHECK(w.pass);
        CHECK(w.residual < 1e-4 * w.scale);
        const auto d = rescaled_divergence_residual(info.spec, p, o);
        CHECK(d.residual < 1e-6);
        CHECK(d.pass);
      }
    }
  }
  // Without harmonic W+ the weighted divergence does not vanish.
  const auto bumped = testing::bumped(family("schwarzschild").spec, 0.05, 4.0);
  CHECK_FALSE(rescaled_divergence_residual(bumped, {Vec4(0.2, 4.3, 0.7, 0.9), ""}, Orientation::Positive).pass);
  CHECK_THROWS_AS(weitzenbock_rescaled_residual(family("flat").spec, {Vec4::Zero(), ""}, Orientation::Positive),
                  WuFailure);
}

TEST_CASE("Hodge Laplacian on flat space") {
  const auto flat = family("flat");
  const ChartPoint p{Vec4(0.4, -0.3, 0.7, 0.2), "cartesian"};
  const auto constant = self_dual_field([](const auto&) { return JetD(1.0); });
  auto r = hodge_weitzenbock_residual(flat.spec, p, constant);
  CHECK(r.pass);
  CHECK(r.scale == 0.0);

  const auto linear = self_dual_field([](const auto& x) { return x[2]; });
  r = hodge_weitzenbock_residual(flat.spec, p, linear);
  CHECK(r.pass);
  CHECK(r.residual < 1e-10);

  // Quadratic coefficient: both Laplacians equal -d^2/dx2^2 of the coefficient.
  const auto quad = self_dual_field([](const auto& x) { return x[2] * x[2] + x[0] * x[3]; });
  const LocalGeometry geo = local_geometry(flat.spec.expand(p.coords, 2), Orientation::Positive, Depth::Weyl);
  const TwoForm lap = hodge_laplacian(quad(p.coords, 2), geo);
  CHECK(lap(0, 1).value() == doctest::Approx(-2.0));
  CHECK(lap(2, 3).value() == doctest::Approx(-2.0));
  CHECK(std::abs(lap(0, 2).value()) < 1e-14);
  r = hodge_weitzenbock_residual(flat.spec, p, quad);
  CHECK(r.residual < 1e-10);
  CHECK(r.scale == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("Hodge Weitzenbock identity on curved metrics") {
  const auto kerr = family("kerr");
  for (const auto& p : sample_points(kerr, 4, 5)) {
    const auto r = hodge_weitzenbock_rescaled(kerr.spec, p, Orientation::Positive);
    CHECK(r.pass);
    CHECK(r.residual < 1e-5 * r.scale);
  }
  // Holds for any metric and any 2-form, Einstein or not.
  const auto bumped = testing::bumped(family("schwarzschild").spec, 0.1, 4.0);
  const auto phi = self_dual_field([](const auto& x) { return sin(x[1]) * x[2] + cos(x[3]); });
  const auto r = hodge_weitzenbock_residual(bumped, {Vec4(0.1, 4.1, 1.2, 0.5), ""}, phi);
  CHECK(r.residual < 1e-10 * r.scale);
  CHECK(r.scale > 1e-3);
}

TEST_CASE("inequality battery on Kerr and Taub-bolt") {
  for (const char* name : {"kerr", "taub_bolt"}) {
    const auto info = family(name);
    for (const auto& p : sample_points(info, 20, 99)) {
      CHECK(all_pass(inequality_battery(info.spec, p, Orientation::Positive)));
      CHECK(all_pass(inequality_battery(info.spec, p, Orientation::Negative)));
    }
  }
  CHECK_THROWS_AS(inequality_battery(family("flat").spec, {Vec4(0.1, 0.2, 0.3, 0.4), ""}, Orientation::Positive),
                  WuFailure);
}

TEST_CASE("Kahler terms on a non-Kahler Wu-positive metric") {
  const auto bumped = testing::bumped(family("schwarzschild").spec, 0.05, 4.0);
  for (double th : {0.7, 1.3, 2.2}) {
    const ChartPoint p{Vec4(0.2, 4.3, th, 0.9), ""};
    const auto t = kahler_terms(bumped, p, Orientation::Positive);
    CHECK(t.grad_omega_sq > 1e-4);
    // Expansion of <lap(fW+), omega x omega> used for the pointwise bound.
    CHECK(std::abs(t.lap_fw_omega - (2 * t.grad_omega_sq - 2 * t.f * t.w_grad_grad)) < 1e-10);
    // * <omega, lap omega> = 2|d omega|^2 - 2 * d(omega ^ * d omega)
    CHECK(std::abs(t.omega_wedge_lap - (2 * t.d_omega_sq - 2 * t.d_flux)) < 1e-10);
    CHECK(std::abs(t.omega_hodge_lap - t.omega_wedge_lap) < 1e-10);
    // |omega ^ * d omega| = |delta omega| for |omega|^2 = 2.
    CHECK(std::abs(t.flux_form_norm - t.codiff_norm) < 1e-10);
    // Bounds that need only det W+ > 0.
    const auto reports = inequality_battery(t, p);
    CHECK(reports[0].pass);
    CHECK(reports[0].margin > 0.0);
    CHECK(reports[1].pass);
    CHECK(reports[4].pass);
    CHECK(reports[5].pass);
  }
}
