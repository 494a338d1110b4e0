#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "test_support.hpp"
#include "weylkit/curvature.hpp"
#include "weylkit/zoo.hpp"

using namespace weylkit;

namespace {

Vec3 spectrum(const Mat3& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (m + m.transpose()));
  Vec3 v = es.eigenvalues();
  return Vec3(v[2], v[1], v[0]);
}

double max_abs(const Tensor<double, 4>& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("flat metric has no curvature") {
  const auto info = describe(make_family("flat"));
  const auto b = curvature_at(info.spec, {Vec4(0.3, -1.0, 2.0, 0.5), "cartesian"});
  CHECK(max_abs(b.riemann) == 0.0);
  CHECK(b.scalar == 0.0);
  CHECK(b.w_plus.norm() == 0.0);
  CHECK(b.w_minus.norm() == 0.0);
}

TEST_CASE("unit round sphere: s = 12 and Weyl-flat") {
  const auto spec = instantiate(make_family("round_sphere", {{"r", 1.0}}));
  const auto b = curvature_at(spec, {Vec4(0.3, -0.2, 0.5, 0.1), "stereographic"});
  CHECK(b.scalar == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(b.w_plus.norm() < 1e-12);
  CHECK(b.w_minus.norm() < 1e-12);
  // R_{abcd} = g_ac g_bd - g_ad g_bc
  double err = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int bb = 0; bb < 4; ++bb)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          err = std::max(err, std::abs(b.riemann(a, bb, c, d) - (b.g(a, c) * b.g(bb, d) - b.g(a, d) * b.g(bb, c))));
  CHECK(err < 1e-12);
}

TEST_CASE("product S2 x R2 fixes the W+ normalization") {
  const auto spec = testing::sphere_times_plane();
  const auto b = curvature_at(spec, {Vec4(1.1, 0.3, 0.0, 0.0), "product"});
  CHECK(b.scalar == doctest::Approx(2.0));
  // omega_1 = e01 + e23 is the Kahler form: eigenvalue s/6.
  CHECK(b.w_plus(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(b.w_plus(1, 1) == doctest::Approx(-1.0 / 6.0));
  CHECK(b.w_plus(2, 2) == doctest::Approx(-1.0 / 6.0));
  CHECK(std::abs(b.w_plus(0, 1)) < 1e-14);
  const Vec3 sm = spectrum(b.w_minus);
  CHECK(sm[0] == doctest::Approx(1.0 / 3.0));
  CHECK(sm[2] == doctest::Approx(-1.0 / 6.0));
}

TEST_CASE("Schwarzschild: Ricci-flat, (+,-,-) with beta = gamma") {
  const auto spec = instantiate(make_family("schwarzschild", {{"m", 1.0}}));
  const auto b = curvature_at(spec, {Vec4(0.0, 4.0, 1.0, 0.0), "boyer_lindquist"});
  CHECK(b.ricci_norm() < 1e-9);
  const Vec3 s = spectrum(b.w_plus);
  CHECK(s[0] > 0.0);
  CHECK(s[1] < 0.0);
  CHECK(s[1] == doctest::Approx(s[2]).epsilon(1e-10));
  // |Rm|^2 = 48 m^2 / r^6 (Kretschmann)
  CHECK(b.riemann_norm() * b.riemann_norm() == doctest::Approx(48.0 / 4096.0).epsilon(1e-10));
  CHECK(std::abs(b.w_plus.trace()) < 1e-12);
}

TEST_CASE("Riemann symmetries, frame invariance, orientation swap") {
  for (const std::string fam : {"kerr", "taub_bolt", "eguchi_hanson"}) {
    const auto info = describe(make_family(fam));
    for (const auto& p : sample_points(info, 5, 7)) {
      const auto b = curvature_at(info.spec, p);
      const double scale = max_abs(b.riemann);
      double sym = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int bb = 0; bb < 4; ++bb)
          for (int c = 0; c < 4; ++c)
            for (int d = 0; d < 4; ++d) {
              const double r = b.riemann(a, bb, c, d);
              sym = std::max(sym, std::abs(r + b.riemann(bb, a, c, d)));
              sym = std::max(sym, std::abs(r + b.riemann(a, bb, d, c)));
              sym = std::max(sym, std::abs(r - b.riemann(c, d, a, bb)));
              sym = std::max(sym, std::abs(r + b.riemann(a, c, d, bb) + b.riemann(a, d, bb, c)));
            }
      CHECK(sym < 1e-10 * scale);
      // Spectra are independent of the Gram-Schmidt order.
      const Vec3 ref = spectrum(b.w_plus);
      for (IndexOrder ord : {IndexOrder{3, 2, 1, 0}, IndexOrder{1, 3, 0, 2}}) {
        const Frame fr = orthonormal_frame(b.g, b.orientation, ord);
        const auto basis = self_dual_basis(fr);
        const Vec3 other = spectrum(self_dual_matrix(b.weyl, basis.plus, b.ginv));
        CHECK((other - ref).norm() < 1e-10 * std::max(1.0, ref.norm()));
      }
      const auto flipped = curvature_at(evaluate_jet(info.spec, p, 2), Orientation::Negative);
      CHECK((spectrum(flipped.w_plus) - spectrum(b.w_minus)).norm() < 1e-12 * std::max(1.0, ref.norm()));
      CHECK((spectrum(flipped.w_minus) - ref).norm() < 1e-12 * std::max(1.0, ref.norm()));
    }
  }
}

TEST_CASE("divergence of W+ vanishes for Einstein metrics") {
  const auto flat = instantiate(make_family("flat"));
  CHECK(divergence_w_plus(flat, {Vec4(1, 2, 3, 4), "cartesian"}, Orientation::Positive).norm == 0.0);
  const auto info = describe(make_family("kerr"));
  for (const auto& p : sample_points(info, 3, 11)) {
    const auto d = divergence_w_plus(info.spec, p, Orientation::Positive);
    CHECK(d.norm < 1e-7 * std::max(1.0, d.scale));
  }
  // A generic metric has divergence of order eps.
  const ChartPoint q{Vec4(0.2, -0.3, 0.4, 0.1), "cartesian"};
  const double d1 = divergence_w_plus(testing::perturbed_flat(1e-3), q, Orientation::Positive).norm;
  const double d2 = divergence_w_plus(testing::perturbed_flat(2e-3), q, Orientation::Positive).norm;
  CHECK(d1 > 1e-6);
  CHECK(d2 / d1 == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("rough Laplacian of f W+ on trivial inputs") {
  const ScalarField one = [](const Vec4&, int order) { return JetD::constant(1.0, order); };
  const auto flat = instantiate(make_family("flat"));
  CHECK(rough_laplacian_fw(flat, {Vec4(0, 0, 0, 0), "cartesian"}, one, Orientation::Positive).norm() == 0.0);
  const auto sphere = instantiate(make_family("round_sphere"));
  CHECK(rough_laplacian_fw(sphere, {Vec4(0.1, 0.2, 0.3, 0.4), "stereographic"}, one, Orientation::Positive).norm() <
        1e-12);
}
