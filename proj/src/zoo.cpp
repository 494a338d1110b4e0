#include "weylkit/zoo.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace weylkit {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Exclusion widths around coordinate singularities.
constexpr double kAxisMargin = 1e-2;
constexpr double kHorizonMargin = 0.5;

struct FamilyEntry {
  FamilyKind kind;
  const char* name;
  std::map<std::string, double> defaults;
};

const std::vector<FamilyEntry>& registry() {
  static const std::vector<FamilyEntry> r = {
      {FamilyKind::Flat, "flat", {}},
      {FamilyKind::Schwarzschild, "schwarzschild", {{"m", 1.0}}},
      {FamilyKind::Kerr, "kerr", {{"m", 1.0}, {"a", 0.3}}},
      {FamilyKind::TaubNut, "taub_nut", {{"n", 1.0}}},
      {FamilyKind::TaubBolt, "taub_bolt", {{"n", 1.0}}},
      {FamilyKind::EguchiHanson, "eguchi_hanson", {{"a", 1.0}}},
      {FamilyKind::RoundSphere, "round_sphere", {{"r", 1.0}}},
      {FamilyKind::AlfModel, "alf_model", {{"n", 0.0}, {"period", 2 * kPi}}},
  };
  return r;
}

using X = std::array<JetD, 4>;
using G = MetricExpansion<double>;

G zero_metric() { return G(JetD(0.0)); }

CoordinateRange angle_range() { return {0.0, kPi, kAxisMargin, kAxisMargin, false}; }

// Coefficients of fib * (dpsi + cos(theta) dphi)^2 + radial * dr^2 + sphere * dOmega^2.
struct FibredCoefficients {
  JetD fib, radial, sphere;
};

G fibred_metric(const X& x, const FibredCoefficients& k) {
  const JetD c = cos(x[2]), s = sin(x[2]);
  G g = zero_metric();
  g(0, 0) = k.fib;
  g(1, 1) = k.radial;
  g(2, 2) = k.sphere;
  g(3, 3) = k.sphere * s * s + k.fib * c * c;
  g(0, 3) = g(3, 0) = k.fib * c;
  return g;
}

// (r^2 - n^2)/D dr^2 + (r^2 - n^2) dOmega^2 + 4 n^2 D/(r^2 - n^2) (dpsi + cos(theta) dphi)^2
// with D = r^2 - 2 M r + n^2; coordinates (psi, r, theta, phi).
FibredCoefficients taub_coefficients(const JetD& r, double n, double mass) {
  const JetD r2n2 = r * r - n * n;
  const JetD d = r * r - 2.0 * mass * r + n * n;
  return {4.0 * n * n * d / r2n2, r2n2 / d, r2n2};
}

FibredCoefficients eguchi_hanson_coefficients(const JetD& r, double a) {
  const JetD v = 1.0 - a * a * a * a / (r * r * r * r);
  return {0.25 * r * r * v, 1.0 / v, 0.25 * r * r};
}

G taub_family(const X& x, double n, double mass) { return fibred_metric(x, taub_coefficients(x[1], n, mass)); }

// Pole charts.  Near theta = 0 (sign +1) or theta = pi (sign -1) the angles are
// replaced by X = sin(theta) cos(phi), Y = sign sin(theta) sin(phi), which keeps
// the orientation.  Then
//   dtheta^2 + sin^2 dphi^2 = dX^2 + dY^2 + (X dX + Y dY)^2 / (1 - X^2 - Y^2),
//   sin^2(theta) dphi = sign (X dY - Y dX).
// Fibred charts also shift psi -> psi + sign phi, after which
//   dpsi + cos(theta) dphi = dpsi' - (X dY - Y dX) / (1 + sqrt(1 - X^2 - Y^2)).
constexpr double kPoleSwitch = 0.5;  // use the pole chart where sin(theta) < this

struct PoleForms {
  JetD s2;
  Tensor<JetD, 2> sphere;  // on the (X, Y) slots 2, 3
  std::array<JetD, 4> rot; // X dY - Y dX
};

PoleForms pole_forms(const X& x) {
  PoleForms f{x[2] * x[2] + x[3] * x[3], Tensor<JetD, 2>(JetD(0.0)), {JetD(0.0), JetD(0.0), -x[3], x[2]}};
  const JetD c2 = 1.0 - f.s2;
  for (int i = 2; i < 4; ++i)
    for (int j = 2; j < 4; ++j) f.sphere(i, j) = x[i] * x[j] / c2 + (i == j ? 1.0 : 0.0);
  return f;
}

G fibred_pole_metric(const X& x, const FibredCoefficients& k) {
  const PoleForms f = pole_forms(x);
  const JetD shift = -1.0 / (1.0 + sqrt(1.0 - f.s2));
  std::array<JetD, 4> eta{JetD(1.0), JetD(0.0), shift * f.rot[2], shift * f.rot[3]};
  G g = zero_metric();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = k.fib * eta[i] * eta[j] + k.sphere * f.sphere(i, j);
  g(1, 1) = k.radial;
  return g;
}

// Euclidean Kerr in (tau, r, X, Y).
G kerr_pole_metric(const X& x, double m, double a, double sign) {
  const JetD& r = x[1];
  const PoleForms f = pole_forms(x);
  const JetD sigma = r * r - a * a * (1.0 - f.s2);
  const JetD delta = r * r - 2.0 * m * r - a * a;
  const JetD w = r * r - a * a;
  const JetD twist = a * a * (delta - w - sigma) / sigma;
  const JetD cross = sign * a * (w - delta) / sigma;
  G g = zero_metric();
  g(0, 0) = (delta + a * a * f.s2) / sigma;
  g(1, 1) = sigma / delta;
  for (int i = 2; i < 4; ++i) {
    g(0, i) = g(i, 0) = cross * f.rot[i];
    for (int j = 2; j < 4; ++j) g(i, j) = sigma * f.sphere(i, j) + twist * f.rot[i] * f.rot[j];
  }
  return g;
}

ChartDomain pole_domain(const ChartDomain& base) {
  ChartDomain d = base;
  d.ranges[2] = d.ranges[3] = {-1.0, 1.0, 0.0, 0.0, false};
  return d;
}

// north/south pole specs built by make(sign).
template <typename Make>
MetricSpec::RechartFn pole_rechart(Make make, bool shift_fibre) {
  const MetricSpec north = make(1.0), south = make(-1.0);
  return [north, south, shift_fibre](const Vec4& p, MetricSpec& out, Vec4& q, Mat4& jac) {
    const double s = std::sin(p[2]), c = std::cos(p[2]);
    if (s >= kPoleSwitch || p[2] <= 0.0 || p[2] >= kPi) return false;
    const double sign = c > 0.0 ? 1.0 : -1.0;
    const double cp = std::cos(p[3]), sp = std::sin(p[3]);
    q = Vec4(p[0], p[1], s * cp, sign * s * sp);
    jac << 1, 0, 0, shift_fibre ? sign : 0.0,  //
        0, 1, 0, 0,                             //
        0, 0, c * cp, -s * sp,                  //
        0, 0, sign * c * sp, sign * s * cp;
    if (shift_fibre) q[0] += sign * p[3];
    out = sign > 0 ? north : south;
    return true;
  };
}

// Fibred data shared by the Taub charts: T = (1/2n) d_psi, eta = 2n (dpsi + cos(theta) dphi).
ALFModelData taub_alf(double n) {
  ALFModelData alf;
  alf.link_type = "S3";
  alf.T = Vec4(1.0 / (2.0 * n), 0.0, 0.0, 0.0);
  alf.fiber_index = 0;
  alf.fiber_period = 4 * kPi;
  alf.eta = [n](const Vec4& p, int order) {
    const JetD th = JetD::variable(p[2], 2, order);
    return X{JetD::constant(2.0 * n, order), JetD::constant(0.0, order), JetD::constant(0.0, order),
             2.0 * n * cos(th)};
  };
  alf.link_metric = [](const Vec4& p, int order) {
    const JetD th = JetD::variable(p[2], 2, order);
    G g(JetD::constant(0.0, order));
    g(2, 2) = JetD::constant(1.0, order);
    g(3, 3) = sin(th) * sin(th);
    return g;
  };
  return alf;
}

// T = d_tau, eta = dtau on the (tau, r, theta, phi) charts of the Schwarzschild/Kerr ends.
ALFModelData product_alf(double period) {
  ALFModelData alf;
  alf.link_type = "S2xS1";
  alf.T = Vec4(1.0, 0.0, 0.0, 0.0);
  alf.fiber_index = 0;
  alf.fiber_period = period;
  alf.eta = [](const Vec4&, int order) {
    return X{JetD::constant(1.0, order), JetD::constant(0.0, order), JetD::constant(0.0, order),
             JetD::constant(0.0, order)};
  };
  alf.link_metric = [](const Vec4& p, int order) {
    const JetD th = JetD::variable(p[2], 2, order);
    G g(JetD::constant(0.0, order));
    g(2, 2) = JetD::constant(1.0, order);
    g(3, 3) = sin(th) * sin(th);
    return g;
  };
  return alf;
}

// d rho^2 + rho^2 gamma + eta^2 built from the fibred data.
MetricSpec model_metric(const std::string& name, const std::string& chart, ChartDomain domain, const ALFModelData& alf) {
  auto eta = alf.eta;
  auto gamma = alf.link_metric;
  MetricSpec::ExpandFn fn = [eta, gamma](const Vec4& p, int order) {
    const JetD rho = JetD::variable(p[1], 1, order);
    const auto e = eta(p, order);
    const auto gam = gamma(p, order);
    G g(JetD::constant(0.0, order));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = rho * rho * gam(i, j) + e[i] * e[j];
    g(1, 1) += 1.0;
    return g;
  };
  return MetricSpec(name, chart, domain, fn);
}

MetricSpec::RechartFn kerr_pole_chart(const std::string& name, const ChartDomain& d, double m, double a) {
  return pole_rechart(
      [=](double sign) {
        return MetricSpec::from_components(name, sign > 0 ? "boyer_lindquist_north" : "boyer_lindquist_south",
                                           pole_domain(d),
                                           [=](const X& x) { return kerr_pole_metric(x, m, a, sign); });
      },
      false);
}

template <typename Coefficients>
MetricSpec::RechartFn fibred_pole_chart(const std::string& name, const ChartDomain& d, Coefficients k) {
  return pole_rechart(
      [=](double sign) {
        return MetricSpec::from_components(name, sign > 0 ? "taub_north" : "taub_south", pole_domain(d),
                                           [=](const X& x) { return fibred_pole_metric(x, k(x[1])); });
      },
      true);
}

ChartDomain radial_domain(double fiber_lo, double fiber_hi, double r_min, double margin) {
  ChartDomain d;
  d.ranges[0] = CoordinateRange::periodic_range(fiber_lo, fiber_hi);
  d.ranges[1] = {r_min, std::numeric_limits<double>::infinity(), margin, 0.0, false};
  d.ranges[2] = angle_range();
  d.ranges[3] = CoordinateRange::periodic_range(0.0, 2 * kPi);
  return d;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::domain_error("inadmissible family parameters: " + what);
}

double kerr_outer_root(double m, double a) { return m + std::sqrt(m * m + a * a); }

// Period of tau making the bolt r = r_+ regular: 2 pi (r_+^2 - a^2) / sqrt(m^2 + a^2).
double kerr_period(double m, double a) {
  const double rp = kerr_outer_root(m, a);
  return 2 * kPi * (rp * rp - a * a) / std::sqrt(m * m + a * a);
}

}  // namespace

std::string to_string(FamilyKind kind) {
  for (const auto& e : registry())
    if (e.kind == kind) return e.name;
  return "unknown";
}

std::string to_string(HyperkahlerSide side) {
  switch (side) {
    case HyperkahlerSide::None: return "none";
    case HyperkahlerSide::Plus: return "plus";
    case HyperkahlerSide::Minus: return "minus";
    case HyperkahlerSide::Both: return "both";
  }
  return "none";
}

std::string MetricFamily::name() const { return to_string(kind); }

double MetricFamily::param(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError("family " + name() + " has no parameter '" + key + "'");
  return it->second;
}

std::vector<std::string> family_names() {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.emplace_back(e.name);
  return names;
}

MetricFamily make_family(const std::string& name, const std::map<std::string, double>& params) {
  for (const auto& e : registry()) {
    if (name != e.name) continue;
    MetricFamily f{e.kind, e.defaults};
    for (const auto& [k, v] : params) {
      if (!f.params.count(k)) throw ConfigError("family " + name + " has no parameter '" + k + "'");
      if (!std::isfinite(v)) throw ConfigError("parameter '" + k + "' must be finite");
      f.params[k] = v;
    }
    instantiate(f);  // validates admissibility
    return f;
  }
  throw ConfigError("unknown metric family '" + name + "'");
}

FamilyFlags expected_flags(const MetricFamily& f) {
  FamilyFlags fl;
  switch (f.kind) {
    case FamilyKind::Flat:
      fl.hyperkahler_side = HyperkahlerSide::Both;
      break;
    case FamilyKind::RoundSphere:
      fl.ricci_flat = false;
      break;
    case FamilyKind::Schwarzschild:
    case FamilyKind::Kerr:
    case FamilyKind::TaubBolt:
      fl.wu_plus = fl.wu_minus = true;
      fl.alf = true;
      break;
    case FamilyKind::TaubNut:
      // The chart orientation is the reverse of the hyperkahler one: W^- = 0 and W^+ is Wu-positive.
      fl.wu_plus = true;
      fl.hyperkahler_side = HyperkahlerSide::Minus;
      fl.alf = true;
      break;
    case FamilyKind::EguchiHanson:
      fl.hyperkahler_side = HyperkahlerSide::Plus;
      break;
    case FamilyKind::AlfModel:
      fl.alf = true;
      if (f.param("n") != 0.0) {
        fl.einstein = fl.ricci_flat = false;
      } else {
        fl.hyperkahler_side = HyperkahlerSide::Both;
      }
      break;
  }
  return fl;
}

MetricSpec instantiate(const MetricFamily& f) { return describe(f).spec; }

FamilyInfo describe(const MetricFamily& f) {
  const std::string name = f.name();
  std::optional<MetricSpec> spec;
  FamilyInfo info{f, MetricSpec("", "", {}, nullptr), expected_flags(f), {}, std::nullopt, {}, 0.0, 1.0, 0.0};

  switch (f.kind) {
    case FamilyKind::Flat: {
      ChartDomain d;  // all of R^4
      spec = MetricSpec::from_components(name, "cartesian", d, [](const X&) {
        G g = zero_metric();
        for (int i = 0; i < 4; ++i) g(i, i) = JetD(1.0);
        return g;
      });
      spec->set_cyclic_coordinates({0, 1, 2, 3});
      info.box = {Vec4::Constant(-5.0), Vec4::Constant(5.0)};
      info.reference = {Vec4::Zero(), "cartesian"};
      break;
    }
    case FamilyKind::RoundSphere: {
      const double rad = f.param("r");
      require(rad > 0.0, "round_sphere needs r > 0");
      ChartDomain d;
      spec = MetricSpec::from_components(name, "stereographic", d, [rad](const X& x) {
        JetD q = 1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
        JetD c = 4.0 * rad * rad / (q * q);
        G g = zero_metric();
        for (int i = 0; i < 4; ++i) g(i, i) = c;
        return g;
      });
      info.box = {Vec4::Constant(-2.0), Vec4::Constant(2.0)};
      info.reference = {Vec4::Zero(), "stereographic"};
      info.mass_scale = rad;
      break;
    }
    case FamilyKind::Schwarzschild: {
      const double m = f.param("m");
      require(m > 0.0, "schwarzschild needs m > 0");
      const double period = 8 * kPi * m;
      auto d = radial_domain(0.0, period, 2 * m, kHorizonMargin);
      spec = MetricSpec::from_components(name, "boyer_lindquist", d, [m](const X& x) {
        const JetD& r = x[1];
        const JetD s = sin(x[2]);
        const JetD v = 1.0 - 2.0 * m / r;
        G g = zero_metric();
        g(0, 0) = v;
        g(1, 1) = 1.0 / v;
        g(2, 2) = r * r;
        g(3, 3) = r * r * s * s;
        return g;
      });
      spec->set_cyclic_coordinates({0, 3});
      spec->set_regular_chart(kerr_pole_chart(name, d, m, 0.0));
      info.alf = product_alf(period);
      info.alf->model = model_metric(name + "_model", "boyer_lindquist", d, *info.alf);
      info.inner_radius = 2 * m + kHorizonMargin;
      info.mass_scale = m;
      break;
    }
    case FamilyKind::Kerr: {
      const double m = f.param("m"), a = f.param("a");
      require(m > 0.0 && std::abs(a) < m, "kerr needs m > 0 and |a| < m");
      const double rp = kerr_outer_root(m, a);
      const double period = kerr_period(m, a);
      auto d = radial_domain(0.0, period, rp, kHorizonMargin);
      spec = MetricSpec::from_components(name, "boyer_lindquist", d, [m, a](const X& x) {
        const JetD& r = x[1];
        const JetD c = cos(x[2]), s = sin(x[2]);
        const JetD s2 = s * s;
        const JetD sigma = r * r - a * a * c * c;
        const JetD delta = r * r - 2.0 * m * r - a * a;
        const JetD w = r * r - a * a;
        G g = zero_metric();
        g(0, 0) = (delta + a * a * s2) / sigma;
        g(0, 3) = g(3, 0) = a * s2 * (w - delta) / sigma;
        g(3, 3) = s2 * (delta * a * a * s2 + w * w) / sigma;
        g(1, 1) = sigma / delta;
        g(2, 2) = sigma;
        return g;
      });
      spec->set_cyclic_coordinates({0, 3});
      spec->set_regular_chart(kerr_pole_chart(name, d, m, a));
      info.alf = product_alf(period);
      info.alf->model = model_metric(name + "_model", "boyer_lindquist", d, *info.alf);
      info.inner_radius = rp + kHorizonMargin;
      info.mass_scale = m;
      break;
    }
    case FamilyKind::TaubNut:
    case FamilyKind::TaubBolt: {
      const double n = f.param("n");
      require(n > 0.0, "taub families need n > 0");
      const bool bolt = f.kind == FamilyKind::TaubBolt;
      const double mass = bolt ? 1.25 * n : n;
      const double r0 = bolt ? 2 * n : n;
      auto d = radial_domain(0.0, 4 * kPi, r0, kHorizonMargin * n);
      spec = MetricSpec::from_components(name, "taub", d, [n, mass](const X& x) { return taub_family(x, n, mass); });
      spec->set_cyclic_coordinates({0, 3});
      spec->set_regular_chart(fibred_pole_chart(name, d, [n, mass](const JetD& r) {
        return taub_coefficients(r, n, mass);
      }));
      info.alf = taub_alf(n);
      info.alf->model = model_metric(name + "_model", "taub", d, *info.alf);
      info.inner_radius = r0 + kHorizonMargin * n;
      info.mass_scale = n;
      break;
    }
    case FamilyKind::EguchiHanson: {
      const double a = f.param("a");
      require(a > 0.0, "eguchi_hanson needs a > 0");
      auto d = radial_domain(0.0, 2 * kPi, a, kHorizonMargin * a);
      spec = MetricSpec::from_components(name, "taub", d, [a](const X& x) {
        return fibred_metric(x, eguchi_hanson_coefficients(x[1], a));
      });
      spec->set_cyclic_coordinates({0, 3});
      spec->set_regular_chart(fibred_pole_chart(name, d, [a](const JetD& r) {
        return eguchi_hanson_coefficients(r, a);
      }));
      info.inner_radius = a + kHorizonMargin * a;
      info.mass_scale = a;
      break;
    }
    case FamilyKind::AlfModel: {
      const double n = f.param("n"), period = f.param("period");
      require(period > 0.0, "alf_model needs period > 0");
      auto d = radial_domain(0.0, period, 0.0, kHorizonMargin);
      ALFModelData alf;
      if (n == 0.0) {
        alf = product_alf(period);
      } else {
        alf.link_type = "S3";
        alf.T = Vec4(1.0, 0.0, 0.0, 0.0);
        alf.fiber_period = period;
        alf.eta = [n](const Vec4& p, int order) {
          const JetD th = JetD::variable(p[2], 2, order);
          return X{JetD::constant(1.0, order), JetD::constant(0.0, order), JetD::constant(0.0, order),
                   2.0 * n * cos(th)};
        };
        alf.link_metric = product_alf(period).link_metric;
      }
      spec = model_metric(name, "alf", d, alf);
      spec->set_cyclic_coordinates({0, 3});
      alf.model = *spec;
      info.alf = alf;
      info.inner_radius = kHorizonMargin;
      break;
    }
  }

  info.spec = *spec;
  if (f.kind != FamilyKind::Flat && f.kind != FamilyKind::RoundSphere) {
    const auto& dom = info.spec.domain().ranges;
    const double r_lo = info.inner_radius;
    info.box.lo = Vec4(dom[0].lo, r_lo, kAxisMargin, 0.0);
    info.box.hi = Vec4(dom[0].hi, r_lo + 10.0 * info.mass_scale, kPi - kAxisMargin, 2 * kPi);
    info.reference = {Vec4(0.0, r_lo + info.mass_scale, 0.5 * kPi, 0.0), info.spec.chart()};
    info.base_radius = info.reference.coords[1];
  }
  return info;
}

std::vector<ChartPoint> sample_points(const FamilyInfo& info, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ChartPoint> pts;
  pts.reserve(count);
  while (static_cast<int>(pts.size()) < count) {
    Vec4 x;
    for (int i = 0; i < 4; ++i) x[i] = info.box.lo[i] + u(rng) * (info.box.hi[i] - info.box.lo[i]);
    if (!info.spec.domain().contains(x)) continue;
    pts.push_back({x, info.spec.chart()});
  }
  return pts;
}

ChartPoint at_radius(const FamilyInfo& info, double radius, const Vec4& angles) {
  Vec4 x = angles;
  x[1] = radius;
  return {x, info.spec.chart()};
}

ALFResiduals alf_structure_residuals(const ALFModelData& alf, const Vec4& x) {
  ALFResiduals r;
  const auto eta = alf.eta(x, 1);
  double et = 0.0;
  for (int i = 0; i < 4; ++i) et += alf.T[i] * eta[i].value();
  r.eta_of_T = std::abs(et - 1.0);
  // (d eta)_{ab} = d_a eta_b - d_b eta_a, contracted with T on the first slot.
  double s = 0.0;
  for (int b = 0; b < 4; ++b) {
    double v = 0.0;
    for (int a = 0; a < 4; ++a) {
      MultiIndex ea{0, 0, 0, 0}, eb{0, 0, 0, 0};
      ea[a] = 1;
      eb[b] = 1;
      v += alf.T[a] * (eta[b].partial(ea) - eta[a].partial(eb));
    }
    s += v * v;
  }
  r.T_into_deta = std::sqrt(s);
  // T has constant components, so L_T gamma = T^c d_c gamma.
  const auto gam = alf.link_metric(x, 1);
  double l = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double v = 0.0;
      for (int c = 0; c < 4; ++c) {
        MultiIndex ec{0, 0, 0, 0};
        ec[c] = 1;
        v += alf.T[c] * gam(i, j).partial(ec);
      }
      l += v * v;
    }
  r.lie_T_gamma = std::sqrt(l);
  return r;
}

RicciReport ricci_flat_selfcheck(const MetricSpec& spec, const std::vector<ChartPoint>& points, double tol) {
  RicciReport rep;
  rep.tolerance = tol;
  for (const auto& p : points) {
    const auto c = conditioned_chart(spec, p);
    const auto b = curvature_at(c.spec, c.point);
    const double ric = b.ricci_norm(), rm = b.riemann_norm();
    rep.max_ricci = std::max(rep.max_ricci, ric);
    const double rel = ric == 0.0 ? 0.0 : ric / std::max(rm, 1e-300);
    rep.max_relative = std::max(rep.max_relative, rel);
    ++rep.samples;
  }
  rep.pass = rep.max_relative < tol;
  return rep;
}

RicciReport ricci_flat_selfcheck(const FamilyInfo& info, int sample_count, std::uint64_t seed, double tol) {
  return ricci_flat_selfcheck(info.spec, sample_points(info, sample_count, seed), tol);
}

}  // namespace weylkit
