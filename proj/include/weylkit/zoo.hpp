#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weylkit/curvature.hpp"
#include "weylkit/geometry.hpp"

namespace weylkit {

enum class FamilyKind { Flat, Schwarzschild, Kerr, TaubNut, TaubBolt, EguchiHanson, RoundSphere, AlfModel };
enum class HyperkahlerSide { None, Plus, Minus, Both };

struct FamilyFlags {
  bool einstein = true;
  bool ricci_flat = true;
  bool wu_plus = false;
  bool wu_minus = false;
  HyperkahlerSide hyperkahler_side = HyperkahlerSide::None;
  bool alf = false;
};

struct MetricFamily {
  FamilyKind kind = FamilyKind::Flat;
  std::map<std::string, double> params;

  std::string name() const;
  double param(const std::string& key) const;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parses a family name and fills default parameters; unknown names or
// parameters raise ConfigError, inadmissible values raise std::domain_error.
MetricFamily make_family(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> family_names();
std::string to_string(FamilyKind kind);
std::string to_string(HyperkahlerSide side);

// Fibred structure at infinity of an ALF chart: the fibre field T, the
// connection form eta, the transverse link metric gamma and the background
// model d rho^2 + rho^2 gamma + eta^2.  On every shipped chart rho = x^1.
struct ALFModelData {
  std::string link_type;  // "S3" or "S2xS1"
  Vec4 T = Vec4::Zero();  // constant coordinate components
  std::function<std::array<JetD, 4>(const Vec4&, int)> eta;
  std::function<Tensor<JetD, 2>(const Vec4&, int)> link_metric;
  std::optional<MetricSpec> model;
  int fiber_index = 0;
  double fiber_period = 0.0;
};

struct ALFResiduals {
  double eta_of_T = 0.0;        // |T -| eta - 1|
  double T_into_deta = 0.0;     // |T -| d eta|
  double lie_T_gamma = 0.0;     // |L_T gamma|
};

ALFResiduals alf_structure_residuals(const ALFModelData& alf, const Vec4& x);

struct SamplingBox {
  Vec4 lo = Vec4::Zero();
  Vec4 hi = Vec4::Zero();
};

struct FamilyInfo {
  MetricFamily family;
  MetricSpec spec;
  FamilyFlags flags;
  SamplingBox box;
  std::optional<ALFModelData> alf;
  ChartPoint reference;       // base point of the weighted norm, seed of sign anchoring
  double base_radius = 0.0;   // dist(p) ~ rho - base_radius
  double mass_scale = 1.0;    // length scale for radius ladders
  // Lowest radius of the chart interior (horizon, bolt or nut) plus margin.
  double inner_radius = 0.0;
};

MetricSpec instantiate(const MetricFamily& family);
FamilyInfo describe(const MetricFamily& family);
FamilyFlags expected_flags(const MetricFamily& family);

// Deterministic pseudo-random points inside the sampling box.
std::vector<ChartPoint> sample_points(const FamilyInfo& info, int count, std::uint64_t seed);

// Chart point on the level set rho = radius with the remaining coordinates taken from `angles`.
ChartPoint at_radius(const FamilyInfo& info, double radius, const Vec4& angles);

struct RicciReport {
  int samples = 0;
  double max_ricci = 0.0;
  double max_relative = 0.0;  // max |Ric| / |Rm|
  bool pass = false;
  double tolerance = 0.0;
};

RicciReport ricci_flat_selfcheck(const FamilyInfo& info, int sample_count, std::uint64_t seed = 1,
                                 double relative_tolerance = 1e-8);
RicciReport ricci_flat_selfcheck(const MetricSpec& spec, const std::vector<ChartPoint>& points,
                                 double relative_tolerance = 1e-8);

}  // namespace weylkit
