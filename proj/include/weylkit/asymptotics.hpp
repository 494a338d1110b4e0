#pragma once

// Level sets rho = const of an ALF chart (rho = x^1), shell integrals of the
// rescaled metric, power-law fits, the weighted C^k_1 distance and the
// asymptote of the Killing field.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "weylkit/wu.hpp"
#include "weylkit/zoo.hpp"

namespace weylkit {

// Gauss-Legendre nodes and weights on (lo, hi).
void gauss_legendre(int n, double lo, double hi, std::vector<double>& nodes, std::vector<double>& weights);

// Node counts in the fibre (x^0), polar (x^2) and azimuthal (x^3) directions.
struct ShellResolution {
  int fibre = 32;
  int polar = 32;
  int azimuth = 16;

  ShellResolution doubled() const { return {2 * fibre, 2 * polar, 2 * azimuth}; }
};

struct QuadratureOptions {
  ShellResolution resolution;
  // Integrate cyclic coordinates exactly by a single node carrying the full
  // period.  Only valid when the integrand shares the metric's symmetry.
  bool collapse_cyclic = true;
  double convergence_tol = 1e-6;  // relative change allowed under node doubling
  int max_doublings = 3;
  double fit_discard = 0.25;      // innermost fraction of radii dropped from fits
};

struct GridNode {
  Vec4 x = Vec4::Zero();
  double weight = 0.0;  // coordinate quadrature weight for dx^0 dx^2 dx^3
};

struct HypersurfaceGrid {
  double radius = 0.0;
  ShellResolution resolution;
  std::vector<GridNode> nodes;
};

// Product grid on rho = radius: trapezoidal on periodic coordinates,
// Gauss-Legendre on bounded ones.  Throws DomainError for charts whose
// non-radial coordinates are unbounded.
HypersurfaceGrid make_grid(const MetricSpec& spec, double radius, const ShellResolution& res,
                           bool collapse_cyclic = false);

// Per-node induced volume element sqrt(det g_Sigma) times the coordinate weight.
std::vector<double> induced_volume_element(const HypersurfaceGrid& grid, const MetricSpec& metric);

// ---------------------------------------------------------------------------
// Power-law fits

struct PowerFit {
  bool exact_zero = false;  // every value below the zero floor: no slope
  bool valid = false;       // a slope was fitted
  double slope = 0.0;
  double intercept = 0.0;   // log-space
  double ci_low = 0.0, ci_high = 0.0;  // 95% interval for the slope
  double r_squared = 0.0;
  int points_used = 0;
  double window_start = 0.0;  // smallest radius used
};

// Least-squares slope of log|value| against log(radius) after dropping the
// innermost `discard` fraction of radii.  Values with |v| <= zero_floor at
// every radius are reported as an exact zero.
PowerFit power_fit(const std::vector<double>& radii, const std::vector<double>& values, double discard,
                   double zero_floor);

// ---------------------------------------------------------------------------
// Shell integrals

struct FluxRow {
  double radius = 0.0;
  double vol_g = 0.0;       // int 1 dmu_g on Sigma
  double wplus_int = 0.0;   // int |W+_g|
  double s_int = 0.0;       // int |s_g|
  double omega_flux = 0.0;  // int omega ^ * d omega, Sigma oriented as the boundary of {rho' < rho}
  double s_radial = 0.0;    // int |s_g| / |d rho|_g, the radial density of int |s_g| dmu_g
  double flux_magnitude = 0.0;  // int |V|_g with V the vector dual to omega ^ * d omega; floor for omega_flux
  int polar_nodes = 0;      // polar resolution at which the row converged
};

struct FluxReport {
  std::vector<FluxRow> rows;
  PowerFit vol_fit, wplus_fit, s_fit, flux_fit;
  double discard = 0.25;
};

// Pointwise values of the shell integrands at a node of the primary chart.
struct ShellIntegrands {
  double density = 0.0;  // sqrt(det g_Sigma) in the primary chart
  double wplus = 0.0;
  double s = 0.0;
  double flux = 0.0;     // (omega ^ * d omega) evaluated on Sigma, as a density against dmu_g
  double flux_magnitude = 0.0;
  double lapse = 0.0;    // 1 / |d rho|_g
  double volume = 0.0;   // sqrt(det g) in the primary chart
  double energy = 0.0;   // |nabla omega|^2 / 2 + 3 |d omega|^2
  double divergence = 0.0;  // * d(omega ^ * d omega)
};
using ShellEvaluator = std::function<ShellIntegrands(const Vec4& x)>;

// Integrands of the rescaled metric g = alpha_h^{2/3} h with its Kahler form,
// evaluated through conditioned_chart.
ShellEvaluator rescaled_shell_evaluator(const MetricSpec& h, Orientation o);
// Integrands of an arbitrary metric g (orientation from its MetricSpec) with a given 2-form.
ShellEvaluator shell_evaluator(const MetricSpec& g, const TwoFormField& omega);

// Integrates the four columns on each radius, doubling nodes until every column
// changes by at most convergence_tol (NumericalError otherwise), and fits slopes.
FluxReport boundary_integrals(const MetricSpec& chart_spec, const ShellEvaluator& eval,
                              const std::vector<double>& radii, const QuadratureOptions& opts = {});
// The construction on h: g = rescaled metric, omega its Kahler form.
FluxReport boundary_integrals(const MetricSpec& h, Orientation o, const std::vector<double>& radii,
                              const QuadratureOptions& opts = {});
// An explicit metric g and 2-form (cyclic collapse is disabled).
FluxReport boundary_integrals(const MetricSpec& g, const TwoFormField& omega, const std::vector<double>& radii,
                              QuadratureOptions opts = {});

// 3 (flux(rho) - flux(rho_0)) >= int_{rho_0 < rho' < rho} (|nabla omega|^2 / 2 + 3 |d omega|^2) dmu_g,
// together with the Stokes check flux(rho) - flux(rho_0) = int * d(omega ^ * d omega).
struct HologramRow {
  double radius = 0.0;
  double boundary = 0.0;  // 3 (flux(rho) - flux(rho_0))
  double bulk = 0.0;      // annulus integral of |nabla omega|^2 / 2 + 3 |d omega|^2
  double stokes_boundary = 0.0;  // flux(rho) - flux(rho_0)
  double stokes_bulk = 0.0;      // annulus integral of * d(omega ^ * d omega)
  double margin = 0.0;           // boundary - bulk
  bool pass = false;
};

std::vector<HologramRow> hologram_check(const MetricSpec& h, Orientation o, const std::vector<double>& radii,
                                        const QuadratureOptions& opts = {}, int radial_nodes = 8);

// Partial sums of int |s_g| dmu_g over [radii.front(), radii[k]] (trapezoid in rho
// over the s_radial column) and a tail estimate from the fitted decay.
struct L1Proxy {
  std::vector<double> partial_sums;
  PowerFit density_fit;  // decay of the radial density
  double tail = 0.0;     // estimated integral beyond the last radius
  bool converges = false;  // density decays faster than rho^-1
};

L1Proxy scalar_curvature_l1(const FluxReport& report);

// ---------------------------------------------------------------------------
// Fall-off

enum class FalloffQuantity { Riemann, WPlus, AlphaH, AlphaG, GradAlphaG };
std::string to_string(FalloffQuantity q);
FalloffQuantity falloff_quantity_from_string(const std::string& s);  // ConfigError on unknown names

struct FalloffResult {
  FalloffQuantity quantity = FalloffQuantity::WPlus;
  std::vector<double> radii;
  std::vector<double> sup_values;  // max over shell nodes
  PowerFit fit;
};

// Pointwise value of a fall-off quantity, evaluated through conditioned_chart.
double falloff_value(const MetricSpec& h, const Vec4& x, FalloffQuantity q, Orientation o);

FalloffResult falloff_fit(const FamilyInfo& info, FalloffQuantity q, const std::vector<double>& radii,
                          Orientation o = Orientation::Positive, const QuadratureOptions& opts = {});

// ---------------------------------------------------------------------------
// Weighted C^k_1 distance

struct WeightedNorm {
  int k = 0;
  double value = 0.0;               // sup over samples of sum_j (1 + dist)^{j+1} |nabla^j (h - h0)|
  std::array<double, 4> per_order{};  // sup of each weighted term separately
  ChartPoint argmax;
  int samples = 0;
};

// Graded radial shells from the inner radius out to `outer` times the mass
// scale, geometrically spaced, with random angles per shell.
std::vector<ChartPoint> weighted_sample_plan(const FamilyInfo& info, int shells = 12, int per_shell = 16,
                                             std::uint64_t seed = 1, double outer = 200.0);

// Distance of h from h0 with h0's Levi-Civita connection; dist = |rho - base_radius|.
WeightedNorm weighted_distance(const MetricSpec& h, const MetricSpec& h0, int k, const std::vector<ChartPoint>& plan,
                               double base_radius);

// ---------------------------------------------------------------------------
// Killing asymptote

using PointVectorField = std::function<Vec4(const ChartPoint&)>;

struct KillingAsymptote {
  double c = 0.0;                    // xi = c T + ..., median over the outermost shell
  std::vector<double> radii;
  std::vector<double> deviation;     // sup over the shell of |xi / c - T|_h
  std::vector<double> t_norm;        // sup over the shell of |T|_h
  PowerFit fit;
};

KillingAsymptote killing_asymptote(const MetricSpec& h, const Vec4& T, const PointVectorField& xi,
                                   const std::vector<double>& radii, const QuadratureOptions& opts = {});
// The constructed xi = J grad s_g against the family's fibre field T.
KillingAsymptote killing_asymptote(const FamilyInfo& info, Orientation o, const std::vector<double>& radii,
                                   const QuadratureOptions& opts = {});

}  // namespace weylkit
