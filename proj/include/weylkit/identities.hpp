#pragma once

#include <string>
#include <vector>

#include "weylkit/wu.hpp"

namespace weylkit {

struct ResidualReport {
  std::string name;
  ChartPoint point;
  double residual = 0.0;  // identities: |lhs - rhs|; inequalities: amount of violation (<= 0 when satisfied)
  double scale = 0.0;     // magnitude of the largest term
  double tolerance = 0.0;
  double margin = 0.0;    // inequalities: greater side minus lesser side
  bool inequality = false;
  bool pass = false;
};

inline constexpr double kResidualFloor = 1e-14;
inline constexpr double kInequalitySlack = 1e-10;

ResidualReport identity_report(std::string name, const ChartPoint& p, double residual, double scale, double tol);
// greater >= lesser, with a one-sided slack of kInequalitySlack * scale.
ResidualReport inequality_report(std::string name, const ChartPoint& p, double greater, double lesser,
                                 double scale = 0.0);

// nabla^* nabla W+ + (s/2) W+ - 6 W+ o W+ + 2 |W+|^2 I for an Einstein metric.
ResidualReport weitzenbock_einstein_residual(const MetricSpec& spec, const ChartPoint& p, double tol = 1e-5,
                                             double einstein_tol = 1e-8);

// The same identity for f W+ in the rescaled metric g = alpha_h^{2/3} h.
ResidualReport weitzenbock_rescaled_residual(const MetricSpec& h, const ChartPoint& p, Orientation o,
                                             double tol = 1e-4);
// |delta_g (f W+)| relative to |nabla (f W+)|.
ResidualReport rescaled_divergence_residual(const MetricSpec& h, const ChartPoint& p, Orientation o,
                                            double tol = 1e-6);

// (d + d^*)^2 phi = nabla^* nabla phi - 2 W(phi) + (s/3) phi in the metric `spec`.
ResidualReport hodge_weitzenbock_residual(const MetricSpec& spec, const ChartPoint& p, const TwoFormField& phi,
                                          double tol = 1e-5);
// The same with phi = omega of the rescaled metric.
ResidualReport hodge_weitzenbock_rescaled(const MetricSpec& h, const ChartPoint& p, Orientation o, double tol = 1e-5);

// Pointwise terms of the Kahler argument, all evaluated in g.
struct KahlerTerms {
  double alpha = 0.0, s = 0.0, f = 0.0;
  double w_plus_norm = 0.0;           // |W+|
  double grad_omega_sq = 0.0;         // |nabla omega|^2
  double w_grad_grad = 0.0;           // W+(nabla^a omega, nabla_a omega)
  double lap_fw_omega = 0.0;          // <nabla^* nabla (f W+), omega (x) omega>
  double omega_hodge_lap = 0.0;       // <omega, (d + d^*)^2 omega>
  double d_omega_sq = 0.0;            // |d omega|^2
  double flux_form_norm = 0.0;        // |omega ^ * d omega|
  double codiff_norm = 0.0;           // |delta omega|
  double d_flux = 0.0;                // * d[omega ^ * d omega]
  double omega_wedge_lap = 0.0;       // * (omega ^ (d + d^*)^2 omega)
};

KahlerTerms kahler_terms(const MetricSpec& h, const ChartPoint& p, Orientation o);

// Inequalities (a)-(f), the sharp form of (e) and 4 sqrt(3) alpha >= s_+.
std::vector<ResidualReport> inequality_battery(const MetricSpec& h, const ChartPoint& p, Orientation o);
std::vector<ResidualReport> inequality_battery(const KahlerTerms& t, const ChartPoint& p);

}  // namespace weylkit
