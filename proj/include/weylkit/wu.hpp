#pragma once

#include <optional>
#include <vector>

#include "weylkit/curvature.hpp"

namespace weylkit {

// ---------------------------------------------------------------------------
// Spectra of trace-free symmetric 3x3 operators.

struct WuSpectrum {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;  // alpha >= beta >= gamma
  double det_w = 0.0;
  double norm_sq_w = 0.0;
};

// Top root of x^3 - (|W|^2/2) x - det W by the principal-branch Cardano formula;
// the two remaining roots come from deflation on the orthogonal complement of
// the top eigenvector.
WuSpectrum cardano_alpha(const Mat3& w);
// Cyclic Jacobi rotations until the off-diagonal norm drops below 1e-14 |W|.
WuSpectrum jacobi_eigen_oracle(const Mat3& w);

// Unit eigenvector of a symmetric matrix for a simple eigenvalue.
Vec3 eigenvector_for(const Mat3& w, double lambda);

struct Eigenform {
  Vec3 coefficients;  // unit vector in the basis omega_i, so |omega|^2 = 2
  Mat4 form;          // coordinate components sum_i c_i omega_i (zero if no basis given)
  double gap = 0.0;   // alpha - beta
};

// alpha-eigenform of w.  `anchor` (coefficients in the same basis) fixes the
// overall sign by a positive inner product; without one the first coefficient
// above 1e-3 in magnitude is made positive.
Eigenform top_eigenform(const Mat3& w, const std::array<Mat4, 3>* basis = nullptr,
                        const std::optional<Vec3>& anchor = std::nullopt);

// f = alpha_h^{-1/3}
double conformal_factor(double alpha_h);

// ---------------------------------------------------------------------------
// Jet-level conformal construction about one point.

struct ConformalData {
  LocalGeometry h;          // geometry of the given metric, order N
  Mat3J w;                  // W^+ of h (orientation-selected), order N-2
  WuSpectrum spectrum_h;
  Vec3 c0;                  // top eigenvector at the base point, anchored
  std::array<JetD, 3> c;    // smooth unit eigenvector field, order N-2
  JetD alpha_h;             // order N-2
  TwoForm omega_h;          // |omega|_h^2 = 2
  JetD f;                   // alpha_h^{-1/3}
  JetD weight;              // alpha_h^{2/3} = f^{-2}
  MetricExpansion<double> g;  // weight * h
};

enum class Eigenbranch { Top, Complement };

// Anchor: coordinate components of a 2-form the eigenform must pair positively with.
ConformalData conformal_data(const MetricSpec& h, const Vec4& p, int order, Orientation o,
                             const std::optional<Mat4>& anchor = std::nullopt,
                             Eigenbranch branch = Eigenbranch::Top);

// Rescaled metric g = alpha_h^{2/3} h as a first-class metric.
MetricSpec rescaled_metric(const MetricSpec& h, Orientation o);

struct RescaledStack {
  ConformalData base;
  LocalGeometry g;              // order N-2
  TwoForm omega;                // |omega|_g^2 = 2
  Tensor<JetD, 2> J;            // (c, a) -> J^c_a = g^{cb} omega_{ab}
  JetD s_g;                     // order N-4
  std::array<JetD, 4> xi;       // J grad s_g, order N-5 (present when N >= 5)
  bool has_xi = false;
};

RescaledStack rescaled_stack_jets(const MetricSpec& h, const Vec4& p, int order, Orientation o,
                                  const std::optional<Mat4>& anchor = std::nullopt);

struct WuData {
  ChartPoint point;
  Orientation orientation = Orientation::Positive;
  WuSpectrum spectrum_h;
  WuSpectrum spectrum_g;
  Mat3 w_plus_g;
  Mat4 omega;        // |omega|_g^2 = 2
  double f = 0.0;
  double alpha_h = 0.0, alpha_g = 0.0;
  Mat4 J;            // J(c, a) = J^c_a
  double s_g = 0.0;
  Vec4 xi = Vec4::Zero();
  Mat4 g;
  // Self-consistency measures.
  double eigen_residual = 0.0;   // |W+_g(omega) - alpha_g omega|
  double j_square_residual = 0.0;  // |J^2 + I|
};

WuData rescaled_stack(const MetricSpec& h, const ChartPoint& p, Orientation o,
                      const std::optional<Mat4>& anchor = std::nullopt);

// omega_g along a sampling path, each sign fixed against the previous point
// (the first against `seed`, or the default rule).
std::vector<Mat4> eigenforms_along(const MetricSpec& h, const std::vector<ChartPoint>& path, Orientation o,
                                   const std::optional<Mat4>& seed = std::nullopt);

// Smooth field views of the construction.
ScalarField alpha_field(const MetricSpec& h, Orientation o);
ScalarField conformal_factor_field(const MetricSpec& h, Orientation o);
ScalarField scalar_curvature_g_field(const MetricSpec& h, Orientation o);
VectorField killing_candidate(const MetricSpec& h, Orientation o);
// omega_g (Top) or a unit field in the complementary (beta, gamma) eigenspace.
TwoFormField eigenform_field(const MetricSpec& h, Orientation o, Eigenbranch branch = Eigenbranch::Top);

// |nabla omega|_g for the constructed omega.
double nabla_omega_residual(const MetricSpec& h, const ChartPoint& p, Orientation o);
// |nabla omega| of an arbitrary 2-form field, in the given metric.
double parallel_form_residual(const MetricSpec& g, const TwoFormField& omega, const ChartPoint& p);

// |nabla_(a xi_b)| in the metric `spec`.
double killing_residual(const MetricSpec& spec, const VectorField& xi, const ChartPoint& p);
// |nabla_a nabla_b xi^c - R^c_{bad} xi^d| in the metric `spec`.
double jacobi_killing_residual(const MetricSpec& spec, const VectorField& xi, const ChartPoint& p);

// The constructed xi = J grad s_g and its residuals, computed in the chart
// chosen by conditioned_chart.  killing_candidate_at returns components in the
// chart of p.
Vec4 killing_candidate_at(const MetricSpec& h, const ChartPoint& p, Orientation o);
double candidate_killing_residual(const MetricSpec& h, const ChartPoint& p, Orientation o, bool in_g = false);
double candidate_jacobi_residual(const MetricSpec& h, const ChartPoint& p, Orientation o);

// ---------------------------------------------------------------------------
// Ambi-Kahler pair.

enum class KillingTensorMetric { H, GPlus, GMinus };

struct AmbiKahlerPair {
  WuData plus, minus;
  Mat4 S;               // S^a_b
  double k = 0.0;       // <xi_-, xi_+> / |xi_+|^2 before normalization
  double killing_tensor_residual = 0.0;
  double killing_tensor_scale = 0.0;
  double symmetry_residual = 0.0;  // |h(S.,.) - h(.,S.)|
};

AmbiKahlerPair ambitoric_stack(const MetricSpec& h, const ChartPoint& p,
                               KillingTensorMetric metric = KillingTensorMetric::H);

}  // namespace weylkit
