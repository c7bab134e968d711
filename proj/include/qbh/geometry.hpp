#pragma once

// Local differential geometry of a Lagrangian surface at one point: induced metric, Levi-Civita
// connection, second fundamental form, mean curvature, Gauss curvature and the bitension field.
// Everything is computed in jet arithmetic from the order-4 germ of the immersion (or lift).

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qbh/ambient.hpp"
#include "qbh/immersion.hpp"
#include "qbh/jet.hpp"
#include "qbh/pseudo_hermitian.hpp"

namespace qbh {

template <typename T>
using Pair = std::array<T, 2>;
template <typename T>
using Sym2 = std::array<std::array<T, 2>, 2>;

class SurfaceGerm {
 public:
  SurfaceGerm(const AmbientSpec& ambient, const VectorJet& position, const Eigen::Vector2d& point);

  static SurfaceGerm at(const ImmersionPatch& patch, const Eigen::Vector2d& p, const BackendOptions& opts = {});

  const AmbientSpec& ambient() const { return ambient_; }
  double epsilon() const { return ambient_.epsilon; }
  int index() const { return ambient_.lift_index; }
  const Eigen::Vector2d& point() const { return point_; }

  const VectorJet& position() const { return position_; }
  /// phi_a, order 3.
  const VectorJet& tangent(int a) const { return tangent_[a]; }
  /// g_ab and g^ab, order 3.
  const RealJet& metric(int a, int b) const { return g_[a][b]; }
  const RealJet& inverse_metric(int a, int b) const { return ginv_[a][b]; }
  /// Gamma^k_ab, order 2.
  const RealJet& christoffel(int k, int a, int b) const { return gamma_[k][a][b]; }
  /// h(d_a, d_b), order 2.
  const VectorJet& second_fundamental_form(int a, int b) const { return h_[a][b]; }
  /// H = (1/2) g^ab h_ab, order 2.
  const VectorJet& mean_curvature() const { return H_; }

  Eigen::Matrix2d metric_matrix() const;
  Eigen::Matrix2d inverse_metric_matrix() const;
  /// Max coordinate norm of the coordinate second derivatives phi_ab, floored at 1.
  double gauge() const { return gauge_; }
  /// Max |g_ab|, floored at 1.
  double metric_scale() const;

  /// Ambient covariant derivative along coordinate `var` of a field along the map.
  VectorJet connection(const VectorJet& field, int var) const;
  VectorJet tangential_part(const VectorJet& w) const;
  /// Normal part; for lifts this is also horizontal.
  VectorJet normal_part(const VectorJet& w) const;
  /// D_a xi = normal part of the ambient derivative.
  VectorJet normal_connection(const VectorJet& xi, int var) const { return normal_part(connection(xi, var)); }
  /// Hess_ab V = nabla_a nabla_b V - Gamma^k_ab nabla_k V; order drops by two.
  Sym2<VectorJet> hessian(const VectorJet& field) const;
  /// Rough Laplacian -g^ab Hess_ab V.
  VectorJet laplacian(const VectorJet& field) const;
  /// Shape operator (A_xi)^c_b = g^cd <h_bd, xi>.
  Sym2<RealJet> shape_operator(const VectorJet& xi) const;
  /// Tangent vector X^a phi_a.
  VectorJet push_forward(const Pair<RealJet>& components) const;
  Eigen::VectorXcd push_forward(const Eigen::Vector2d& components) const;
  /// Components of the tangential part of w: g^ab <w, phi_b>.
  Pair<RealJet> tangent_components(const VectorJet& w) const;

 private:
  AmbientSpec ambient_;
  Eigen::Vector2d point_;
  VectorJet position_;
  Pair<VectorJet> tangent_;
  Sym2<RealJet> g_, ginv_;
  std::array<Sym2<RealJet>, 2> gamma_;
  Sym2<VectorJet> h_;
  VectorJet H_;
  double gauge_ = 1.0;
};

struct PointGeometry {
  Eigen::Vector2d point;
  Eigen::VectorXcd phi_x, phi_y;
  Eigen::Matrix2d metric;
  Eigen::Matrix2d inverse_metric;
  double det_g = 0.0;
  /// christoffel[k](a, b) = Gamma^k_ab.
  std::array<Eigen::Matrix2d, 2> christoffel;
  double lagrangian_residual = 0.0;
  double horizontality_residual = 0.0;
  /// |<L, L> - 1/eps| for lifts, 0 for the flat ambient.
  double lift_norm_residual = 0.0;
};

PointGeometry point_geometry(const SurfaceGerm& germ);
PointGeometry point_geometry(const ImmersionPatch& patch, const Eigen::Vector2d& p, const BackendOptions& opts = {});

struct FundamentalForms {
  /// h(dx,dx), h(dx,dy), h(dy,dy).
  std::array<Eigen::VectorXcd, 3> h;
  Eigen::VectorXcd mean_curvature;
  /// D_x H and D_y H.
  std::array<Eigen::VectorXcd, 2> normal_connection_H;
  /// max |<h_ij, phi_k>| and |<H, phi_k>|.
  double normality_residual = 0.0;
  double mean_curvature_normality = 0.0;
  /// max |<h_ij, L>|, |<h_ij, iL>| (lifts only).
  double horizontality_residual = 0.0;

  Eigen::Matrix2d inverse_metric;
  /// Coordinate components of A_xi X.
  Eigen::Vector2d shape(const Eigen::VectorXcd& xi, const Eigen::Vector2d& X, int s) const;
  const Eigen::VectorXcd& h_at(int a, int b) const { return h[a + b]; }
};

FundamentalForms fundamental_forms(const SurfaceGerm& germ);

/// Intrinsic Gauss curvature <R(dx,dy)dy, dx> / det g.
double gauss_curvature(const SurfaceGerm& germ);

/// Pseudo-orthonormal tangent frame given by coordinate components; e[0] spacelike, e[1] timelike.
struct TangentFrame {
  std::array<Eigen::Vector2d, 2> e;
  std::array<double, 2> eta{1.0, -1.0};
};

TangentFrame orthonormal_frame(const Eigen::Matrix2d& g);
/// Hyperbolic rotation of a frame by rapidity theta.
TangentFrame boosted(const TangentFrame& frame, double theta);

/// Bitension field as the frame trace of the rough Laplacian of tau = 2H plus the ambient curvature
/// term. Uses orthonormal_frame when no frame is given.
Eigen::VectorXcd bitension_direct(const SurfaceGerm& germ, const std::optional<TangentFrame>& frame = {});
/// Laplacian of H with the geometer's sign.
Eigen::VectorXcd laplacian_mean_curvature(const SurfaceGerm& germ);
/// -2 Delta H + 10 eps H.
Eigen::VectorXcd bitension_via_laplacian(const SurfaceGerm& germ);

struct BitensionResult {
  Eigen::VectorXcd tau;
  Eigen::VectorXcd tau2_direct;
  Eigen::VectorXcd tau2_laplacian;
  Eigen::VectorXcd laplacian_H;
  double route_discrepancy = 0.0;
  CausalCharacter mean_curvature_character = CausalCharacter::zero;
  CausalCharacter bitension_character = CausalCharacter::zero;
};

BitensionResult bitension(const SurfaceGerm& germ, double tol = 1e-8);

/// Split of Delta H into the normal Laplacian and the shape-operator terms:
/// Delta H = Delta^D H + trace h(., A_H .) + trace A_{D H} + trace (nabla A_H).
struct LaplacianDecomposition {
  Eigen::VectorXcd laplacian_H;
  Eigen::VectorXcd normal_laplacian_H;
  Eigen::VectorXcd shape_term;
  Eigen::VectorXcd weingarten_term;
  Eigen::VectorXcd derivative_term;
  Eigen::VectorXcd normal_part;
  Eigen::VectorXcd tangential_part;
};

LaplacianDecomposition laplacian_decomposition(const SurfaceGerm& germ);

struct ClassificationFlags {
  bool lagrangian = false;
  bool horizontal = false;
  bool marginally_trapped = false;
  bool minimal = false;
  bool biharmonic = false;
  bool quasi_biharmonic = false;

  friend bool operator==(const ClassificationFlags&, const ClassificationFlags&) = default;
};

struct ClassificationReport {
  Eigen::Vector2d point;
  ClassificationFlags flags;
  double lagrangian_residual = 0.0;
  double horizontality_residual = 0.0;
  double mean_curvature_norm = 0.0;
  double mean_curvature_square = 0.0;
  double bitension_norm = 0.0;
  double bitension_square = 0.0;
  double gauss_curvature = 0.0;
  double gauss_residual = 0.0;
  double gauge = 1.0;
  CausalCharacter mean_curvature_character = CausalCharacter::zero;
  CausalCharacter bitension_character = CausalCharacter::zero;
  /// Set when a normalized test quantity falls in (tol, 100 tol]; `ambiguous` names them.
  bool indeterminate = false;
  std::vector<std::string> ambiguous;
  BitensionResult bitension;
};

ClassificationReport classify_point(const SurfaceGerm& germ, double tol = 1e-8);
ClassificationReport classify_point(const ImmersionPatch& patch, const Eigen::Vector2d& p, double tol = 1e-8,
                                    const BackendOptions& opts = {});

struct StructuralResiduals {
  double gauss = 0.0;
  double codazzi = 0.0;
};

/// Gauss equation on random tangent vectors drawn from `seed`, and the Codazzi equation on the
/// coordinate basis.
StructuralResiduals structural_residuals(const SurfaceGerm& germ, std::uint64_t seed = 7, int samples = 4);

/// Curvature of the projected connection on the lift space form at a point base (with
/// <base, base> = 1/eps), for horizontal X, Y, Z; returns R(X,Y)Z computed by iterating
/// covariant_derivative along a two-parameter family of lift points.
Eigen::VectorXcd connection_curvature(const AmbientSpec& ambient, const Eigen::VectorXcd& base,
                                      const Eigen::VectorXcd& X, const Eigen::VectorXcd& Y,
                                      const Eigen::VectorXcd& Z);

}  // namespace qbh
