#pragma once

// Pseudo-orthonormal frame adapted to a marginally trapped Lagrangian surface: H = alpha (J e1 + J e2),
// <e1,e1> = 1, <e2,e2> = -1. The frame carries jets of its coordinate components so that the
// connection form and directional derivatives of the invariants come out exactly.

#include <Eigen/Core>

#include <array>

#include "qbh/geometry.hpp"
#include "qbh/jet.hpp"

namespace qbh {

struct FrameDerivatives {
  /// x[k] = e_{k+1}(x).
  std::array<double, 2> alpha{}, a{}, b{}, c{}, d{};
};

struct AdaptedFrame {
  Eigen::Vector2d point;
  double epsilon = 0.0;
  int index = 1;
  /// Boost parameter; alpha scales linearly with it.
  double gauge = 1.0;

  /// Coordinate components of e1, e2 and their images in the ambient space.
  std::array<Eigen::Vector2d, 2> e;
  std::array<Eigen::VectorXcd, 2> E;
  double alpha = 0.0;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  /// omega_1^2(e1), omega_1^2(e2).
  std::array<double, 2> omega{};
  FrameDerivatives derivs;

  /// Jets behind the values above: components (order 2), invariants (order 2), omega (order 1).
  Pair<Pair<RealJet>> e_jet;
  RealJet alpha_jet, a_jet, b_jet, c_jet, d_jet;
  Pair<RealJet> omega_jet;

  /// max over pairs of |<e_i,e_j> - eta_ij|.
  double orthonormality_residual = 0.0;
  /// max coordinate norm of h(e_i,e_j) minus its (a,b,c,d) form.
  double reconstruction_residual = 0.0;
  /// Coordinate norm of H - alpha (J e1 + J e2).
  double mean_curvature_residual = 0.0;

  /// e_k(f) at the base point for k = 0, 1.
  double directional(const RealJet& f, int k) const;
  /// Same, as a jet one order lower.
  RealJet directional_jet(const RealJet& f, int k) const;
};

/// Raises NotMarginallyTrappedError when H is zero or not lightlike at tolerance `tol` (scaled by the
/// germ gauge) and LagrangianViolationError when J H is not tangent.
AdaptedFrame build_adapted_frame(const SurfaceGerm& germ, double gauge = 1.0, double tol = 1e-8);

struct FrameIdentityResiduals {
  /// |2 alpha - (a + c)| and |2 alpha - (b - d)|.
  double trace_ac = 0.0;
  double trace_bd = 0.0;
  /// |G - ((a - 2b - c)(c - b) + eps)|.
  double gauss = 0.0;
  /// Codazzi equations in frame components.
  std::array<double, 3> codazzi{};
  /// Their combinations after substituting the trace relations.
  std::array<double, 3> combined{};
  /// |G - (-e1(w(e2)) + e2(w(e1)) + w(e1)^2 - w(e2)^2)|.
  double connection_gauss = 0.0;

  double max() const;
};

FrameIdentityResiduals frame_identity_residuals(const AdaptedFrame& frame, double G, double eps);

struct LemmaResiduals {
  /// Normal part of Delta H against its frame expression.
  double normal_part = 0.0;
  /// Tangential part of Delta H against its frame expression.
  double tangential_part = 0.0;
  /// |Delta^D H + G H|.
  double normal_laplacian = 0.0;
  /// Delta H against the sum of normal Laplacian and shape-operator terms.
  double decomposition = 0.0;

  double max() const;
};

LemmaResiduals lemma_residuals(const AdaptedFrame& frame, const SurfaceGerm& germ);

/// Bitension field assembled from the frame invariants.
Eigen::VectorXcd bitension_from_frame(const AdaptedFrame& frame);

}  // namespace qbh
