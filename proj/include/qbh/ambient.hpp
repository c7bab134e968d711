#pragma once

// The three Lorentzian complex space forms. Surfaces in CP^2_1(4) and CH^2_1(-4) are handled
// through horizontal lifts into S^5_2(1) in C^3_1 and H^5_3(-1) in C^3_2.

#include <Eigen/Core>

#include <string>
#include <string_view>

#include "qbh/jet.hpp"
#include "qbh/pseudo_hermitian.hpp"

namespace qbh {

enum class AmbientKind { FlatC21, SphereLiftCP, HyperbolicLiftCH };

struct AmbientSpec {
  AmbientKind kind = AmbientKind::FlatC21;
  double epsilon = 0.0;
  int lift_dim = 2;
  int lift_index = 1;

  static AmbientSpec flat() { return {AmbientKind::FlatC21, 0.0, 2, 1}; }
  static AmbientSpec sphere_lift() { return {AmbientKind::SphereLiftCP, 1.0, 3, 1}; }
  static AmbientSpec hyperbolic_lift() { return {AmbientKind::HyperbolicLiftCH, -1.0, 3, 2}; }
  static AmbientSpec of(AmbientKind k) {
    switch (k) {
      case AmbientKind::FlatC21: return flat();
      case AmbientKind::SphereLiftCP: return sphere_lift();
      case AmbientKind::HyperbolicLiftCH: return hyperbolic_lift();
    }
    return flat();
  }

  bool lifted() const { return kind != AmbientKind::FlatC21; }
  Signature signature() const { return {lift_dim, lift_index}; }
  /// Required value of <L, L> for a lift (1/epsilon); meaningless for the flat ambient.
  double lift_norm() const { return lifted() ? 1.0 / epsilon : 0.0; }

  friend bool operator==(const AmbientSpec&, const AmbientSpec&) = default;
};

inline std::string_view to_string(AmbientKind k) {
  switch (k) {
    case AmbientKind::FlatC21: return "FlatC21";
    case AmbientKind::SphereLiftCP: return "SphereLiftCP";
    case AmbientKind::HyperbolicLiftCH: return "HyperbolicLiftCH";
  }
  return "?";
}

/// Curvature tensor of the complex space form of holomorphic curvature 4 eps:
/// R(X,Y)Z = eps{<Y,Z>X - <X,Z>Y + <Z,JY>JX - <Z,JX>JY + 2<X,JY>JZ}.
/// For lifted ambients the arguments are horizontal vectors at the lift point.
inline Eigen::VectorXcd space_form_curvature(double eps, const Eigen::VectorXcd& X, const Eigen::VectorXcd& Y,
                                             const Eigen::VectorXcd& Z, int s) {
  const cd i(0.0, 1.0);
  const Eigen::VectorXcd JX = i * X;
  const Eigen::VectorXcd JY = i * Y;
  const Eigen::VectorXcd JZ = i * Z;
  return eps * (metric(Y, Z, s) * X - metric(X, Z, s) * Y + metric(Z, JY, s) * JX - metric(Z, JX, s) * JY +
                2.0 * metric(X, JY, s) * JZ);
}

/// Removes the position and vertical components of W at the lift point L:
/// P(W) = W - eps<W,L>L - eps<W,iL>iL. Identity for the flat ambient.
inline VectorJet horizontal_projection(const AmbientSpec& ambient, const VectorJet& position, const VectorJet& w) {
  if (!ambient.lifted()) return w;
  const int s = ambient.lift_index;
  const VectorJet iL = times_i(position);
  return w - ambient.epsilon * (inner(w, position, s) * position) - ambient.epsilon * (inner(w, iL, s) * iL);
}

inline Eigen::VectorXcd horizontal_projection(const AmbientSpec& ambient, const Eigen::VectorXcd& position,
                                              const Eigen::VectorXcd& w) {
  if (!ambient.lifted()) return w;
  const int s = ambient.lift_index;
  const Eigen::VectorXcd iL = cd(0.0, 1.0) * position;
  return w - ambient.epsilon * metric(w, position, s) * position - ambient.epsilon * metric(w, iL, s) * iL;
}

/// Covariant derivative along coordinate `var` of a vector field `field` along the map `position`.
/// Flat: coordinate differentiation. Lifts: P(d field) - eps<d position, i position> i field, where
/// the second term accounts for vertical motion of the map (it vanishes on horizontal lifts).
inline VectorJet covariant_derivative(const AmbientSpec& ambient, const VectorJet& position, const VectorJet& field,
                                      int var) {
  if (field.order() < 1) throw OrderError("covariant derivative needs a field jet of order >= 1");
  const VectorJet d = field.derivative(var);
  if (!ambient.lifted()) return d;
  const int s = ambient.lift_index;
  const VectorJet p = position.truncated(d.order());
  const RealJet vertical_rate = ambient.epsilon * inner(position.derivative(var), times_i(p), s);
  return horizontal_projection(ambient, p, d) - vertical_rate * times_i(field.truncated(d.order()));
}

}  // namespace qbh
