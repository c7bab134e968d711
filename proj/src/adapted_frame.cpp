#include "qbh/adapted_frame.hpp"

#include <algorithm>
#include <cmath>

#include "qbh/errors.hpp"

namespace qbh {
namespace {

const cd kI(0.0, 1.0);

RealJet dot(const SurfaceGerm& germ, const Pair<RealJet>& u, const Pair<RealJet>& v) {
  RealJet r = RealJet::constant(0.0, 2);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) r += germ.metric(a, b) * u[a] * v[b];
  }
  return r;
}

VectorJet h_of(const SurfaceGerm& germ, const Pair<RealJet>& u, const Pair<RealJet>& v) {
  VectorJet r = u[0] * v[0] * germ.second_fundamental_form(0, 0);
  r += (u[0] * v[1] + u[1] * v[0]) * germ.second_fundamental_form(0, 1);
  r += u[1] * v[1] * germ.second_fundamental_form(1, 1);
  return r;
}

}  // namespace

double AdaptedFrame::directional(const RealJet& f, int k) const {
  return e[k][0] * f.partial(1, 0) + e[k][1] * f.partial(0, 1);
}

RealJet AdaptedFrame::directional_jet(const RealJet& f, int k) const {
  return e_jet[k][0] * f.derivative(0) + e_jet[k][1] * f.derivative(1);
}

AdaptedFrame build_adapted_frame(const SurfaceGerm& germ, double gauge, double tol) {
  if (!(gauge > 0.0)) throw ParameterError("frame gauge must be positive");
  const int s = germ.index();
  const double m = germ.gauge();
  const VectorJet& H = germ.mean_curvature();
  const Eigen::VectorXcd H0 = H.value();
  const double hn = H0.norm();
  if (hn <= tol * m) throw NotMarginallyTrappedError("mean curvature vanishes", hn);
  const double hh = metric(H0, H0, s);
  if (std::abs(hh) > tol * hn * m) {
    throw NotMarginallyTrappedError("mean curvature is not lightlike", std::abs(hh) / hn);
  }

  // v = -J H is tangent exactly when the surface is Lagrangian.
  const VectorJet v = times_i(H) * cd(-1.0);
  const Pair<RealJet> vc = germ.tangent_components(v);
  const double off = (v.value() - germ.push_forward(Eigen::Vector2d(vc[0].value(), vc[1].value()))).norm();
  if (off > tol * m) throw LagrangianViolationError(off);

  AdaptedFrame f;
  f.point = germ.point();
  f.epsilon = germ.epsilon();
  f.index = s;
  f.gauge = gauge;

  // Complementary null direction n = w - <w,w>/(2<w,v>) v from the coordinate vector w most
  // transverse to v.
  const Pair<RealJet> vl{germ.metric(0, 0) * vc[0] + germ.metric(0, 1) * vc[1],
                         germ.metric(1, 0) * vc[0] + germ.metric(1, 1) * vc[1]};
  const int w = std::abs(vl[0].value()) >= std::abs(vl[1].value()) ? 0 : 1;
  const RealJet ratio = germ.metric(w, w) * inv(2.0 * vl[w], "<w,v>");
  Pair<RealJet> n{-(ratio * vc[0]), -(ratio * vc[1])};
  n[w] = n[w] + 1.0;
  const RealJet vn = vl[w];

  f.alpha_jet = gauge * sqrt(vc[0] * vc[0] + vc[1] * vc[1]);
  const RealJet half = inv(2.0 * f.alpha_jet, "alpha");
  const RealJet t = f.alpha_jet * inv(vn, "<v,n>");
  for (int a = 0; a < 2; ++a) {
    f.e_jet[0][a] = half * vc[a] + t * n[a];
    f.e_jet[1][a] = half * vc[a] - t * n[a];
  }

  const Pair<VectorJet> E{germ.push_forward(f.e_jet[0]), germ.push_forward(f.e_jet[1])};
  const Pair<VectorJet> JE{times_i(E[0]), times_i(E[1])};
  const VectorJet h11 = h_of(germ, f.e_jet[0], f.e_jet[0]);
  const VectorJet h12 = h_of(germ, f.e_jet[0], f.e_jet[1]);
  const VectorJet h22 = h_of(germ, f.e_jet[1], f.e_jet[1]);
  f.a_jet = inner(h11, JE[0], s);
  f.b_jet = -inner(h11, JE[1], s);
  f.c_jet = -inner(h12, JE[1], s);
  f.d_jet = -inner(h22, JE[1], s);

  // omega(e_k) = <nabla_{e_k} e1, e2> <e2,e2>
  for (int k = 0; k < 2; ++k) {
    Pair<RealJet> nab;
    for (int c = 0; c < 2; ++c) {
      nab[c] = f.directional_jet(f.e_jet[0][c], k);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) nab[c] += germ.christoffel(c, a, b) * f.e_jet[k][a] * f.e_jet[0][b];
      }
    }
    f.omega_jet[k] = -dot(germ, nab, f.e_jet[1]);
  }

  for (int k = 0; k < 2; ++k) {
    f.e[k] = Eigen::Vector2d(f.e_jet[k][0].value(), f.e_jet[k][1].value());
    f.E[k] = E[k].value();
    f.omega[k] = f.omega_jet[k].value();
  }
  f.alpha = f.alpha_jet.value();
  f.a = f.a_jet.value();
  f.b = f.b_jet.value();
  f.c = f.c_jet.value();
  f.d = f.d_jet.value();
  for (int k = 0; k < 2; ++k) {
    f.derivs.alpha[k] = f.directional(f.alpha_jet, k);
    f.derivs.a[k] = f.directional(f.a_jet, k);
    f.derivs.b[k] = f.directional(f.b_jet, k);
    f.derivs.c[k] = f.directional(f.c_jet, k);
    f.derivs.d[k] = f.directional(f.d_jet, k);
  }

  const double eta[2][2] = {{1.0, 0.0}, {0.0, -1.0}};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double r = std::abs(dot(germ, f.e_jet[i], f.e_jet[j]).value() - eta[i][j]);
      f.orthonormality_residual = std::max(f.orthonormality_residual, r);
    }
  }
  const Eigen::VectorXcd J1 = JE[0].value(), J2 = JE[1].value();
  f.reconstruction_residual = std::max({(h11.value() - (f.a * J1 + f.b * J2)).norm(),
                                        (h12.value() - (-f.b * J1 + f.c * J2)).norm(),
                                        (h22.value() - (-f.c * J1 + f.d * J2)).norm()});
  f.mean_curvature_residual = (H0 - f.alpha * (J1 + J2)).norm();
  return f;
}

double FrameIdentityResiduals::max() const {
  double m = std::max({trace_ac, trace_bd, gauss, connection_gauss});
  for (double r : codazzi) m = std::max(m, r);
  for (double r : combined) m = std::max(m, r);
  return m;
}

FrameIdentityResiduals frame_identity_residuals(const AdaptedFrame& f, double G, double eps) {
  FrameIdentityResiduals r;
  const double a = f.a, b = f.b, c = f.c, d = f.d;
  const double w1 = f.omega[0], w2 = f.omega[1];
  const auto& D = f.derivs;
  r.trace_ac = std::abs(2.0 * f.alpha - (a + c));
  r.trace_bd = std::abs(2.0 * f.alpha - (b - d));
  r.gauss = std::abs(G - ((a - 2.0 * b - c) * (c - b) + eps));

  r.codazzi[0] = std::abs(D.a[1] + 3.0 * b * w2 - (-D.b[0] - (a - 2.0 * c) * w1));
  r.codazzi[1] = std::abs(D.b[1] + (a - 2.0 * c) * w2 - (D.c[0] - (2.0 * b + d) * w1));
  r.codazzi[2] = std::abs(D.d[0] - 3.0 * c * w1 - (D.c[1] - (2.0 * b + d) * w2));

  r.combined[0] = std::abs(D.alpha[0] + D.alpha[1] + f.alpha * (w1 + w2));
  r.combined[1] = std::abs(D.a[0] - D.b[0] + D.b[1] + D.c[1] -
                           ((a - 3.0 * b - 2.0 * c) * w1 + (-2.0 * a + 3.0 * b + c) * w2));
  r.combined[2] = std::abs(D.a[1] + D.b[0] - D.b[1] + D.c[0] -
                           ((-2.0 * a + 3.0 * b + c) * w1 + (a - 3.0 * b - 2.0 * c) * w2));

  const double e1w2 = f.directional(f.omega_jet[1], 0);
  const double e2w1 = f.directional(f.omega_jet[0], 1);
  r.connection_gauss = std::abs(G - (-e1w2 + e2w1 + w1 * w1 - w2 * w2));
  return r;
}

double LemmaResiduals::max() const { return std::max({normal_part, tangential_part, normal_laplacian, decomposition}); }

LemmaResiduals lemma_residuals(const AdaptedFrame& f, const SurfaceGerm& germ) {
  LemmaResiduals r;
  const double a = f.a, b = f.b, c = f.c, eps = f.epsilon;
  const double k = a - 2.0 * b - c;
  const Eigen::VectorXcd J1 = kI * f.E[0], J2 = kI * f.E[1];
  const LaplacianDecomposition dec = laplacian_decomposition(germ);

  const Eigen::VectorXcd normal =
      f.alpha * (k * (a + 2.0 * b - c) - eps) * J1 + f.alpha * (k * (-a + 2.0 * b - 3.0 * c) - eps) * J2;
  r.normal_part = (dec.normal_part - normal).norm();

  const Eigen::VectorXcd tangential = 2.0 * k * (f.derivs.alpha[0] + f.alpha * f.omega[0]) * (f.E[0] - f.E[1]);
  r.tangential_part = (dec.tangential_part - tangential).norm();

  const double G = gauss_curvature(germ);
  r.normal_laplacian = (dec.normal_laplacian_H + G * germ.mean_curvature().value()).norm();
  r.decomposition =
      (dec.laplacian_H - (dec.normal_laplacian_H + dec.shape_term + dec.weingarten_term + dec.derivative_term)).norm();
  return r;
}

Eigen::VectorXcd bitension_from_frame(const AdaptedFrame& f) {
  const double a = f.a, b = f.b, c = f.c, eps = f.epsilon;
  const double k = a - 2.0 * b - c;
  const Eigen::VectorXcd J1 = kI * f.E[0], J2 = kI * f.E[1];
  return -4.0 * k * (f.derivs.alpha[0] + f.alpha * f.omega[0]) * (f.E[0] - f.E[1]) -
         2.0 * f.alpha * (k * (a + 2.0 * b - c) - 6.0 * eps) * J1 -
         2.0 * f.alpha * (k * (-a + 2.0 * b - 3.0 * c) - 6.0 * eps) * J2;
}

}  // namespace qbh
