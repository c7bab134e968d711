#include "qbh/geometry.hpp"
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <random>

#include "qbh/errors.hpp"

namespace qbh {
namespace {

using Riemann = std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>;

// R^d_cab = d_a G^d_bc - d_b G^d_ac + G^d_ae G^e_bc - G^d_be G^e_ac at the base point.
Riemann riemann(const SurfaceGerm& germ) {
  Riemann R{};
  auto G = [&](int k, int a, int b) { return germ.christoffel(k, a, b).value(); };
  auto dG = [&](int e, int k, int a, int b) { return germ.christoffel(k, a, b).partial(e == 0 ? 1 : 0, e == 1 ? 1 : 0); };
  for (int d = 0; d < 2; ++d) {
    for (int c = 0; c < 2; ++c) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          double r = dG(a, d, b, c) - dG(b, d, a, c);
          for (int e = 0; e < 2; ++e) r += G(d, a, e) * G(e, b, c) - G(d, b, e) * G(e, a, c);
          R[d][c][a][b] = r;
        }
      }
    }
  }
  return R;
}

// Zero-order (value) of sum_k w_k v_k for scalar jets w and vector jets v.
Eigen::VectorXcd contract(const Pair<double>& w, const Pair<Eigen::VectorXcd>& v) { return w[0] * v[0] + w[1] * v[1]; }

Eigen::VectorXcd values_of(const Pair<VectorJet>& v, int k) { return v[k].value(); }

}  // namespace

SurfaceGerm::SurfaceGerm(const AmbientSpec& ambient, const VectorJet& position, const Eigen::Vector2d& point)
    : ambient_(ambient), point_(point), position_(position) {
  position_.require(4);
  if (position_.nvars() != 2) throw OrderError("surface germs are bivariate jets");
  if (position_.value().size() != ambient_.lift_dim) {
    throw DimensionError("immersion dimension does not match the ambient");
  }
  const int s = index();
  for (int a = 0; a < 2; ++a) tangent_[a] = position_.derivative(a);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) g_[a][b] = inner(tangent_[a], tangent_[b], s);
  }
  const RealJet det = g_[0][0] * g_[1][1] - g_[0][1] * g_[1][0];
  const double scale = metric_scale();
  if (!(std::abs(det.value()) > 1e-10 * scale * scale)) throw DegeneracyError(det.value());
  const RealJet idet = inv(det, "det g");
  ginv_[0][0] = g_[1][1] * idet;
  ginv_[1][1] = g_[0][0] * idet;
  ginv_[0][1] = -(g_[0][1] * idet);
  ginv_[1][0] = ginv_[0][1];

  // Christoffel symbols of the first kind, then raised.
  std::array<Sym2<RealJet>, 2> first;
  for (int c = 0; c < 2; ++c) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        first[c][a][b] = 0.5 * (g_[b][c].derivative(a) + g_[a][c].derivative(b) - g_[a][b].derivative(c));
      }
    }
  }
  for (int k = 0; k < 2; ++k) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) gamma_[k][a][b] = ginv_[k][0] * first[0][a][b] + ginv_[k][1] * first[1][a][b];
    }
  }

  for (int a = 0; a < 2; ++a) {
    for (int b = a; b < 2; ++b) {
      const VectorJet w = connection(tangent_[b], a) - (gamma_[0][a][b] * tangent_[0] + gamma_[1][a][b] * tangent_[1]);
      h_[a][b] = normal_part(w);
    }
  }
  h_[1][0] = h_[0][1];
  H_ = 0.5 * (ginv_[0][0] * h_[0][0] + 2.0 * (ginv_[0][1] * h_[0][1]) + ginv_[1][1] * h_[1][1]);

  gauge_ = 1.0;
  for (int i = 0; i <= 2; ++i) gauge_ = std::max(gauge_, position_.partial(2 - i, i).norm());
}

SurfaceGerm SurfaceGerm::at(const ImmersionPatch& patch, const Eigen::Vector2d& p, const BackendOptions& opts) {
  return SurfaceGerm(patch.ambient, patch_germ(patch, p, opts), p);
}

Eigen::Matrix2d SurfaceGerm::metric_matrix() const {
  Eigen::Matrix2d m;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) m(a, b) = g_[a][b].value();
  }
  return m;
}

Eigen::Matrix2d SurfaceGerm::inverse_metric_matrix() const {
  Eigen::Matrix2d m;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) m(a, b) = ginv_[a][b].value();
  }
  return m;
}

double SurfaceGerm::metric_scale() const {
  double m = 1.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) m = std::max(m, std::abs(g_[a][b].value()));
  }
  return m;
}

VectorJet SurfaceGerm::connection(const VectorJet& field, int var) const {
  return covariant_derivative(ambient_, position_, field, var);
}

Pair<RealJet> SurfaceGerm::tangent_components(const VectorJet& w) const {
  const int s = index();
  const RealJet p0 = inner(w, tangent_[0], s);
  const RealJet p1 = inner(w, tangent_[1], s);
  return {ginv_[0][0] * p0 + ginv_[0][1] * p1, ginv_[1][0] * p0 + ginv_[1][1] * p1};
}

VectorJet SurfaceGerm::tangential_part(const VectorJet& w) const { return push_forward(tangent_components(w)); }

VectorJet SurfaceGerm::normal_part(const VectorJet& w) const {
  return horizontal_projection(ambient_, position_, w) - tangential_part(w);
}

VectorJet SurfaceGerm::push_forward(const Pair<RealJet>& c) const { return c[0] * tangent_[0] + c[1] * tangent_[1]; }

Eigen::VectorXcd SurfaceGerm::push_forward(const Eigen::Vector2d& c) const {
  return c[0] * tangent_[0].value() + c[1] * tangent_[1].value();
}

Sym2<VectorJet> SurfaceGerm::hessian(const VectorJet& field) const {
  const Pair<VectorJet> d{connection(field, 0), connection(field, 1)};
  Sym2<VectorJet> hess;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      hess[a][b] = connection(d[b], a) - (gamma_[0][a][b] * d[0] + gamma_[1][a][b] * d[1]);
    }
  }
  return hess;
}

VectorJet SurfaceGerm::laplacian(const VectorJet& field) const {
  const Sym2<VectorJet> hess = hessian(field);
  return -(ginv_[0][0] * hess[0][0] + ginv_[0][1] * hess[0][1] + ginv_[1][0] * hess[1][0] + ginv_[1][1] * hess[1][1]);
}

Sym2<RealJet> SurfaceGerm::shape_operator(const VectorJet& xi) const {
  const int s = index();
  Sym2<RealJet> lowered;
  for (int b = 0; b < 2; ++b) {
    for (int d = 0; d < 2; ++d) lowered[b][d] = inner(h_[b][d], xi, s);
  }
  Sym2<RealJet> A;
  for (int c = 0; c < 2; ++c) {
    for (int b = 0; b < 2; ++b) A[c][b] = ginv_[c][0] * lowered[b][0] + ginv_[c][1] * lowered[b][1];
  }
  return A;
}

// ---------------------------------------------------------------------------

PointGeometry point_geometry(const SurfaceGerm& germ) {
  PointGeometry pg;
  const int s = germ.index();
  const cd i(0.0, 1.0);
  pg.point = germ.point();
  pg.phi_x = germ.tangent(0).value();
  pg.phi_y = germ.tangent(1).value();
  pg.metric = germ.metric_matrix();
  pg.inverse_metric = germ.inverse_metric_matrix();
  pg.det_g = pg.metric.determinant();
  for (int k = 0; k < 2; ++k) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) pg.christoffel[k](a, b) = germ.christoffel(k, a, b).value();
    }
  }
  const Eigen::VectorXcd phi[2] = {pg.phi_x, pg.phi_y};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      pg.lagrangian_residual = std::max(pg.lagrangian_residual, std::abs(metric(Eigen::VectorXcd(i * phi[a]), phi[b], s)));
    }
  }
  if (germ.ambient().lifted()) {
    const Eigen::VectorXcd L = germ.position().value();
    const Eigen::VectorXcd iL = i * L;
    for (int a = 0; a < 2; ++a) {
      pg.horizontality_residual = std::max(pg.horizontality_residual, std::abs(metric(phi[a], iL, s)));
    }
    pg.lift_norm_residual = std::abs(metric(L, L, s) - germ.ambient().lift_norm());
  }
  return pg;
}

PointGeometry point_geometry(const ImmersionPatch& patch, const Eigen::Vector2d& p, const BackendOptions& opts) {
  return point_geometry(SurfaceGerm::at(patch, p, opts));
}

Eigen::Vector2d FundamentalForms::shape(const Eigen::VectorXcd& xi, const Eigen::Vector2d& X, int s) const {
  Eigen::Matrix2d lowered;
  for (int b = 0; b < 2; ++b) {
    for (int d = 0; d < 2; ++d) lowered(b, d) = metric(h_at(b, d), xi, s);
  }
  return inverse_metric * lowered.transpose() * X;
}

FundamentalForms fundamental_forms(const SurfaceGerm& germ) {
  FundamentalForms ff;
  const int s = germ.index();
  ff.h = {germ.second_fundamental_form(0, 0).value(), germ.second_fundamental_form(0, 1).value(),
          germ.second_fundamental_form(1, 1).value()};
  ff.mean_curvature = germ.mean_curvature().value();
  for (int a = 0; a < 2; ++a) ff.normal_connection_H[a] = germ.normal_connection(germ.mean_curvature(), a).value();
  ff.inverse_metric = germ.inverse_metric_matrix();
  const Eigen::VectorXcd L = germ.position().value();
  const Eigen::VectorXcd iL = cd(0.0, 1.0) * L;
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXcd phi = germ.tangent(k).value();
    for (const auto& h : ff.h) ff.normality_residual = std::max(ff.normality_residual, std::abs(metric(h, phi, s)));
    ff.mean_curvature_normality = std::max(ff.mean_curvature_normality, std::abs(metric(ff.mean_curvature, phi, s)));
  }
  if (germ.ambient().lifted()) {
    for (const auto& h : ff.h) {
      ff.horizontality_residual =
          std::max({ff.horizontality_residual, std::abs(metric(h, L, s)), std::abs(metric(h, iL, s))});
    }
  }
  return ff;
}

double gauss_curvature(const SurfaceGerm& germ) {
  const Riemann R = riemann(germ);
  const Eigen::Matrix2d g = germ.metric_matrix();
  // <R(dx,dy)dy, dx> = g_{x e} R^e_{y x y}
  const double rxyyx = g(0, 0) * R[0][1][0][1] + g(0, 1) * R[1][1][0][1];
  return rxyyx / g.determinant();
}

// ---------------------------------------------------------------------------

TangentFrame orthonormal_frame(const Eigen::Matrix2d& g) {
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if (g.determinant() >= -1e-14 * scale * scale) throw DegeneracyError(g.determinant());
  auto sq = [&](const Eigen::Vector2d& v) { return v.dot(g * v); };
  TangentFrame f;
  std::array<Eigen::Vector2d, 2> u;
  if (std::abs(g(0, 0)) <= 1e-12 * scale && std::abs(g(1, 1)) <= 1e-12 * scale) {
    // null coordinates
    u[0] = Eigen::Vector2d(1.0, -1.0) / std::sqrt(2.0);
    u[1] = -Eigen::Vector2d(1.0, 1.0) / std::sqrt(2.0);
  } else {
    // start from the least null of dx, dy, dx +- dy
    const std::array<Eigen::Vector2d, 4> cand = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0),
                                                 Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(1.0, -1.0)};
    u[0] = cand[0];
    for (const auto& c : cand) {
      if (std::abs(sq(c)) / c.squaredNorm() > std::abs(sq(u[0])) / u[0].squaredNorm()) u[0] = c;
    }
    const Eigen::Vector2d gu = g * u[0];
    u[1] = Eigen::Vector2d(-gu.y(), gu.x());
  }
  for (auto& v : u) v /= std::sqrt(std::abs(sq(v)));
  if (sq(u[0]) < 0.0) std::swap(u[0], u[1]);
  f.e = u;
  f.eta = {sq(u[0]) > 0 ? 1.0 : -1.0, sq(u[1]) > 0 ? 1.0 : -1.0};
  return f;
}

TangentFrame boosted(const TangentFrame& frame, double theta) {
  TangentFrame b = frame;
  const double c = std::cosh(theta), s = std::sinh(theta);
  b.e[0] = c * frame.e[0] + s * frame.e[1];
  b.e[1] = s * frame.e[0] + c * frame.e[1];
  return b;
}

Eigen::VectorXcd bitension_direct(const SurfaceGerm& germ, const std::optional<TangentFrame>& frame) {
  const TangentFrame f = frame ? *frame : orthonormal_frame(germ.metric_matrix());
  const VectorJet tau = 2.0 * germ.mean_curvature();
  const Sym2<VectorJet> hess = germ.hessian(tau);
  const Eigen::VectorXcd tau0 = tau.value();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(tau0.size());
  for (int i = 0; i < 2; ++i) {
    const Eigen::Vector2d& e = f.e[i];
    Eigen::VectorXcd rough = Eigen::VectorXcd::Zero(tau0.size());
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) rough += (e[a] * e[b]) * hess[a][b].value();
    }
    const Eigen::VectorXcd X = germ.push_forward(e);
    out += f.eta[i] * (rough + space_form_curvature(germ.epsilon(), tau0, X, X, germ.index()));
  }
  return out;
}

Eigen::VectorXcd laplacian_mean_curvature(const SurfaceGerm& germ) { return germ.laplacian(germ.mean_curvature()).value(); }

Eigen::VectorXcd bitension_via_laplacian(const SurfaceGerm& germ) {
  return -2.0 * laplacian_mean_curvature(germ) + 10.0 * germ.epsilon() * germ.mean_curvature().value();
}

namespace {

struct VectorTest {
  CausalCharacter character;
  double zero_ratio;  // norm / zero threshold
  double null_ratio;  // |<v,v>| / null threshold
};

// Zero when ||v|| <= tol * scale; lightlike when |<v,v>| <= tol * ||v|| * scale.
VectorTest test_vector(const Eigen::VectorXcd& v, int s, double tol, double scale) {
  const double n = v.norm();
  const double q = metric(v, v, s);
  VectorTest t;
  t.zero_ratio = n / (tol * scale);
  t.null_ratio = n > 0 ? std::abs(q) / (tol * n * scale) : 0.0;
  if (t.zero_ratio <= 1.0) {
    t.character = CausalCharacter::zero;
  } else if (t.null_ratio <= 1.0) {
    t.character = CausalCharacter::lightlike;
  } else {
    t.character = q > 0 ? CausalCharacter::spacelike : CausalCharacter::timelike;
  }
  return t;
}

bool in_band(double ratio) { return ratio > 1.0 && ratio <= 100.0; }

}  // namespace

BitensionResult bitension(const SurfaceGerm& germ, double tol) {
  BitensionResult r;
  r.tau = 2.0 * germ.mean_curvature().value();
  r.tau2_direct = bitension_direct(germ);
  r.laplacian_H = laplacian_mean_curvature(germ);
  r.tau2_laplacian = -2.0 * r.laplacian_H + 10.0 * germ.epsilon() * germ.mean_curvature().value();
  r.route_discrepancy = (r.tau2_direct - r.tau2_laplacian).norm();
  const double m = germ.gauge();
  r.mean_curvature_character = test_vector(germ.mean_curvature().value(), germ.index(), tol, m).character;
  r.bitension_character = test_vector(r.tau2_direct, germ.index(), tol, m * m).character;
  return r;
}

LaplacianDecomposition laplacian_decomposition(const SurfaceGerm& germ) {
  LaplacianDecomposition d;
  const VectorJet& H = germ.mean_curvature();
  const Eigen::Index n = H.value().size();
  d.laplacian_H = germ.laplacian(H).value();

  const Pair<VectorJet> DH{germ.normal_connection(H, 0), germ.normal_connection(H, 1)};
  const Eigen::Matrix2d gi = germ.inverse_metric_matrix();
  auto Gam = [&](int k, int a, int b) { return germ.christoffel(k, a, b).value(); };
  auto phi = [&](int c) { return germ.tangent(c).value(); };

  d.normal_laplacian_H = Eigen::VectorXcd::Zero(n);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const Eigen::VectorXcd ddh = germ.normal_connection(DH[b], a).value();
      d.normal_laplacian_H -= gi(a, b) * (ddh - contract({Gam(0, a, b), Gam(1, a, b)}, {values_of(DH, 0), values_of(DH, 1)}));
    }
  }

  const Sym2<RealJet> AH = germ.shape_operator(H);
  const Pair<Sym2<RealJet>> ADH{germ.shape_operator(DH[0]), germ.shape_operator(DH[1])};
  d.shape_term = Eigen::VectorXcd::Zero(n);
  d.weingarten_term = Eigen::VectorXcd::Zero(n);
  d.derivative_term = Eigen::VectorXcd::Zero(n);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        d.shape_term += gi(a, b) * AH[c][b].value() * germ.second_fundamental_form(a, c).value();
        d.weingarten_term += gi(a, b) * ADH[a][c][b].value() * phi(c);
        double nab = AH[c][b].partial(a == 0 ? 1 : 0, a == 1 ? 1 : 0);
        for (int e = 0; e < 2; ++e) nab += Gam(c, a, e) * AH[e][b].value() - Gam(e, a, b) * AH[c][e].value();
        d.derivative_term += gi(a, b) * nab * phi(c);
      }
    }
  }
  const VectorJet lap = germ.laplacian(H);
  d.normal_part = germ.normal_part(lap).value();
  d.tangential_part = germ.tangential_part(lap).value();
  return d;
}

// ---------------------------------------------------------------------------

ClassificationReport classify_point(const SurfaceGerm& germ, double tol) {
  ClassificationReport r;
  const PointGeometry pg = point_geometry(germ);
  const int s = germ.index();
  r.point = germ.point();
  r.gauge = germ.gauge();
  r.bitension = bitension(germ, tol);
  r.lagrangian_residual = pg.lagrangian_residual;
  r.horizontality_residual = pg.horizontality_residual;
  r.gauss_curvature = gauss_curvature(germ);
  r.gauss_residual = std::abs(r.gauss_curvature - germ.epsilon());

  const Eigen::VectorXcd H = germ.mean_curvature().value();
  const Eigen::VectorXcd& tau2 = r.bitension.tau2_direct;
  r.mean_curvature_norm = H.norm();
  r.mean_curvature_square = metric(H, H, s);
  r.bitension_norm = tau2.norm();
  r.bitension_square = metric(tau2, tau2, s);

  const double m = r.gauge;
  const double ms = germ.metric_scale();
  const VectorTest th = test_vector(H, s, tol, m);
  const VectorTest tt = test_vector(tau2, s, tol, m * m);
  r.mean_curvature_character = th.character;
  r.bitension_character = tt.character;

  const double lag_ratio = r.lagrangian_residual / (tol * ms);
  const double hor_ratio = r.horizontality_residual / (tol * ms);
  r.flags.lagrangian = lag_ratio <= 1.0;
  r.flags.horizontal = hor_ratio <= 1.0;
  r.flags.minimal = th.character == CausalCharacter::zero;
  r.flags.marginally_trapped = th.character == CausalCharacter::lightlike;
  r.flags.biharmonic = tt.character == CausalCharacter::zero;
  r.flags.quasi_biharmonic = tt.character == CausalCharacter::lightlike;

  auto note = [&](const char* name, double ratio) {
    if (in_band(ratio)) r.ambiguous.emplace_back(name);
  };
  note("lagrangian", lag_ratio);
  note("horizontal", hor_ratio);
  note("minimal", th.zero_ratio);
  if (!r.flags.minimal) note("marginally_trapped", th.null_ratio);
  note("biharmonic", tt.zero_ratio);
  if (!r.flags.biharmonic) note("quasi_biharmonic", tt.null_ratio);
  r.indeterminate = !r.ambiguous.empty();
  return r;
}

ClassificationReport classify_point(const ImmersionPatch& patch, const Eigen::Vector2d& p, double tol,
                                    const BackendOptions& opts) {
  return classify_point(SurfaceGerm::at(patch, p, opts), tol);
}

// ---------------------------------------------------------------------------

StructuralResiduals structural_residuals(const SurfaceGerm& germ, std::uint64_t seed, int samples) {
  StructuralResiduals res;
  const int s = germ.index();
  const double eps = germ.epsilon();
  const Riemann R = riemann(germ);
  const Eigen::Matrix2d g = germ.metric_matrix();
  const Eigen::Matrix2d gi = germ.inverse_metric_matrix();

  // A_{J X} as a matrix acting on coordinate components.
  auto shape_matrix = [&](const Eigen::Vector2d& X) {
    const Eigen::VectorXcd JX = cd(0.0, 1.0) * germ.push_forward(X);
    Eigen::Matrix2d lowered;
    for (int b = 0; b < 2; ++b) {
      for (int d = 0; d < 2; ++d) lowered(b, d) = metric(germ.second_fundamental_form(b, d).value(), JX, s);
    }
    return Eigen::Matrix2d(gi * lowered.transpose());
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < samples; ++k) {
    std::array<Eigen::Vector2d, 4> v;
    for (auto& x : v) x = Eigen::Vector2d(unit(rng), unit(rng));
    const auto& [X, Y, Z, W] = v;
    double lhs = 0.0;
    for (int d = 0; d < 2; ++d) {
      for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) lhs += R[d][c][a][b] * X[a] * Y[b] * Z[c] * (g.row(d) * W).value();
        }
      }
    }
    auto ip = [&](const Eigen::Vector2d& p, const Eigen::Vector2d& q) { return p.dot(g * q); };
    const Eigen::Matrix2d AZ = shape_matrix(Z), AW = shape_matrix(W);
    const Eigen::Matrix2d comm = AZ * AW - AW * AZ;
    const double rhs = eps * (ip(X, W) * ip(Y, Z) - ip(X, Z) * ip(Y, W)) + ip(comm * X, Y);
    res.gauss = std::max(res.gauss, std::abs(lhs - rhs));
  }

  // (nabla-bar_a h)_bc = D_a h_bc - G^k_ab h_kc - G^k_ac h_bk
  auto nabla_h = [&](int a, int b, int c) {
    Eigen::VectorXcd v = germ.normal_connection(germ.second_fundamental_form(b, c), a).value();
    for (int k = 0; k < 2; ++k) {
      v -= germ.christoffel(k, a, b).value() * germ.second_fundamental_form(k, c).value();
      v -= germ.christoffel(k, a, c).value() * germ.second_fundamental_form(b, k).value();
    }
    return v;
  };
  for (int c = 0; c < 2; ++c) res.codazzi = std::max(res.codazzi, (nabla_h(0, 1, c) - nabla_h(1, 0, c)).norm());
  return res;
}

Eigen::VectorXcd connection_curvature(const AmbientSpec& ambient, const Eigen::VectorXcd& base,
                                      const Eigen::VectorXcd& X, const Eigen::VectorXcd& Y,
                                      const Eigen::VectorXcd& Z) {
  const int s = ambient.lift_index;
  const auto zero = Eigen::VectorXcd::Zero(base.size());
  VectorJet w(2, 2, zero);
  w(0, 0) = base;
  w(1, 0) = X;
  w(0, 1) = Y;
  VectorJet sigma = w;
  if (ambient.lifted()) sigma = w * inv(sqrt(ambient.epsilon * inner(w, w, s)), "lift normalization");
  const VectorJet field = horizontal_projection(ambient, sigma, VectorJet::constant(Z, 2, 2));
  const VectorJet dv = covariant_derivative(ambient, sigma, field, 1);
  const VectorJet du = covariant_derivative(ambient, sigma, field, 0);
  return covariant_derivative(ambient, sigma, dv, 0).value() - covariant_derivative(ambient, sigma, du, 1).value();
}

}  // namespace qbh
