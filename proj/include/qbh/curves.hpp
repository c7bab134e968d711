#pragma once

// Curves in the light cone of C^n_s: Legendre predicates and invariants, closed-form null Legendre
// curves, and RK4 integration of third-order structure equations for Legendre curves.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "qbh/jet.hpp"
#include "qbh/pseudo_hermitian.hpp"

namespace qbh {

/// Returns z, z', ..., z^(k) at t.
using CurveDerivatives = std::function<std::vector<Eigen::VectorXcd>(double t, int k)>;

struct CurveSpec {
  std::string name;
  CurveDerivatives derivatives;
  Signature ambient{2, 1};
  /// Declared <z', z'>: +1, -1, or 0 for null curves.
  double speed = 0.0;
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  /// Highest derivative the evaluator supplies.
  int max_derivative = 5;

  std::vector<Eigen::VectorXcd> at(double t, int k) const;
  /// Univariate jet of z^(shift) at t of the given order.
  VectorJet jet(double t, int order, int shift = 0) const;
};

/// Bivariate jet of z^(shift)(u) where u is a jet (a coordinate of the surface).
VectorJet compose_curve(const CurveSpec& curve, const ComplexJet& u, int shift = 0);

struct LegendreReport {
  double t = 0.0;
  double residual_cone = 0.0;
  double residual_speed = 0.0;
  double residual_legendre = 0.0;
  double residual_special = 0.0;
  double kappa_sq = 0.0;
  double tau_hat = 0.0;
  double pairing = 0.0;
};

LegendreReport legendre_report(const CurveSpec& curve, double t);

/// z(t) = (e^{ikt}, e^{-ikt}) in C^2_1 with k = 1/(2 mu).
CurveSpec make_flat_null_legendre(double mu);

using ScalarFunction = std::function<RealJet(const RealJet&)>;

/// Polynomial c0 + c1 t + ... as a ScalarFunction.
ScalarFunction polynomial(std::vector<double> coeffs);

/// z''' = i p z'' + (q + i p') z' + (q'/2 + i r) z with real p, q, r. Along solutions the Legendre
/// constraints are preserved, kappa^2 = p^2 - q and tau-hat = -p^3 + 2pq + r.
struct LegendreStructure {
  ScalarFunction p, q, r;

  /// The structure equation of the corrected nonflat family:
  /// p = 2 sqrt2 f, q = 2 f^2, r = sqrt2 (f'' + 2 delta).
  static LegendreStructure from_family(ScalarFunction f, ScalarFunction delta);

  /// Complex coefficient jets (P, Q, R) of z''' = P z'' + Q z' + R z at t.
  std::array<ComplexJet, 3> coefficients(double t, int order = 2) const;
  double kappa_sq(double t) const;
  double tau_hat(double t) const;
};

struct CurveState {
  Eigen::VectorXcd z, dz, ddz;
};

/// Named algebraic constraints on (z, z', z'') at one point for a curve of speed sigma with
/// structure values p0 = p(t0), q0 = q(t0).
struct SeedConstraint {
  std::string name;
  double residual;
};
std::vector<SeedConstraint> seed_constraints(const CurveState& s, int index, double sigma, double p0, double q0);

/// Closed-form seed in C^3_s: z0 null, z0' a unit axis of sign sigma, z0'' fixed by the constraints.
/// Raises ParameterError when no axis of that sign is free (no Legendre curve of that causal type).
CurveState seed_initial_data(Signature ambient, double sigma, double p0, double q0);
/// Seed for the corrected nonflat family in C^3_1 with unit spacelike speed.
CurveState seed_corrected_initial_data(double f0);

struct DriftReport {
  double cone = 0.0;
  double speed = 0.0;
  double legendre = 0.0;
  double bound = std::numeric_limits<double>::infinity();
  bool flagged = false;

  double max() const { return std::max({cone, speed, legendre}); }
};

/// RK4 solution on a uniform grid; queries between nodes take one RK4 step from the nearest node
/// and recover higher derivatives from the equation.
class SampledCurve {
 public:
  SampledCurve(LegendreStructure eq, Signature ambient, double sigma, double t0, double h,
               std::vector<CurveState> nodes);

  const std::vector<CurveState>& nodes() const { return nodes_; }
  double t0() const { return t0_; }
  double t1() const { return t0_ + h_ * double(nodes_.size() - 1); }
  double step() const { return h_; }
  double node_time(std::size_t i) const { return t0_ + h_ * double(i); }
  Signature ambient() const { return ambient_; }
  double sigma() const { return sigma_; }
  const LegendreStructure& structure() const { return eq_; }

  CurveState state(double t) const;
  /// z, ..., z^(k) at t, k <= 5.
  std::vector<Eigen::VectorXcd> derivatives(double t, int k) const;
  CurveSpec spec(const std::string& name) const;

  DriftReport drift;

  /// Columns t, then Re/Im of each coordinate of z, z', z''.
  void write_csv(std::ostream& os) const;

 private:
  LegendreStructure eq_;
  Signature ambient_;
  double sigma_;
  double t0_, h_;
  std::vector<CurveState> nodes_;
};

/// One classical RK4 step of the first-order system (z, z', z'').
CurveState rk4_step(const LegendreStructure& eq, double t, const CurveState& s, double h);

/// Integrates from init at range[0] to range[1] (inclusive) with step h. Raises ConstraintError naming
/// the first violated seed constraint (tolerance 1e-10). Drift above drift_bound is flagged.
SampledCurve integrate_legendre_curve(const LegendreStructure& eq, Signature ambient, double sigma,
                                      const CurveState& init, std::array<double, 2> range, double h,
                                      double drift_bound = std::numeric_limits<double>::infinity());

/// The corrected nonflat family's curve equation in C^3_1 with unit spacelike speed.
SampledCurve integrate_corrected_curve(ScalarFunction f, ScalarFunction delta, const CurveState& init,
                                      std::array<double, 2> range, double h,
                                      double drift_bound = std::numeric_limits<double>::infinity());

}  // namespace qbh
