#pragma once

// Grid verification, finite-difference convergence and curve diagnostics behind the qbh tool.
// Reports serialize to the "qbh-report/1" JSON schema.

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbh/families.hpp"
#include "qbh/geometry.hpp"

namespace qbh {

inline constexpr const char* kReportSchema = "qbh-report/1";

/// Every check the verifier knows, in registry order (also the CSV column order).
const std::vector<std::string>& check_registry();

struct VerifyOptions {
  std::string family;
  FamilyParams params;
  std::optional<Window> window;
  int nx = 21, ny = 21;
  BackendOptions backend;
  /// Defaults to 1e-8 for jets and 1e-4 for finite differences.
  std::optional<double> tol;
  std::map<std::string, double> check_tol;
  /// 0 picks hardware concurrency, capped by QBH_THREADS.
  int threads = 0;
};

struct CheckRecord {
  std::string name;
  double tolerance = 0.0;
  double max_abs_residual = 0.0;
  Eigen::Vector2d worst_point = Eigen::Vector2d::Zero();
  int evaluated = 0;
  /// Counts toward the exit status.
  bool asserted = true;
  bool pass = true;
  /// Lower-bound checks carry the bound and the smallest observed norm.
  std::optional<double> bound;
  std::optional<double> min_norm;
};

struct PointRecord {
  Eigen::Vector2d point;
  std::string error;
  ClassificationFlags flags;
  bool indeterminate = false;
  std::vector<std::string> ambiguous;
  bool framed = false;
  double gauss_curvature = 0.0;
  double mean_curvature_square = 0.0;
  double bitension_norm = 0.0;
  double bitension_square = 0.0;
  /// Indexed like check_registry(); NaN where not applicable.
  std::vector<double> residuals;
};

struct VerificationReport {
  std::string family;
  FamilyParams params;
  AmbientKind ambient = AmbientKind::FlatC21;
  Window window;
  int nx = 0, ny = 0;
  BackendOptions backend;
  double tol = 0.0;
  ExpectedProfile expected;
  std::vector<CheckRecord> checks;
  std::vector<PointRecord> points;
  std::map<std::string, int> flag_counts;
  int error_points = 0;
  int indeterminate_points = 0;
  /// Per expected flag, the number of points agreeing.
  std::map<std::string, int> expected_agreement;
  bool profile_match = true;
  double elapsed_ms = 0.0;
  int threads = 1;

  bool passed() const;
  const CheckRecord* check(const std::string& name) const;
};

/// Raises FamilyError for unknown families or inadmissible windows.
VerificationReport run_verify(const VerifyOptions& opts);

nlohmann::ordered_json to_json(const VerificationReport& r);
/// x, y, then one column per reported check in registry order.
void write_csv(const VerificationReport& r, std::ostream& os);

struct ConvergenceOptions {
  std::string family;
  FamilyParams params;
  std::optional<Window> window;
  double h = 0.05;
  /// Defaults to a 3x3 grid in the window interior.
  std::vector<Eigen::Vector2d> probes;
  int threads = 0;
};

struct ConvergenceProbe {
  Eigen::Vector2d point;
  double margin = 0.0;
  bool ill_conditioned = false;
  std::string error;
  /// Largest coordinate magnitude of the map at the probe.
  double value_scale = 0.0;
  /// errors[k][level-1] = max |fd - jet| over partials of total degree level at step h / 2^k.
  std::array<std::array<double, 4>, 3> errors{};
};

struct ConvergenceReport {
  std::string family;
  FamilyParams params;
  double h = 0.0;
  std::vector<ConvergenceProbe> probes;
  /// Least-squares slope of log error against log step per derivative level over
  /// well-conditioned probes; empty when every error is at rounding level.
  std::array<std::optional<double>, 4> observed_order;
  /// Max error per level and step over well-conditioned probes.
  std::array<std::array<double, 4>, 3> max_error{};
  /// Error expected from rounding alone per step and level; smaller errors are left out of the fit.
  std::array<std::array<double, 4>, 3> rounding_floor{};
  double elapsed_ms = 0.0;
};

ConvergenceReport run_convergence(const ConvergenceOptions& opts);
/// Same, for an arbitrary patch (the family fields are only labels).
ConvergenceReport run_convergence(const ImmersionPatch& patch, const ConvergenceOptions& opts);
nlohmann::ordered_json to_json(const ConvergenceReport& r);

struct CurveOptions {
  enum class Mode { flat_null, corrected } mode = Mode::flat_null;
  FamilyParams params;
  double t0 = 0.0, t1 = 1.0;
  double step = 1e-3;
  int samples = 50;
  double drift_bound = 1e-8;
};

struct CurveReport {
  std::string mode;
  FamilyParams params;
  double t0 = 0.0, t1 = 0.0, step = 0.0;
  std::vector<LegendreReport> samples;
  /// Invariants predicted by the structure equation at the samples (integrated curves only).
  std::vector<double> kappa_sq_expected, tau_hat_expected;
  std::optional<DriftReport> drift;
  /// Largest of the cone, speed and Legendre residuals; for flat null curves the Legendre residual is
  /// replaced by |pairing - 1/mu|.
  double max_residual = 0.0;
  double elapsed_ms = 0.0;
};

/// Raises ParameterError / ConstraintError when the curve cannot be seeded.
CurveReport run_curve(const CurveOptions& opts);
nlohmann::ordered_json to_json(const CurveReport& r);
void write_csv(const CurveReport& r, std::ostream& os);

/// Worker count: requested (0 = hardware), capped by QBH_THREADS when set.
int worker_count(int requested);

}  // namespace qbh
