#pragma once

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <string>

#include "qbh/ambient.hpp"
#include "qbh/jet.hpp"

namespace qbh {

/// Bivariate map given on jets: (x, y) -> phi (or the lift L) as a C^n-valued jet.
using JetMap = std::function<VectorJet(const ComplexJet& x, const ComplexJet& y)>;

struct Window {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  bool contains(const Eigen::Vector2d& p, double slack = 1e-12) const {
    return p.x() >= x0 - slack && p.x() <= x1 + slack && p.y() >= y0 - slack && p.y() <= y1 + slack;
  }
  /// Point (i, j) of an nx-by-ny grid spanning the window, corners included.
  Eigen::Vector2d grid_point(int i, int j, int nx, int ny) const {
    const double tx = nx > 1 ? double(i) / (nx - 1) : 0.5;
    const double ty = ny > 1 ? double(j) / (ny - 1) : 0.5;
    return {x0 + tx * (x1 - x0), y0 + ty * (y1 - y0)};
  }
};

/// A surface immersion into C^2_1, or a horizontal lift into C^3_s representing a surface in
/// CP^2_1(4) / CH^2_1(-4).
struct ImmersionPatch {
  std::string name;
  AmbientSpec ambient;
  JetMap map;
  Window window;
  /// Smallest absolute value of the singular factors of the formula at (x, y); +inf if none.
  std::function<double(double, double)> singular_margin;

  static constexpr double kSingularThreshold = 1e-9;

  double margin(const Eigen::Vector2d& p) const {
    return singular_margin ? singular_margin(p.x(), p.y()) : std::numeric_limits<double>::infinity();
  }
  bool is_singular(const Eigen::Vector2d& p) const { return margin(p) <= kSingularThreshold; }

  /// Plain evaluation of the map at a point.
  Eigen::VectorXcd evaluate(double x, double y) const {
    return map(ComplexJet::constant(cd(x), 2, 0), ComplexJet::constant(cd(y), 2, 0)).value();
  }
};

enum class Backend { jet, fd };

struct BackendOptions {
  Backend kind = Backend::jet;
  double fd_step = 2e-2;
};

/// Order-4 jet of the patch map at p using the selected backend. Raises ExcludedPointError off the
/// window or on the singular locus.
VectorJet patch_germ(const ImmersionPatch& patch, const Eigen::Vector2d& p, const BackendOptions& opts = {},
                     bool check_window = true);

}  // namespace qbh
