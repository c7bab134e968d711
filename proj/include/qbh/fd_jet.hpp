#pragma once

#include <Eigen/Core>

#include <functional>

#include "qbh/jet.hpp"

namespace qbh {

using PointMap = std::function<Eigen::VectorXcd(double x, double y)>;
using CurveMap = std::function<Eigen::VectorXcd(double t)>;

struct FdJet {
  VectorJet jet;
  /// Per-coefficient |R(h/2) - R(h)| where R is the Richardson-extrapolated estimate.
  RealJet coefficient_error;
  /// Largest entry of coefficient_error.
  double error_estimate = 0.0;
};

/// Taylor jet of a black-box map by second-order central differences at steps h, h/2, h/4,
/// Richardson-extrapolated; the error estimate compares the extrapolants at h and h/2.
FdJet fd_jet(const PointMap& map, double x, double y, int order, double h);
FdJet fd_jet(const CurveMap& map, double t, int order, double h);

}  // namespace qbh
