#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qbh {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different C^n_s (mismatched n or s).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A reciprocal (or other pole-carrying primitive) was expanded at its pole.
class SingularityError : public Error {
 public:
  explicit SingularityError(std::string factor)
      : Error("singular factor at base point: " + factor), factor_(std::move(factor)) {}
  const std::string& factor() const { return factor_; }

 private:
  std::string factor_;
};

/// A finite-difference stencil produced a non-finite sample.
class StencilError : public Error {
 public:
  using Error::Error;
};

/// A jet does not carry enough derivative orders for the requested operation.
class OrderError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A named algebraic constraint failed; carries the achieved residual.
class ConstraintError : public Error {
 public:
  ConstraintError(std::string constraint, double residual)
      : Error("constraint violated: " + constraint + " (residual " + std::to_string(residual) + ")"),
        constraint_(std::move(constraint)),
        residual_(residual) {}
  const std::string& constraint() const { return constraint_; }
  double residual() const { return residual_; }

 private:
  std::string constraint_;
  double residual_;
};

/// Point is outside the window or on the singular locus of the patch.
class ExcludedPointError : public Error {
 public:
  using Error::Error;
};

/// Induced metric is (numerically) degenerate.
class DegeneracyError : public Error {
 public:
  explicit DegeneracyError(double det_g)
      : Error("degenerate induced metric, det g = " + std::to_string(det_g)), det_g_(det_g) {}
  double det_g() const { return det_g_; }

 private:
  double det_g_;
};

/// Mean curvature vector is zero or not lightlike; carries a distance-to-degeneracy diagnostic.
class NotMarginallyTrappedError : public Error {
 public:
  NotMarginallyTrappedError(const std::string& what, double diagnostic)
      : Error(what), diagnostic_(diagnostic) {}
  double diagnostic() const { return diagnostic_; }

 private:
  double diagnostic_;
};

class LagrangianViolationError : public Error {
 public:
  explicit LagrangianViolationError(double residual)
      : Error("J H is not tangent (Lagrangian violation), residual " + std::to_string(residual)),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// A family could not be built (bad name, bad parameters, failed probe, or no instance exists).
class FamilyError : public Error {
 public:
  using Error::Error;
};

}  // namespace qbh
