#pragma once

// Complex pseudo-Euclidean space C^n_s: n complex coordinates, the first s of
// which are negative definite. The real metric is
//   <u, v> = Re( -sum_{j<s} u_j conj(v_j) + sum_{j>=s} u_j conj(v_j) ).

#include <Eigen/Core>

#include <complex>
#include <string_view>

#include "qbh/errors.hpp"

namespace qbh {

using cd = std::complex<double>;

struct Signature {
  int n = 2;
  int s = 1;

  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Hermitian form h(u, v) = -sum_{j<s} u_j conj(v_j) + sum_{j>=s} u_j conj(v_j).
/// Its real part is the metric, its imaginary part is <u, i v>.
template <typename DerivedU, typename DerivedV>
auto hermitian(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v, int s) {
  using Scalar = typename DerivedU::Scalar;
  Scalar acc(0);
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const Scalar term = u(j) * std::conj(v(j));
    acc += (j < s) ? -term : term;
  }
  return acc;
}

template <typename DerivedU, typename DerivedV>
auto metric(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v, int s) {
  return std::real(hermitian(u, v, s));
}

/// A point or vector of C^n_s together with its signature.
template <typename Scalar>
class BasicComplexVec {
 public:
  using Complex = std::complex<Scalar>;
  using Coords = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  BasicComplexVec(Coords coords, int index) : coords_(std::move(coords)), index_(index) {
    if (coords_.size() < 1 || index_ < 0 || index_ > coords_.size()) {
      throw DimensionError("C^n_s requires n >= 1 and 0 <= s <= n");
    }
  }

  const Coords& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  int index() const { return index_; }
  Signature signature() const { return {dim(), index_}; }

  /// Complex structure J: multiplication of every coordinate by i.
  BasicComplexVec J() const { return {coords_ * Complex(0, 1), index_}; }

  BasicComplexVec& operator+=(const BasicComplexVec& o) {
    require_same(o);
    coords_ += o.coords_;
    return *this;
  }
  BasicComplexVec& operator-=(const BasicComplexVec& o) {
    require_same(o);
    coords_ -= o.coords_;
    return *this;
  }
  friend BasicComplexVec operator+(BasicComplexVec a, const BasicComplexVec& b) { return a += b; }
  friend BasicComplexVec operator-(BasicComplexVec a, const BasicComplexVec& b) { return a -= b; }
  friend BasicComplexVec operator*(const Complex& c, BasicComplexVec a) {
    a.coords_ *= c;
    return a;
  }

  void require_same(const BasicComplexVec& o) const {
    if (signature() != o.signature()) throw DimensionError("operands live in different C^n_s");
  }

 private:
  Coords coords_;
  int index_;
};

using ComplexVec = BasicComplexVec<double>;

template <typename Scalar>
Scalar inner(const BasicComplexVec<Scalar>& u, const BasicComplexVec<Scalar>& v) {
  u.require_same(v);
  return metric(u.coords(), v.coords(), u.index());
}

enum class CausalCharacter { spacelike, timelike, lightlike, zero };

inline std::string_view to_string(CausalCharacter c) {
  switch (c) {
    case CausalCharacter::spacelike: return "spacelike";
    case CausalCharacter::timelike: return "timelike";
    case CausalCharacter::lightlike: return "lightlike";
    case CausalCharacter::zero: return "zero";
  }
  return "?";
}

template <typename Derived>
CausalCharacter causal_character(const Eigen::MatrixBase<Derived>& v, int s, double tol) {
  if (v.cwiseAbs().maxCoeff() <= tol) return CausalCharacter::zero;
  const double q = metric(v, v, s);
  if (std::abs(q) <= tol) return CausalCharacter::lightlike;
  return q > 0 ? CausalCharacter::spacelike : CausalCharacter::timelike;
}

inline CausalCharacter causal_character(const ComplexVec& v, double tol) {
  return causal_character(v.coords(), v.index(), tol);
}

}  // namespace qbh
