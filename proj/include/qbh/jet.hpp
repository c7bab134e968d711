#pragma once

// Truncated Taylor jets in one or two real variables.
//
// A Jet<T> of order K stores the Taylor coefficients c(i, j) = d^{i+j} f / dx^i dy^j / (i! j!)
// at a base point for all i + j <= K, in a dense triangular array. The coefficient type T is
// double, std::complex<double> or Eigen::VectorXcd (a C^n-valued map). Arithmetic composes
// exactly in the truncated polynomial ring; the order of a result is the smallest order of its
// operands, and differentiation lowers the order by one.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qbh/errors.hpp"

namespace qbh {

using cd = std::complex<double>;

template <typename T>
class Jet;

namespace jet_detail {

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename S>
inline constexpr bool is_scalar_v = std::is_arithmetic_v<S> || is_complex<S>::value;

template <typename T>
struct CoeffTraits {
  static T zero_like(const T&) { return T(0); }
  static double magnitude(const T& v) { return std::abs(v); }
};

template <>
struct CoeffTraits<Eigen::VectorXcd> {
  static Eigen::VectorXcd zero_like(const Eigen::VectorXcd& v) {
    return Eigen::VectorXcd::Zero(v.size());
  }
  static double magnitude(const Eigen::VectorXcd& v) { return v.cwiseAbs().maxCoeff(); }
};

template <typename A, typename B>
struct ProductType {
  using type = decltype(std::declval<A>() * std::declval<B>());
};
template <>
struct ProductType<double, Eigen::VectorXcd> {
  using type = Eigen::VectorXcd;
};
template <>
struct ProductType<cd, Eigen::VectorXcd> {
  using type = Eigen::VectorXcd;
};
template <>
struct ProductType<Eigen::VectorXcd, double> {
  using type = Eigen::VectorXcd;
};
template <>
struct ProductType<Eigen::VectorXcd, cd> {
  using type = Eigen::VectorXcd;
};

template <typename R, typename A, typename B>
R zero_product(const A& a, const B& b) {
  if constexpr (std::is_same_v<R, Eigen::VectorXcd>) {
    R z = a * b;
    z.setZero();
    return z;
  } else {
    (void)a;
    (void)b;
    return R(0);
  }
}

inline constexpr double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace jet_detail

template <typename T>
class Jet {
 public:
  static constexpr int kMaxOrder = 4;
  static constexpr int kMaxCoeffs = (kMaxOrder + 1) * (kMaxOrder + 2) / 2;

  Jet() = default;

  Jet(int order, int nvars, const T& zero) : order_(order), nvars_(nvars) {
    if (order < 0 || order > kMaxOrder) throw OrderError("jet order must lie in [0, 4]");
    if (nvars != 1 && nvars != 2) throw OrderError("jets have one or two variables");
    c_.fill(zero);
  }

  /// A constant carries every order (it is exact to all orders).
  static Jet constant(const T& value, int nvars = 1, int order = kMaxOrder) {
    Jet j(order, nvars, jet_detail::CoeffTraits<T>::zero_like(value));
    j.c_[0] = value;
    return j;
  }

  /// The coordinate function `which` (0 = x, 1 = y) expanded at `base`.
  static Jet variable(int which, double base, int order, int nvars = 2) {
    static_assert(jet_detail::is_scalar_v<T>, "variables are scalar jets");
    if (which < 0 || which >= nvars) throw OrderError("variable index out of range");
    Jet j(order, nvars, T(0));
    j.c_[0] = T(base);
    if (order >= 1) j(which == 0 ? 1 : 0, which == 0 ? 0 : 1) = T(1);
    return j;
  }

  static constexpr int index(int i, int j) { return (i + j) * (i + j + 1) / 2 + j; }

  int order() const { return order_; }
  int nvars() const { return nvars_; }
  int size() const { return nvars_ == 2 ? (order_ + 1) * (order_ + 2) / 2 : order_ + 1; }

  T& operator()(int i, int j) { return c_[index(i, j)]; }
  const T& operator()(int i, int j) const { return c_[index(i, j)]; }

  const T& value() const { return c_[0]; }
  T& value() { return c_[0]; }

  /// Mixed partial derivative d^{i+j} f / dx^i dy^j at the base point.
  T partial(int i, int j) const {
    require(i + j);
    return c_[index(i, j)] * (jet_detail::factorial(i) * jet_detail::factorial(j));
  }

  /// Jet of the partial derivative with respect to variable `var`; order drops by one.
  Jet derivative(int var) const {
    if (order_ < 1) throw OrderError("cannot differentiate an order-0 jet");
    if (var >= nvars_) return Jet(order_ - 1, nvars_, jet_detail::CoeffTraits<T>::zero_like(value()));
    Jet d(order_ - 1, nvars_, jet_detail::CoeffTraits<T>::zero_like(value()));
    for (int deg = 0; deg <= order_ - 1; ++deg) {
      for (int j = 0; j <= (nvars_ == 2 ? deg : 0); ++j) {
        const int i = deg - j;
        if (var == 0) {
          d(i, j) = (*this)(i + 1, j) * double(i + 1);
        } else {
          d(i, j) = (*this)(i, j + 1) * double(j + 1);
        }
      }
    }
    return d;
  }

  Jet truncated(int order) const {
    Jet t = *this;
    t.order_ = std::min(order, order_);
    for (int deg = t.order_ + 1; deg <= kMaxOrder; ++deg) {
      for (int j = 0; j <= deg; ++j) t(deg - j, j) = jet_detail::CoeffTraits<T>::zero_like(value());
    }
    return t;
  }

  /// Coefficient-wise map; the callable receives each stored coefficient.
  template <typename F>
  auto map(F&& f) const {
    using R = std::decay_t<decltype(f(std::declval<const T&>()))>;
    Jet<R> r(order_, nvars_, jet_detail::CoeffTraits<R>::zero_like(f(value())));
    for (int deg = 0; deg <= order_; ++deg) {
      for (int j = 0; j <= (nvars_ == 2 ? deg : 0); ++j) r(deg - j, j) = f((*this)(deg - j, j));
    }
    return r;
  }

  /// Largest coefficient magnitude, used as a scale for tolerances.
  double magnitude() const {
    double m = 0.0;
    for (int deg = 0; deg <= order_; ++deg) {
      for (int j = 0; j <= (nvars_ == 2 ? deg : 0); ++j) {
        m = std::max(m, jet_detail::CoeffTraits<T>::magnitude((*this)(deg - j, j)));
      }
    }
    return m;
  }

  void require(int order) const {
    if (order > order_) {
      throw OrderError("jet of order " + std::to_string(order_) + " cannot supply order " +
                       std::to_string(order));
    }
  }

  Jet& operator+=(const Jet& o) {
    combine(o, [](T& a, const T& b) { a += b; });
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    combine(o, [](T& a, const T& b) { a -= b; });
    return *this;
  }

  template <typename S, typename = std::enable_if_t<jet_detail::is_scalar_v<S>>>
  Jet& operator*=(const S& s) {
    for (auto& c : c_) c *= s;
    return *this;
  }

 private:
  template <typename Op>
  void combine(const Jet& o, Op op) {
    const int order = std::min(order_, o.order_);
    const int nv = std::max(nvars_, o.nvars_);
    if (order < order_ || nv != nvars_) *this = truncated(order).with_nvars(nv);
    for (int deg = 0; deg <= order; ++deg) {
      for (int j = 0; j <= (nv == 2 ? deg : 0); ++j) op((*this)(deg - j, j), o(deg - j, j));
    }
  }

  Jet with_nvars(int nv) const {
    Jet t = *this;
    t.nvars_ = nv;
    return t;
  }

  int order_ = 0;
  int nvars_ = 1;
  std::array<T, kMaxCoeffs> c_{};
};

using RealJet = Jet<double>;
using ComplexJet = Jet<cd>;
using VectorJet = Jet<Eigen::VectorXcd>;

// ---------------------------------------------------------------------------
// Arithmetic

template <typename T>
Jet<T> operator+(Jet<T> a, const Jet<T>& b) {
  return a += b;
}
template <typename T>
Jet<T> operator-(Jet<T> a, const Jet<T>& b) {
  return a -= b;
}
template <typename T>
Jet<T> operator-(Jet<T> a) {
  return a *= -1.0;
}

template <typename A, typename B>
auto operator*(const Jet<A>& a, const Jet<B>& b) {
  using R = typename jet_detail::ProductType<A, B>::type;
  const int order = std::min(a.order(), b.order());
  const int nv = std::max(a.nvars(), b.nvars());
  Jet<R> r(order, nv, jet_detail::zero_product<R>(a.value(), b.value()));
  for (int deg = 0; deg <= order; ++deg) {
    for (int j = 0; j <= (nv == 2 ? deg : 0); ++j) {
      const int i = deg - j;
      R& acc = r(i, j);
      for (int p = 0; p <= i; ++p) {
        for (int q = 0; q <= j; ++q) {
          if ((q > 0 && a.nvars() == 1) || (j - q > 0 && b.nvars() == 1)) continue;
          acc += a(p, q) * b(i - p, j - q);
        }
      }
    }
  }
  return r;
}

template <typename T, typename S, typename = std::enable_if_t<jet_detail::is_scalar_v<S>>>
Jet<T> operator*(const S& s, Jet<T> a) {
  return a *= s;
}
template <typename T, typename S, typename = std::enable_if_t<jet_detail::is_scalar_v<S>>>
Jet<T> operator*(Jet<T> a, const S& s) {
  return a *= s;
}
template <typename T, typename S, typename = std::enable_if_t<jet_detail::is_scalar_v<S>>>
Jet<T> operator/(Jet<T> a, const S& s) {
  return a *= (1.0 / s);
}
template <typename T, typename S, typename = std::enable_if_t<jet_detail::is_scalar_v<S>>>
Jet<T> operator+(Jet<T> a, const S& s) {
  a.value() += T(s);
  return a;
}
template <typename T, typename S, typename = std::enable_if_t<jet_detail::is_scalar_v<S>>>
Jet<T> operator+(const S& s, Jet<T> a) {
  a.value() += T(s);
  return a;
}
template <typename T, typename S, typename = std::enable_if_t<jet_detail::is_scalar_v<S>>>
Jet<T> operator-(Jet<T> a, const S& s) {
  a.value() -= T(s);
  return a;
}
template <typename T, typename S, typename = std::enable_if_t<jet_detail::is_scalar_v<S>>>
Jet<T> operator-(const S& s, Jet<T> a) {
  a *= -1.0;
  a.value() += T(s);
  return a;
}

// ---------------------------------------------------------------------------
// Composition with univariate Taylor series and elementary functions

/// Evaluates sum_k taylor[k] (a - a0)^k, the composition of a univariate function whose Taylor
/// coefficients at a0 = a.value() are `taylor`, with the jet `a`.
template <typename T, typename C>
Jet<T> compose(const Jet<T>& a, const C& taylor) {
  Jet<T> delta = a;
  delta.value() = T(0);
  const int order = a.order();
  Jet<T> r = Jet<T>::constant(T(taylor[order]), a.nvars(), order);
  for (int k = order - 1; k >= 0; --k) {
    r = r * delta;
    r.value() += T(taylor[k]);
  }
  return r;
}

namespace jet_detail {

template <typename T>
using Series = std::array<T, Jet<T>::kMaxOrder + 1>;

template <typename T>
Series<T> exp_series(T a0) {
  Series<T> s;
  const T e = std::exp(a0);
  for (int k = 0; k < int(s.size()); ++k) s[k] = e / factorial(k);
  return s;
}

// Taylor coefficients of a function whose derivatives cycle through f0, f1 (sinh/cosh) or
// f0, f1, -f0, -f1 (sin/cos).
template <typename T>
Series<T> periodic_series(T f0, T f1, bool alternating) {
  Series<T> s;
  for (int k = 0; k < int(s.size()); ++k) {
    T d = (k % 2 == 0) ? f0 : f1;
    if (alternating && (k % 4 == 2 || k % 4 == 3)) d = -d;
    s[k] = d / factorial(k);
  }
  return s;
}

template <typename T>
Series<T> power_series(T a0, double r) {
  Series<T> s;
  double binom = 1.0;
  for (int k = 0; k < int(s.size()); ++k) {
    s[k] = binom * std::pow(a0, r - k);
    binom *= (r - k) / (k + 1);
  }
  return s;
}

}  // namespace jet_detail

template <typename T>
Jet<T> exp(const Jet<T>& a) {
  return compose(a, jet_detail::exp_series(a.value()));
}
template <typename T>
Jet<T> sinh(const Jet<T>& a) {
  return compose(a, jet_detail::periodic_series(std::sinh(a.value()), std::cosh(a.value()), false));
}
template <typename T>
Jet<T> cosh(const Jet<T>& a) {
  return compose(a, jet_detail::periodic_series(std::cosh(a.value()), std::sinh(a.value()), false));
}
template <typename T>
Jet<T> sin(const Jet<T>& a) {
  return compose(a, jet_detail::periodic_series(std::sin(a.value()), std::cos(a.value()), true));
}
template <typename T>
Jet<T> cos(const Jet<T>& a) {
  return compose(a, jet_detail::periodic_series(std::cos(a.value()), -std::sin(a.value()), true));
}

/// Reciprocal 1/a. Raises SingularityError naming `factor` when a vanishes at the base point.
template <typename T>
Jet<T> inv(const Jet<T>& a, const std::string& factor = "reciprocal") {
  const T a0 = a.value();
  if (!(std::abs(a0) > 1e-12 * std::max(1.0, a.magnitude()))) throw SingularityError(factor);
  jet_detail::Series<T> s;
  T p = T(1) / a0;
  for (int k = 0; k < int(s.size()); ++k) {
    s[k] = p;
    p *= -T(1) / a0;
  }
  return compose(a, s);
}

template <typename A, typename T>
auto operator/(const Jet<A>& a, const Jet<T>& b) {
  return a * inv(b, "division");
}
template <typename T, typename S, typename = std::enable_if_t<jet_detail::is_scalar_v<S>>>
Jet<T> operator/(const S& s, const Jet<T>& b) {
  return inv(b, "division") * s;
}

inline RealJet sqrt(const RealJet& a) {
  if (!(a.value() > 0.0)) throw SingularityError("sqrt of non-positive value");
  return compose(a, jet_detail::power_series(a.value(), 0.5));
}

template <typename T>
Jet<T> pow(const Jet<T>& a, int n) {
  if (n < 0) return pow(inv(a), -n);
  Jet<T> r = Jet<T>::constant(T(1), a.nvars(), a.order());
  for (int k = 0; k < n; ++k) r = r * a;
  return r;
}

// ---------------------------------------------------------------------------
// Conversions and C^n-valued jets

inline RealJet real(const ComplexJet& a) {
  return a.map([](const cd& c) { return c.real(); });
}
inline RealJet imag(const ComplexJet& a) {
  return a.map([](const cd& c) { return c.imag(); });
}
inline ComplexJet complexify(const RealJet& a) {
  return a.map([](double c) { return cd(c, 0.0); });
}

/// Assembles a C^n-valued jet from its coordinate jets.
inline VectorJet stack(std::initializer_list<ComplexJet> parts) {
  const std::vector<ComplexJet> v(parts);
  int order = Jet<cd>::kMaxOrder;
  int nv = 1;
  for (const auto& p : v) {
    order = std::min(order, p.order());
    nv = std::max(nv, p.nvars());
  }
  VectorJet r(order, nv, Eigen::VectorXcd::Zero(Eigen::Index(v.size())));
  for (int deg = 0; deg <= order; ++deg) {
    for (int j = 0; j <= (nv == 2 ? deg : 0); ++j) {
      for (std::size_t k = 0; k < v.size(); ++k) {
        const bool absent = j > 0 && v[k].nvars() == 1;
        r(deg - j, j)(Eigen::Index(k)) = absent ? cd(0) : v[k](deg - j, j);
      }
    }
  }
  return r;
}

inline ComplexJet component(const VectorJet& v, int k) {
  return v.map([k](const Eigen::VectorXcd& c) { return c(k); });
}

/// Multiplication by i (the complex structure J).
template <typename T>
Jet<T> times_i(const Jet<T>& v) {
  return v * cd(0.0, 1.0);
}

/// Jet of the hermitian form h(u, v) for C^n_s-valued jets (real-bilinear, so it convolves).
inline ComplexJet hermitian(const VectorJet& u, const VectorJet& v, int s) {
  const int order = std::min(u.order(), v.order());
  const int nv = std::max(u.nvars(), v.nvars());
  ComplexJet r(order, nv, cd(0));
  for (int deg = 0; deg <= order; ++deg) {
    for (int j = 0; j <= (nv == 2 ? deg : 0); ++j) {
      const int i = deg - j;
      cd acc(0);
      for (int p = 0; p <= i; ++p) {
        for (int q = 0; q <= j; ++q) {
          if ((q > 0 && u.nvars() == 1) || (j - q > 0 && v.nvars() == 1)) continue;
          const auto& a = u(p, q);
          const auto& b = v(i - p, j - q);
          for (Eigen::Index k = 0; k < a.size(); ++k) {
            const cd t = a(k) * std::conj(b(k));
            acc += (k < s) ? -t : t;
          }
        }
      }
      r(i, j) = acc;
    }
  }
  return r;
}

/// Jet of the real metric <u, v> = Re h(u, v).
inline RealJet inner(const VectorJet& u, const VectorJet& v, int s) {
  return real(hermitian(u, v, s));
}

// ---------------------------------------------------------------------------
// Expansion of composed functions

/// Jet of a univariate function, given as a callable on jets, at `base`.
template <typename F>
auto jet_eval(F&& f, double base, int order) {
  if (order > Jet<cd>::kMaxOrder) throw OrderError("jet order capped at 4");
  return f(ComplexJet::variable(0, base, order, 1));
}

/// Jet of a bivariate function, given as a callable on jets, at (x, y).
template <typename F>
auto jet_eval(F&& f, double x, double y, int order) {
  if (order > Jet<cd>::kMaxOrder) throw OrderError("jet order capped at 4");
  return f(ComplexJet::variable(0, x, order), ComplexJet::variable(1, y, order));
}

}  // namespace qbh
