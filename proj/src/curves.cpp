#include "qbh/curves.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "qbh/errors.hpp"

namespace qbh {
namespace {

const cd I(0.0, 1.0);
const double kSqrt2 = std::sqrt(2.0);

}  // namespace

std::vector<Eigen::VectorXcd> CurveSpec::at(double t, int k) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  if (t < t0 - slack || t > t1 + slack) {
    std::ostringstream os;
    os << name << ": parameter " << t << " outside [" << t0 << ", " << t1 << "]";
    throw ParameterError(os.str());
  }
  if (k > max_derivative) throw OrderError(name + ": curve supplies derivatives up to " + std::to_string(max_derivative));
  return derivatives(t, k);
}

VectorJet CurveSpec::jet(double t, int order, int shift) const {
  const auto d = at(t, order + shift);
  VectorJet j(order, 1, Eigen::VectorXcd::Zero(d[0].size()));
  for (int k = 0; k <= order; ++k) j(k, 0) = d[shift + k] / jet_detail::factorial(k);
  return j;
}

VectorJet compose_curve(const CurveSpec& curve, const ComplexJet& u, int shift) {
  const int order = u.order();
  const auto d = curve.at(u.value().real(), order + shift);
  ComplexJet delta = u;
  delta.value() = 0.0;
  VectorJet r = VectorJet::constant(Eigen::VectorXcd(d[shift + order] / jet_detail::factorial(order)), u.nvars(), order);
  for (int k = order - 1; k >= 0; --k) {
    r = r * delta;
    r.value() += d[shift + k] / jet_detail::factorial(k);
  }
  return r;
}

LegendreReport legendre_report(const CurveSpec& curve, double t) {
  const auto d = curve.at(t, 3);
  const int s = curve.ambient.s;
  const auto& z = d[0];
  const auto& z1 = d[1];
  const auto& z2 = d[2];
  const auto& z3 = d[3];
  LegendreReport r;
  r.t = t;
  const double speed = metric(z1, z1, s);
  r.residual_cone = std::abs(metric(z, z, s));
  r.residual_speed = std::abs(speed - curve.speed);
  r.residual_legendre = std::abs(metric(z1, Eigen::VectorXcd(I * z), s));
  r.residual_special = std::abs(metric(Eigen::VectorXcd(I * z1), z2, s));
  r.kappa_sq = speed * metric(z2, z2, s);
  r.tau_hat = speed * metric(z2, Eigen::VectorXcd(I * z3), s);
  r.pairing = metric(z, Eigen::VectorXcd(I * z1), s);
  return r;
}

CurveSpec make_flat_null_legendre(double mu) {
  if (mu == 0.0 || !std::isfinite(mu)) throw ParameterError("flat null Legendre curve needs mu != 0");
  const double k = 1.0 / (2.0 * mu);
  CurveSpec c;
  std::ostringstream name;
  name << "flat-null(mu=" << mu << ")";
  c.name = name.str();
  c.ambient = {2, 1};
  c.speed = 0.0;
  c.max_derivative = 8;
  c.derivatives = [k](double t, int n) {
    std::vector<Eigen::VectorXcd> out;
    const cd e = std::exp(I * k * t);
    cd a = e, b = std::conj(e);
    for (int m = 0; m <= n; ++m) {
      Eigen::VectorXcd v(2);
      v << a, b;
      out.push_back(v);
      a *= I * k;
      b *= -I * k;
    }
    return out;
  };
  return c;
}

ScalarFunction polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  return [coeffs](const RealJet& t) {
    RealJet r = RealJet::constant(coeffs.back(), t.nvars(), t.order());
    for (int k = int(coeffs.size()) - 2; k >= 0; --k) r = r * t + coeffs[k];
    return r;
  };
}

// ---------------------------------------------------------------------------

LegendreStructure LegendreStructure::from_family(ScalarFunction f, ScalarFunction delta) {
  LegendreStructure eq;
  eq.p = [f](const RealJet& t) { return (2.0 * kSqrt2) * f(t); };
  eq.q = [f](const RealJet& t) {
    const RealJet v = f(t);
    return 2.0 * (v * v);
  };
  eq.r = [f, delta](const RealJet& t) {
    return kSqrt2 * (f(t).derivative(0).derivative(0) + 2.0 * delta(t));
  };
  return eq;
}

std::array<ComplexJet, 3> LegendreStructure::coefficients(double t, int order) const {
  const RealJet T = RealJet::variable(0, t, std::min(RealJet::kMaxOrder, order + 2), 1);
  const RealJet pj = p(T), qj = q(T), rj = r(T);
  const ComplexJet P = I * complexify(pj);
  const ComplexJet Q = complexify(qj) + I * complexify(pj.derivative(0));
  const ComplexJet R = 0.5 * complexify(qj.derivative(0)) + I * complexify(rj);
  if (P.order() < order || Q.order() < order || R.order() < order) {
    throw OrderError("structure functions do not carry enough derivatives");
  }
  return {P.truncated(order), Q.truncated(order), R.truncated(order)};
}

double LegendreStructure::kappa_sq(double t) const {
  const RealJet T = RealJet::constant(t, 1, 0);
  const double pv = p(T).value(), qv = q(T).value();
  return pv * pv - qv;
}

double LegendreStructure::tau_hat(double t) const {
  const RealJet T = RealJet::variable(0, t, 2, 1);
  const double pv = p(T).value(), qv = q(T).value(), rv = r(T).value();
  return -pv * pv * pv + 2.0 * pv * qv + rv;
}

// ---------------------------------------------------------------------------

std::vector<SeedConstraint> seed_constraints(const CurveState& st, int s, double sigma, double p0, double q0) {
  const auto& z = st.z;
  const auto& z1 = st.dz;
  const auto& z2 = st.ddz;
  auto ip = [s](const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) { return metric(u, v, s); };
  auto J = [](const Eigen::VectorXcd& u) { return Eigen::VectorXcd(I * u); };
  return {
      {"<z,z> = 0", std::abs(ip(z, z))},
      {"z != 0", z.norm() > 1e-12 ? 0.0 : 1.0},
      {"<z',z'> = sigma", std::abs(ip(z1, z1) - sigma)},
      {"<z,z'> = 0", std::abs(ip(z, z1))},
      {"<z,iz'> = 0", std::abs(ip(z, J(z1)))},
      {"<z,z''> = -sigma", std::abs(ip(z, z2) + sigma)},
      {"<z',z''> = 0", std::abs(ip(z1, z2))},
      {"<z'',iz> = 0", std::abs(ip(z2, J(z)))},
      {"<z'',z''> = sigma(p^2 - q)", std::abs(ip(z2, z2) - sigma * (p0 * p0 - q0))},
      {"<z',iz''> = -sigma p", std::abs(ip(z1, J(z2)) + sigma * p0)},
  };
}

CurveState seed_initial_data(Signature ambient, double sigma, double p0, double q0) {
  const int n = ambient.n, s = ambient.s;
  if (sigma != 1.0 && sigma != -1.0) throw ParameterError("seed speed must be +1 or -1");
  if (s < 1 || s >= n) throw ParameterError("light-cone seed needs 1 <= s < n");
  // last negative axis s-1 and first positive axis s carry the null position
  const int neg = s - 1, pos = s;
  int axis = -1;
  for (int k = 0; k < n; ++k) {
    if (k == neg || k == pos) continue;
    if ((k < s ? -1.0 : 1.0) == sigma) {
      axis = k;
      break;
    }
  }
  if (axis < 0) {
    throw ParameterError(std::string("no ") + (sigma > 0 ? "spacelike" : "timelike") +
                         " Legendre direction is available in this signature");
  }
  const double r2 = 1.0 / std::sqrt(2.0);
  CurveState st;
  st.z = Eigen::VectorXcd::Zero(n);
  st.z(neg) = r2;
  st.z(pos) = r2;
  Eigen::VectorXcd zhat = Eigen::VectorXcd::Zero(n);
  zhat(neg) = -r2;
  zhat(pos) = r2;
  st.dz = Eigen::VectorXcd::Zero(n);
  st.dz(axis) = 1.0;
  st.ddz = -sigma * zhat + (0.5 * q0) * st.z + (I * p0) * st.dz;
  return st;
}

CurveState seed_corrected_initial_data(double f0) {
  return seed_initial_data({3, 1}, 1.0, 2.0 * kSqrt2 * f0, 2.0 * f0 * f0);
}

// ---------------------------------------------------------------------------

namespace {

struct CoefficientValues {
  cd P, Q, R;
};

CoefficientValues coefficient_values(const LegendreStructure& eq, double t) {
  const auto c = eq.coefficients(t, 0);
  return {c[0].value(), c[1].value(), c[2].value()};
}

CurveState rhs(const CoefficientValues& c, const CurveState& s) {
  return {s.dz, s.ddz, c.P * s.ddz + c.Q * s.dz + c.R * s.z};
}

CurveState axpy(const CurveState& s, double h, const CurveState& k) {
  return {s.z + h * k.z, s.dz + h * k.dz, s.ddz + h * k.ddz};
}

}  // namespace

CurveState rk4_step(const LegendreStructure& eq, double t, const CurveState& s, double h) {
  const CoefficientValues c0 = coefficient_values(eq, t);
  const CoefficientValues cm = coefficient_values(eq, t + 0.5 * h);
  const CoefficientValues c1 = coefficient_values(eq, t + h);
  const CurveState k1 = rhs(c0, s);
  const CurveState k2 = rhs(cm, axpy(s, 0.5 * h, k1));
  const CurveState k3 = rhs(cm, axpy(s, 0.5 * h, k2));
  const CurveState k4 = rhs(c1, axpy(s, h, k3));
  CurveState out = s;
  out.z += (h / 6.0) * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
  out.dz += (h / 6.0) * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
  out.ddz += (h / 6.0) * (k1.ddz + 2.0 * k2.ddz + 2.0 * k3.ddz + k4.ddz);
  return out;
}

SampledCurve::SampledCurve(LegendreStructure eq, Signature ambient, double sigma, double t0, double h,
                           std::vector<CurveState> nodes)
    : eq_(std::move(eq)), ambient_(ambient), sigma_(sigma), t0_(t0), h_(h), nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ParameterError("sampled curve needs at least one node");
}

CurveState SampledCurve::state(double t) const {
  const double slack = 1e-9 * h_;
  if (t < t0() - slack || t > t1() + slack) {
    std::ostringstream os;
    os << "curve parameter " << t << " outside [" << t0() << ", " << t1() << "]";
    throw ParameterError(os.str());
  }
  const long idx = std::clamp(std::lround((t - t0_) / h_), 0L, long(nodes_.size()) - 1);
  const double dt = t - node_time(std::size_t(idx));
  if (dt == 0.0) return nodes_[std::size_t(idx)];
  return rk4_step(eq_, node_time(std::size_t(idx)), nodes_[std::size_t(idx)], dt);
}

std::vector<Eigen::VectorXcd> SampledCurve::derivatives(double t, int k) const {
  if (k > 5) throw OrderError("sampled curves supply derivatives up to order 5");
  const CurveState st = state(t);
  // Taylor coefficients c_m = z^(m) / m! from the equation:
  // (m+3)(m+2)(m+1) c_{m+3} = sum_j P_j (m-j+2)(m-j+1) c_{m-j+2} + Q_j (m-j+1) c_{m-j+1} + R_j c_{m-j}
  std::vector<Eigen::VectorXcd> c{st.z, st.dz, 0.5 * st.ddz};
  if (k >= 3) {
    const auto coef = eq_.coefficients(t, k - 3);
    for (int m = 0; m + 3 <= k; ++m) {
      Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(st.z.size());
      for (int j = 0; j <= m; ++j) {
        const int l = m - j;
        acc += coef[0](j, 0) * double((l + 2) * (l + 1)) * c[std::size_t(l + 2)];
        acc += coef[1](j, 0) * double(l + 1) * c[std::size_t(l + 1)];
        acc += coef[2](j, 0) * c[std::size_t(l)];
      }
      c.push_back(acc / double((m + 3) * (m + 2) * (m + 1)));
    }
  }
  std::vector<Eigen::VectorXcd> out;
  for (int m = 0; m <= k; ++m) out.push_back(c[std::size_t(m)] * jet_detail::factorial(m));
  return out;
}

CurveSpec SampledCurve::spec(const std::string& name) const {
  auto self = std::make_shared<const SampledCurve>(*this);
  CurveSpec c;
  c.name = name;
  c.ambient = ambient_;
  c.speed = sigma_;
  c.t0 = t0();
  c.t1 = t1();
  c.max_derivative = 5;
  c.derivatives = [self](double t, int k) { return self->derivatives(t, k); };
  return c;
}

void SampledCurve::write_csv(std::ostream& os) const {
  const int n = ambient_.n;
  os << "t";
  for (const char* part : {"z", "dz", "ddz"}) {
    for (int k = 0; k < n; ++k) os << ',' << part << k << "_re," << part << k << "_im";
  }
  os << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    os << node_time(i);
    for (const auto* v : {&nodes_[i].z, &nodes_[i].dz, &nodes_[i].ddz}) {
      for (int k = 0; k < n; ++k) os << ',' << (*v)(k).real() << ',' << (*v)(k).imag();
    }
    os << '\n';
  }
}

SampledCurve integrate_legendre_curve(const LegendreStructure& eq, Signature ambient, double sigma,
                                      const CurveState& init, std::array<double, 2> range, double h,
                                      double drift_bound) {
  if (!(h > 0.0)) throw ParameterError("integration step must be positive");
  if (!(range[1] >= range[0])) throw ParameterError("integration range must be increasing");
  if (init.z.size() != ambient.n || init.dz.size() != ambient.n || init.ddz.size() != ambient.n) {
    throw DimensionError("initial data does not live in the curve's ambient");
  }
  const RealJet T0 = RealJet::constant(range[0], 1, 0);
  const double p0 = eq.p(T0).value(), q0 = eq.q(T0).value();
  for (const auto& c : seed_constraints(init, ambient.s, sigma, p0, q0)) {
    if (!(c.residual <= 1e-10)) throw ConstraintError(c.name, c.residual);
  }
  const auto steps = std::size_t(std::llround((range[1] - range[0]) / h));
  const double hh = steps > 0 ? (range[1] - range[0]) / double(steps) : h;
  std::vector<CurveState> nodes{init};
  nodes.reserve(steps + 1);
  for (std::size_t i = 0; i < steps; ++i) nodes.push_back(rk4_step(eq, range[0] + hh * double(i), nodes.back(), hh));

  SampledCurve curve(eq, ambient, sigma, range[0], hh, std::move(nodes));
  const int s = ambient.s;
  DriftReport& d = curve.drift;
  d.bound = drift_bound;
  for (const auto& st : curve.nodes()) {
    d.cone = std::max(d.cone, std::abs(metric(st.z, st.z, s)));
    d.speed = std::max(d.speed, std::abs(metric(st.dz, st.dz, s) - sigma));
    d.legendre = std::max(d.legendre, std::abs(metric(st.dz, Eigen::VectorXcd(I * st.z), s)));
  }
  d.flagged = d.max() > drift_bound;
  return curve;
}

SampledCurve integrate_corrected_curve(ScalarFunction f, ScalarFunction delta, const CurveState& init,
                                      std::array<double, 2> range, double h, double drift_bound) {
  return integrate_legendre_curve(LegendreStructure::from_family(std::move(f), std::move(delta)), {3, 1}, 1.0, init,
                                  range, h, drift_bound);
}

}  // namespace qbh
