#include "qbh/families.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "qbh/errors.hpp"

namespace qbh {
namespace {

const cd I(0.0, 1.0);
const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);
const double kSqrt6 = std::sqrt(6.0);

double param(const FamilyParams& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

bool is_poly_key(const std::string& key, const std::string& prefix, const std::string& alias) {
  if (key == alias) return true;
  if (key.size() != prefix.size() + 1 || key.compare(0, prefix.size(), prefix) != 0) return false;
  return std::isdigit(static_cast<unsigned char>(key.back())) != 0;
}

void require_keys(const std::string& family, const FamilyParams& p, const std::set<std::string>& plain,
                  bool polynomials) {
  for (const auto& [key, value] : p) {
    if (!std::isfinite(value)) throw FamilyError(family + ": parameter " + key + " is not finite");
    if (plain.count(key)) continue;
    if (polynomials && (is_poly_key(key, "f", "f") || is_poly_key(key, "d", "delta"))) continue;
    throw FamilyError(family + ": unknown parameter " + key);
  }
}

ComplexJet real_function(const ScalarFunction& f, const ComplexJet& u) { return complexify(f(real(u))); }

double abs_sum(double x, double y) { return std::abs(x + y); }
double abs_diff(double x, double y) { return std::abs(x - y); }
double abs_y(double, double y) { return std::abs(y); }

// Lift-norm probe run before a lifted family is accepted.
void require_lift_norm(const ImmersionPatch& patch) {
  const ProbeResiduals r = probe_patch(patch, 5);
  if (!(r.lift_norm <= 1e-10)) {
    std::ostringstream os;
    os << patch.name << ": lift-norm probe failed (residual " << r.lift_norm << "); formula mis-entered";
    throw FamilyError(os.str());
  }
}

struct CurveFamily {
  ScalarFunction f, delta;
};

CurveFamily curve_functions(const FamilyParams& params, std::vector<double> f_default) {
  return {polynomial(polynomial_params(params, "f", "f", std::move(f_default))),
          polynomial(polynomial_params(params, "d", "delta", {0.0}))};
}

// Integrates the family curve so that it covers the y-range of the window.
CurveSpec family_curve(const std::string& name, const CurveFamily& fam, Signature ambient, double sigma,
                       const Window& w, const Window& fallback) {
  const LegendreStructure eq = LegendreStructure::from_family(fam.f, fam.delta);
  const double t0 = std::min({0.0, w.y0 - 0.05, fallback.y0 - 0.05});
  const double t1 = std::max(w.y1, fallback.y1) + 0.05;
  const RealJet T0 = RealJet::constant(t0, 1, 0);
  CurveState seed;
  try {
    seed = seed_initial_data(ambient, sigma, eq.p(T0).value(), eq.q(T0).value());
  } catch (const ParameterError& e) {
    throw FamilyError(name + ": " + e.what());
  }
  const SampledCurve curve = integrate_legendre_curve(eq, ambient, sigma, seed, {t0, t1}, 2.5e-4);
  return curve.spec(name + "-curve");
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::paper_asserted: return "paper-asserted";
    case Provenance::paper_corrected: return "paper-corrected";
    case Provenance::empirical: return "empirical";
    case Provenance::trivial: return "trivial";
  }
  return "?";
}

const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names = {
      "thm6-flat-biharmonic", "thm7-flat-qbh", "thm9-i",    "thm9-ii",    "thm9-iii",  "thm9-iv",
      "thm9-corrected",       "thm10-i",       "thm10-ii",  "thm10-iii",  "thm10-iv",  "plane-minimal"};
  return names;
}

ExpectedProfile expected_profile(const std::string& name) {
  ExpectedProfile e;
  e.name = name;
  if (name == "thm6-flat-biharmonic") {
    e.provenance = Provenance::paper_asserted;
    e.marginally_trapped = true;
    e.biharmonic = true;
    e.quasi_biharmonic = false;
  } else if (name == "thm7-flat-qbh") {
    e.provenance = Provenance::paper_asserted;
    e.marginally_trapped = true;
    e.quasi_biharmonic = true;
    e.biharmonic = false;
    e.gauss_curvature = 0.0;
  } else if (name == "thm9-i" || name == "thm9-corrected") {
    e.provenance = Provenance::paper_asserted;
    e.marginally_trapped = true;
    e.quasi_biharmonic = true;
    e.biharmonic = false;
    e.gauss_curvature = 1.0;
    if (name == "thm9-corrected") e.note = "matches thm9-i when f is a nonzero constant and delta = 0";
  } else if (name == "thm10-i") {
    e.provenance = Provenance::paper_asserted;
    e.marginally_trapped = true;
    e.quasi_biharmonic = true;
    e.biharmonic = false;
    e.gauss_curvature = -1.0;
    e.note = "CH analogue; the CP correction may transfer through the anti-isometry";
  } else if (name == "thm9-ii" || name == "thm9-iii" || name == "thm9-iv") {
    e.provenance = Provenance::paper_corrected;
    e.note = "status uncertain after the correction of the CP classification; recorded empirically";
  } else if (name == "thm10-ii" || name == "thm10-iii" || name == "thm10-iv") {
    e.provenance = Provenance::empirical;
    e.note = "CH analogue of a corrected CP family; recorded empirically";
  } else if (name == "plane-minimal") {
    e.provenance = Provenance::trivial;
    e.minimal = true;
    e.marginally_trapped = false;
    e.biharmonic = true;
    e.quasi_biharmonic = false;
    e.gauss_curvature = 0.0;
  } else {
    throw FamilyError("unknown family: " + name);
  }
  return e;
}

std::vector<double> polynomial_params(const FamilyParams& params, const std::string& prefix, const std::string& alias,
                                      std::vector<double> fallback) {
  if (const auto it = params.find(alias); it != params.end()) return {it->second};
  std::vector<double> c;
  for (const auto& [key, value] : params) {
    if (!is_poly_key(key, prefix, alias) || key == alias) continue;
    const auto k = std::size_t(key.back() - '0');
    if (c.size() <= k) c.resize(k + 1, 0.0);
    c[k] = value;
  }
  return c.empty() ? fallback : c;
}

CurveSpec biharmonic_instance_curve() {
  CurveSpec c;
  c.name = "biharmonic-instance";
  c.ambient = {2, 1};
  c.speed = 0.0;
  c.max_derivative = 8;
  c.derivatives = [](double t, int k) {
    std::vector<Eigen::VectorXcd> out;
    cd a = 0.5 * I * std::exp(I * t);
    for (int m = 0; m <= k; ++m) {
      Eigen::VectorXcd v(2);
      v << -a, a;
      out.push_back(v);
      a *= I;
    }
    return out;
  };
  return c;
}

// ---------------------------------------------------------------------------

ImmersionPatch make_flat_family(const std::string& name, const FamilyParams& params,
                                const std::optional<CurveSpec>& curve) {
  ImmersionPatch patch;
  patch.name = name;
  patch.ambient = AmbientSpec::flat();
  patch.window = {0.0, 1.0, 0.0, 1.0};

  if (name == "plane-minimal") {
    require_keys(name, params, {}, false);
    patch.map = [](const ComplexJet& x, const ComplexJet& y) { return stack({y, x}); };
    return patch;
  }

  if (name == "thm6-flat-biharmonic") {
    require_keys(name, params, {}, false);
    const CurveSpec z = curve ? *curve : biharmonic_instance_curve();
    if (z.ambient != Signature{2, 1}) throw DimensionError(name + ": curve must live in C^2_1");
    Eigen::VectorXcd c1(2);
    c1 << 1.0, 1.0;
    // f(y) = y; the curve must satisfy <iz', c1 e^{if}> = 0, <z', c1 e^{if}> = -1 and be null.
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto d = z.at(t, 1);
      const Eigen::VectorXcd c = std::exp(I * t) * c1;
      const double r1 = std::abs(metric(Eigen::VectorXcd(I * d[1]), c, 1));
      const double r2 = std::abs(metric(d[1], c, 1) + 1.0);
      const double r3 = std::abs(metric(d[1], d[1], 1));
      if (!(r1 <= 1e-10)) throw ConstraintError("<iz', c1 e^{if}> = 0", r1);
      if (!(r2 <= 1e-10)) throw ConstraintError("<z', c1 e^{if}> = -1", r2);
      if (!(r3 <= 1e-10)) throw ConstraintError("<z', z'> = 0", r3);
    }
    patch.map = [z, c1](const ComplexJet& x, const ComplexJet& y) {
      const ComplexJet w = x * exp(I * y);
      return VectorJet::constant(c1, 2, w.order()) * w + compose_curve(z, y);
    };
    return patch;
  }

  if (name == "thm7-flat-qbh") {
    require_keys(name, params, {"mu"}, false);
    const double mu = param(params, "mu", 1.0);
    if (mu == 0.0) throw FamilyError(name + ": mu must be nonzero");
    const CurveSpec z = curve ? *curve : make_flat_null_legendre(mu);
    if (z.ambient != Signature{2, 1}) throw DimensionError(name + ": curve must live in C^2_1");
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const LegendreReport r = legendre_report(z, t);
      const auto d = z.at(t, 2);
      if (!(r.residual_cone <= 1e-10)) throw ConstraintError("<z, z> = 0", r.residual_cone);
      if (!(std::abs(metric(d[1], d[1], 1)) <= 1e-10)) {
        throw ConstraintError("<z', z'> = 0", std::abs(metric(d[1], d[1], 1)));
      }
      if (!(std::abs(r.pairing - 1.0 / mu) <= 1e-10)) {
        throw ConstraintError("<z, iz'> = 1/mu", std::abs(r.pairing - 1.0 / mu));
      }
      if (!(d[2].norm() > 1e-10)) throw ConstraintError("z'' != 0", d[2].norm());
    }
    patch.map = [z, mu](const ComplexJet& x, const ComplexJet& y) { return exp(I * mu * y) * compose_curve(z, x); };
    return patch;
  }

  throw FamilyError("not a flat family: " + name);
}

ImmersionPatch make_cp_family(const std::string& name, const FamilyParams& params,
                              const std::optional<CurveSpec>& curve) {
  ImmersionPatch patch;
  patch.name = name;
  patch.ambient = AmbientSpec::sphere_lift();
  patch.window = {0.3, 1.3, 0.3, 1.3};

  if (name == "thm9-i") {
    require_keys(name, params, {"a"}, false);
    const double a = param(params, "a", 1.0);
    if (a == 0.0) throw FamilyError(name + ": a must be nonzero");
    patch.singular_margin = abs_sum;
    patch.map = [a](const ComplexJet& x, const ComplexJet& y) {
      const ComplexJet w = inv(a * (x + y), "x+y");
      const ComplexJet e = exp(I * (kSqrt2 * a) * y);
      const ComplexJet d = x - y;
      return stack({w * e * (kSqrt2 + I * a * d), w * e * (a * d), w * (kSqrt2 + I * a * (x + y))});
    };
  } else if (name == "thm9-iii") {
    require_keys(name, params, {"b"}, false);
    const double b = param(params, "b", 1.0);
    if (!(b > 0.0)) throw FamilyError(name + ": b must be positive");
    patch.singular_margin = abs_y;
    patch.map = [b](const ComplexJet& x, const ComplexJet& y) {
      const ComplexJet pre = exp(I * (b / kSqrt2) * x) * inv(3.0 * b * y, "y");
      const ComplexJet ch = cosh((kSqrt6 / 2.0 * b) * x);
      const ComplexJet sh = sinh((kSqrt6 / 2.0 * b) * x);
      const ComplexJet by = b * y;
      const ComplexJet w = kSqrt6 + I * kSqrt3 * by;
      return stack({pre * (w * ch - 3.0 * (by + I * kSqrt2) * sh),
                    pre * (3.0 * by * ch + kSqrt3 * (I * by - 2.0 * kSqrt2) * sh),
                    pre * w * exp(-3.0 * I * (b / kSqrt2) * x)});
    };
  } else if (name == "thm9-ii" || name == "thm9-corrected") {
    require_keys(name, params, {}, true);
    if (!curve) throw FamilyError(name + ": a curve input is required");
    const bool corrected = name == "thm9-corrected";
    const CurveFamily fam = curve_functions(params, corrected ? std::vector<double>{1.0} : std::vector<double>{1.0, 0.5});
    const CurveSpec z = *curve;
    if (z.ambient != Signature{3, 1}) throw DimensionError(name + ": curve must live in C^3_1");
    patch.singular_margin = abs_sum;
    patch.map = [z, f = fam.f](const ComplexJet& x, const ComplexJet& y) {
      const ComplexJet coef = 2.0 * inv(x + y, "x+y") + I * kSqrt2 * real_function(f, y);
      return coef * compose_curve(z, y) - compose_curve(z, y, 1);
    };
  } else if (name == "thm9-iv") {
    throw FamilyError(name + ": no unit speed timelike Legendre curve lies in the light cone of C^3_1");
  } else {
    throw FamilyError("not a CP family: " + name);
  }
  require_lift_norm(patch);
  return patch;
}

ImmersionPatch make_ch_family(const std::string& name, const FamilyParams& params,
                              const std::optional<CurveSpec>& curve) {
  ImmersionPatch patch;
  patch.name = name;
  patch.ambient = AmbientSpec::hyperbolic_lift();
  patch.window = {1.0, 2.0, 0.2, 0.8};

  if (name == "thm10-i") {
    require_keys(name, params, {"a"}, false);
    const double a = param(params, "a", 1.0);
    if (a == 0.0) throw FamilyError(name + ": a must be nonzero");
    patch.singular_margin = abs_diff;
    patch.map = [a](const ComplexJet& x, const ComplexJet& y) {
      const ComplexJet w = inv(a * (x - y), "x-y");
      const ComplexJet e = exp(I * (kSqrt2 * a) * y);
      return stack({w * e * (a * (x + y)), w * (a * (x - y) + I * kSqrt2), w * e * (a * (x + y) + I * kSqrt2)});
    };
  } else if (name == "thm10-iii") {
    require_keys(name, params, {"b"}, false);
    const double b = param(params, "b", 1.0);
    if (b == 0.0) throw FamilyError(name + ": b must be nonzero");
    patch.window = {0.3, 1.3, 0.3, 1.3};
    patch.singular_margin = abs_y;
    patch.map = [b](const ComplexJet& x, const ComplexJet& y) {
      const ComplexJet pre = exp(-I * (b / kSqrt2) * x) * inv(3.0 * b * y, "y");
      const ComplexJet ch = cosh((kSqrt6 / 2.0 * b) * x);
      const ComplexJet sh = sinh((kSqrt6 / 2.0 * b) * x);
      const ComplexJet by = b * y;
      const ComplexJet w = kSqrt6 + I * kSqrt3 * by;
      // 3 (sqrt2 + i b y) sinh in place of 3 (b y + i sqrt2) cosh would leave the quadric
      return stack({pre * (3.0 * (by + I * kSqrt2) * ch + kSqrt3 * (kSqrt2 + I * by) * sh),
                    pre * exp(3.0 * I * (b / kSqrt2) * x) * w,
                    pre * (3.0 * by * sh - kSqrt3 * (I * by - 2.0 * kSqrt2) * ch)});
    };
  } else if (name == "thm10-ii") {
    require_keys(name, params, {}, true);
    if (!curve) throw FamilyError(name + ": a curve input is required");
    const CurveFamily fam = curve_functions(params, {1.0, 0.5});
    const CurveSpec z = *curve;
    if (z.ambient != Signature{3, 2}) throw DimensionError(name + ": curve must live in C^3_2");
    patch.singular_margin = abs_diff;
    patch.map = [z, f = fam.f](const ComplexJet& x, const ComplexJet& y) {
      const ComplexJet coef = 2.0 * inv(x - y, "x-y") - I * kSqrt2 * real_function(f, y);
      return coef * compose_curve(z, y) + compose_curve(z, y, 1);
    };
  } else if (name == "thm10-iv") {
    throw FamilyError(name + ": no unit speed spacelike Legendre curve lies in the light cone of C^3_2");
  } else {
    throw FamilyError("not a CH family: " + name);
  }
  require_lift_norm(patch);
  return patch;
}

// ---------------------------------------------------------------------------

ProbeResiduals probe_patch(const ImmersionPatch& patch, int n) {
  ProbeResiduals r;
  r.min_margin = std::numeric_limits<double>::infinity();
  const int s = patch.ambient.lift_index;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2d p = patch.window.grid_point(i, j, n, n);
      r.min_margin = std::min(r.min_margin, patch.margin(p));
      const VectorJet g = jet_eval(patch.map, p.x(), p.y(), 1);
      const Eigen::VectorXcd L = g.value();
      const Eigen::VectorXcd fx = g.partial(1, 0), fy = g.partial(0, 1);
      r.lagrangian = std::max(r.lagrangian, std::abs(metric(Eigen::VectorXcd(I * fx), fy, s)));
      if (patch.ambient.lifted()) {
        const Eigen::VectorXcd iL = I * L;
        r.lift_norm = std::max(r.lift_norm, std::abs(metric(L, L, s) - patch.ambient.lift_norm()));
        r.horizontal = std::max({r.horizontal, std::abs(metric(fx, iL, s)), std::abs(metric(fy, iL, s))});
      }
    }
  }
  return r;
}

void require_admissible_window(const ImmersionPatch& patch, const Window& w) {
  if (!(w.x1 > w.x0) || !(w.y1 > w.y0)) throw FamilyError(patch.name + ": window must have positive extent");
  if (!patch.singular_margin) return;
  const int n = 81;
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) worst = std::min(worst, patch.margin(w.grid_point(i, j, n, n)));
  }
  if (worst < kWindowMargin) {
    std::ostringstream os;
    os << patch.name << ": window comes within " << worst << " of the singular locus (need " << kWindowMargin << ")";
    throw FamilyError(os.str());
  }
}

FamilySpec make_family(const std::string& name, const FamilyParams& params, const std::optional<Window>& window) {
  FamilySpec spec;
  spec.name = name;
  spec.params = params;
  spec.expected = expected_profile(name);

  const bool flat = name == "plane-minimal" || name == "thm6-flat-biharmonic" || name == "thm7-flat-qbh";
  const bool ch = name.rfind("thm10-", 0) == 0;
  if (flat) {
    spec.patch = make_flat_family(name, params);
  } else if (name == "thm9-ii" || name == "thm9-corrected" || name == "thm10-ii") {
    require_keys(name, params, {}, true);
    const Window fallback = ch ? Window{1.0, 2.0, 0.2, 0.8} : Window{0.3, 1.3, 0.3, 1.3};
    const Window w = window ? *window : fallback;
    const CurveFamily fam =
        curve_functions(params, name == "thm9-corrected" ? std::vector<double>{1.0} : std::vector<double>{1.0, 0.5});
    spec.curve = ch ? family_curve(name, fam, {3, 2}, -1.0, w, fallback)
                    : family_curve(name, fam, {3, 1}, 1.0, w, fallback);
    spec.patch = ch ? make_ch_family(name, params, spec.curve) : make_cp_family(name, params, spec.curve);
  } else if (ch) {
    spec.patch = make_ch_family(name, params);
  } else {
    spec.patch = make_cp_family(name, params);
  }
  if (window) {
    spec.patch.window = *window;
    require_admissible_window(spec.patch, spec.patch.window);
    if (spec.patch.ambient.lifted()) require_lift_norm(spec.patch);
  } else {
    require_admissible_window(spec.patch, spec.patch.window);
  }
  return spec;
}

}  // namespace qbh
