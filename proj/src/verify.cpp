#include "qbh/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include "qbh/adapted_frame.hpp"
#include "qbh/errors.hpp"

namespace qbh {
namespace {

using Clock = std::chrono::steady_clock;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename F>
void parallel_for(int n, int threads, F&& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

enum Check : int {
  kLiftNorm,
  kLagrangian,
  kHorizontal,
  kHLightlike,
  kHNonzero,
  kHZero,
  kTau2Lightlike,
  kTau2Nonzero,
  kTau2Zero,
  kGEqEps,
  kRouteAgreement,
  kCodazzi,
  kGaussEq,
  kEq318,
  kEq319,
  kFrameCodazzi,
  kLaplacianLemmas,
  kEq338,
  kNumChecks
};

bool lower_bound_check(int c) { return c == kHNonzero || c == kTau2Nonzero; }
bool frame_check(int c) { return c >= kEq318 && c <= kEq338; }

double default_bound(int) { return 1e-3; }

PointRecord evaluate_point(const FamilySpec& fam, const Eigen::Vector2d& p, const BackendOptions& backend, double tol,
                           double expected_G) {
  PointRecord rec;
  rec.point = p;
  rec.residuals.assign(kNumChecks, kNaN);
  try {
    const SurfaceGerm germ = SurfaceGerm::at(fam.patch, p, backend);
    const PointGeometry pg = point_geometry(germ);
    const ClassificationReport cr = classify_point(germ, tol);
    const StructuralResiduals sr = structural_residuals(germ);
    const int s = germ.index();
    auto& r = rec.residuals;

    rec.flags = cr.flags;
    rec.indeterminate = cr.indeterminate;
    rec.ambiguous = cr.ambiguous;
    rec.gauss_curvature = cr.gauss_curvature;
    rec.mean_curvature_square = cr.mean_curvature_square;
    rec.bitension_norm = cr.bitension_norm;
    rec.bitension_square = cr.bitension_square;

    const Eigen::VectorXcd H = germ.mean_curvature().value();
    const Eigen::VectorXcd& tau2 = cr.bitension.tau2_direct;
    const double scale = 1.0 + tau2.norm();

    r[kLiftNorm] = pg.lift_norm_residual;
    r[kLagrangian] = pg.lagrangian_residual;
    r[kHorizontal] = pg.horizontality_residual;
    r[kHLightlike] = std::abs(metric(H, H, s));
    r[kHNonzero] = H.norm();
    r[kHZero] = H.norm();
    r[kTau2Lightlike] = std::abs(metric(tau2, tau2, s));
    r[kTau2Nonzero] = tau2.norm();
    r[kTau2Zero] = tau2.norm();
    r[kGEqEps] = std::abs(cr.gauss_curvature - expected_G);
    r[kCodazzi] = sr.codazzi;
    r[kGaussEq] = sr.gauss;

    std::vector<Eigen::VectorXcd> routes{tau2, cr.bitension.tau2_laplacian};
    try {
      const AdaptedFrame f1 = build_adapted_frame(germ, 1.0, tol);
      const AdaptedFrame f2 = build_adapted_frame(germ, 2.0, tol);
      rec.framed = true;
      const FrameIdentityResiduals ir = frame_identity_residuals(f1, cr.gauss_curvature, germ.epsilon());
      const LemmaResiduals lr = lemma_residuals(f1, germ);
      const Eigen::VectorXcd t1 = bitension_from_frame(f1), t2 = bitension_from_frame(f2);
      routes.push_back(t1);
      routes.push_back(t2);
      r[kEq318] = std::max(ir.trace_ac, ir.trace_bd);
      r[kEq319] = ir.gauss;
      double fc = ir.connection_gauss;
      for (double x : ir.codazzi) fc = std::max(fc, x);
      for (double x : ir.combined) fc = std::max(fc, x);
      r[kFrameCodazzi] = fc;
      r[kLaplacianLemmas] = lr.max();
      r[kEq338] = std::max((t1 - tau2).norm(), (t2 - tau2).norm()) / scale;
    } catch (const NotMarginallyTrappedError&) {
    } catch (const LagrangianViolationError&) {
    }
    double route = 0.0;
    for (std::size_t i = 0; i < routes.size(); ++i) {
      for (std::size_t j = i + 1; j < routes.size(); ++j) route = std::max(route, (routes[i] - routes[j]).norm());
    }
    r[kRouteAgreement] = route / scale;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

// Which checks a family's report carries, and whether each counts toward the exit status.
std::vector<std::pair<int, bool>> applicable_checks(const ExpectedProfile& e) {
  std::vector<std::pair<int, bool>> out;
  for (int c : {kLiftNorm, kLagrangian, kHorizontal}) out.emplace_back(c, true);
  if (e.asserted()) {
    if (e.marginally_trapped.value_or(false)) {
      out.emplace_back(kHLightlike, true);
      out.emplace_back(kHNonzero, true);
    }
    if (e.minimal.value_or(false)) out.emplace_back(kHZero, true);
    if (e.quasi_biharmonic.value_or(false)) {
      out.emplace_back(kTau2Lightlike, true);
      out.emplace_back(kTau2Nonzero, true);
    }
    if (e.biharmonic.value_or(false)) out.emplace_back(kTau2Zero, true);
    if (e.gauss_curvature) out.emplace_back(kGEqEps, true);
  }
  for (int c : {kRouteAgreement, kCodazzi, kGaussEq}) out.emplace_back(c, true);
  const bool mt = !e.asserted() || e.marginally_trapped.value_or(false);
  if (mt) {
    for (int c = kEq318; c <= kEq338; ++c) out.emplace_back(c, true);
  }
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::ordered_json point_json(const Eigen::Vector2d& p) { return nlohmann::ordered_json::array({p.x(), p.y()}); }

nlohmann::ordered_json params_json(const FamilyParams& params) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) j[k] = v;
  return j;
}

nlohmann::ordered_json flags_json(const ClassificationFlags& f) {
  return {{"lagrangian", f.lagrangian},
          {"horizontal", f.horizontal},
          {"marginally_trapped", f.marginally_trapped},
          {"minimal", f.minimal},
          {"biharmonic", f.biharmonic},
          {"quasi_biharmonic", f.quasi_biharmonic}};
}

const std::vector<std::string> kFlagNames = {"lagrangian", "horizontal", "marginally_trapped",
                                             "minimal",    "biharmonic", "quasi_biharmonic"};

bool flag_value(const ClassificationFlags& f, const std::string& name) {
  if (name == "lagrangian") return f.lagrangian;
  if (name == "horizontal") return f.horizontal;
  if (name == "marginally_trapped") return f.marginally_trapped;
  if (name == "minimal") return f.minimal;
  if (name == "biharmonic") return f.biharmonic;
  return f.quasi_biharmonic;
}

std::optional<bool> expected_flag(const ExpectedProfile& e, const std::string& name) {
  if (name == "marginally_trapped") return e.marginally_trapped;
  if (name == "minimal") return e.minimal;
  if (name == "biharmonic") return e.biharmonic;
  if (name == "quasi_biharmonic") return e.quasi_biharmonic;
  return std::nullopt;
}

}  // namespace

int worker_count(int requested) {
  int n = requested > 0 ? requested : int(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("QBH_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, n);
}

const std::vector<std::string>& check_registry() {
  static const std::vector<std::string> names = {
      "lift-norm", "lagrangian",       "horizontal", "H-lightlike",    "H-nonzero",  "H-zero",
      "tau2-lightlike", "tau2-nonzero", "tau2-zero",  "G-eq-eps",       "route-agreement", "codazzi",
      "gauss-eq",  "eq318",            "eq319",      "frame-codazzi", "laplacian-lemmas", "eq338"};
  return names;
}

bool VerificationReport::passed() const {
  if (error_points > 0) return false;
  if (expected.asserted() && !profile_match) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return !c.asserted || c.pass; });
}

const CheckRecord* VerificationReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

VerificationReport run_verify(const VerifyOptions& opts) {
  const auto start = Clock::now();
  if (opts.nx < 1 || opts.ny < 1) throw ParameterError("grid must have at least one point per axis");
  for (const auto& [name, value] : opts.check_tol) {
    const auto& reg = check_registry();
    if (std::find(reg.begin(), reg.end(), name) == reg.end()) throw ParameterError("unknown check: " + name);
    if (!(value >= 0.0)) throw ParameterError("check tolerance must be non-negative: " + name);
  }
  const FamilySpec fam = make_family(opts.family, opts.params, opts.window);

  VerificationReport rep;
  rep.family = fam.name;
  rep.params = fam.params;
  rep.ambient = fam.patch.ambient.kind;
  rep.window = fam.patch.window;
  rep.nx = opts.nx;
  rep.ny = opts.ny;
  rep.backend = opts.backend;
  rep.tol = opts.tol ? *opts.tol : (opts.backend.kind == Backend::jet ? 1e-8 : 1e-4);
  rep.expected = fam.expected;
  rep.threads = worker_count(opts.threads);

  const double expected_G = fam.expected.gauss_curvature.value_or(fam.patch.ambient.epsilon);
  const int n = opts.nx * opts.ny;
  rep.points.resize(std::size_t(n));
  parallel_for(n, rep.threads, [&](int k) {
    const Eigen::Vector2d p = rep.window.grid_point(k % opts.nx, k / opts.nx, opts.nx, opts.ny);
    rep.points[std::size_t(k)] = evaluate_point(fam, p, rep.backend, rep.tol, expected_G);
  });

  for (const auto& [c, asserted] : applicable_checks(fam.expected)) {
    CheckRecord rec;
    rec.name = check_registry()[std::size_t(c)];
    rec.asserted = asserted;
    const auto it = opts.check_tol.find(rec.name);
    if (lower_bound_check(c)) {
      rec.bound = it != opts.check_tol.end() ? it->second : default_bound(c);
      rec.tolerance = 0.0;
    } else {
      rec.tolerance = it != opts.check_tol.end() ? it->second : rep.tol;
    }
    double min_norm = std::numeric_limits<double>::infinity();
    for (const auto& pt : rep.points) {
      if (!pt.error.empty()) continue;
      const double v = pt.residuals[std::size_t(c)];
      if (std::isnan(v)) continue;
      ++rec.evaluated;
      const double res = lower_bound_check(c) ? std::max(0.0, *rec.bound - v) : v;
      if (lower_bound_check(c)) min_norm = std::min(min_norm, v);
      if (rec.evaluated == 1 || res > rec.max_abs_residual) {
        rec.max_abs_residual = res;
        rec.worst_point = pt.point;
      }
    }
    if (lower_bound_check(c) && rec.evaluated > 0) rec.min_norm = min_norm;
    rec.pass = rec.max_abs_residual <= rec.tolerance;
    // Frame checks need at least one marginally trapped point; recorded families may have none.
    if (frame_check(c) && rec.evaluated == 0) {
      if (!fam.expected.asserted()) continue;
      rec.pass = false;
    }
    rep.checks.push_back(rec);
  }

  for (const auto& f : kFlagNames) rep.flag_counts[f] = 0;
  for (const auto& pt : rep.points) {
    if (!pt.error.empty()) {
      ++rep.error_points;
      continue;
    }
    if (pt.indeterminate) ++rep.indeterminate_points;
    for (const auto& f : kFlagNames) rep.flag_counts[f] += flag_value(pt.flags, f) ? 1 : 0;
  }
  const int good = n - rep.error_points;
  for (const auto& f : kFlagNames) {
    const auto want = expected_flag(fam.expected, f);
    if (!want) continue;
    const int agree = *want ? rep.flag_counts[f] : good - rep.flag_counts[f];
    rep.expected_agreement[f] = agree;
    if (agree != good) rep.profile_match = false;
  }
  rep.elapsed_ms = ms_since(start);
  return rep;
}

nlohmann::ordered_json to_json(const VerificationReport& r) {
  using json = nlohmann::ordered_json;
  json j;
  j["schema"] = kReportSchema;
  j["command"] = "verify";
  j["family"] = {{"name", r.family}, {"params", params_json(r.params)}, {"ambient", std::string(to_string(r.ambient))}};
  j["grid"] = {{"nx", r.nx}, {"ny", r.ny}, {"window", {r.window.x0, r.window.x1, r.window.y0, r.window.y1}}};
  j["backend"] = {{"kind", r.backend.kind == Backend::jet ? "jet" : "fd"}};
  if (r.backend.kind == Backend::fd) j["backend"]["fd_step"] = r.backend.fd_step;
  j["tolerance"] = r.tol;

  json checks = json::array();
  for (const auto& c : r.checks) {
    json cj = {{"check_name", c.name},
               {"max_abs_residual", c.max_abs_residual},
               {"tolerance", c.tolerance},
               {"worst_point", point_json(c.worst_point)},
               {"evaluated", c.evaluated},
               {"asserted", c.asserted},
               {"pass", c.pass}};
    if (c.bound) cj["bound"] = *c.bound;
    if (c.min_norm) cj["min_norm"] = *c.min_norm;
    checks.push_back(cj);
  }
  j["checks"] = checks;

  json cls;
  cls["status"] = r.expected.asserted() ? "asserted" : "empirical";
  cls["points"] = int(r.points.size());
  cls["errors"] = r.error_points;
  cls["counts"] = json::object();
  for (const auto& f : kFlagNames) cls["counts"][f] = r.flag_counts.at(f);
  cls["indeterminate"] = r.indeterminate_points;
  json ind = json::array();
  for (const auto& pt : r.points) {
    if (pt.indeterminate) ind.push_back({{"point", point_json(pt.point)}, {"ambiguous", pt.ambiguous}});
  }
  cls["indeterminate_points"] = ind;
  json errs = json::array();
  for (const auto& pt : r.points) {
    if (!pt.error.empty()) errs.push_back({{"point", point_json(pt.point)}, {"error", pt.error}});
  }
  cls["error_points"] = errs;
  if (!r.points.empty()) {
    const auto& first = r.points.front();
    cls["sample"] = {{"point", point_json(first.point)},
                     {"flags", flags_json(first.flags)},
                     {"gauss_curvature", first.gauss_curvature},
                     {"mean_curvature_square", first.mean_curvature_square},
                     {"bitension_norm", first.bitension_norm},
                     {"bitension_square", first.bitension_square}};
  }
  j["classification"] = cls;

  json ex;
  ex["provenance"] = std::string(to_string(r.expected.provenance));
  ex["asserted"] = r.expected.asserted();
  json flags = json::object();
  for (const auto& f : kFlagNames) {
    const auto want = expected_flag(r.expected, f);
    if (want) flags[f] = {{"expected", *want}, {"agreeing_points", r.expected_agreement.at(f)}};
  }
  ex["flags"] = flags;
  if (r.expected.gauss_curvature) ex["gauss_curvature"] = *r.expected.gauss_curvature;
  if (!r.expected.note.empty()) ex["note"] = r.expected.note;
  ex["match"] = r.profile_match;
  j["expected"] = ex;
  j["pass"] = r.passed();
  j["timings"] = {{"total_ms", r.elapsed_ms}, {"threads", r.threads}};
  return j;
}

void write_csv(const VerificationReport& r, std::ostream& os) {
  os << "x,y";
  std::vector<int> cols;
  const auto& reg = check_registry();
  for (const auto& c : r.checks) {
    cols.push_back(int(std::find(reg.begin(), reg.end(), c.name) - reg.begin()));
    os << ',' << c.name;
  }
  os << '\n';
  os.precision(17);
  for (const auto& pt : r.points) {
    os << pt.point.x() << ',' << pt.point.y();
    for (int c : cols) {
      os << ',';
      if (pt.error.empty() && !std::isnan(pt.residuals[std::size_t(c)])) os << pt.residuals[std::size_t(c)];
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------

ConvergenceReport run_convergence(const ConvergenceOptions& opts) {
  const FamilySpec fam = make_family(opts.family, opts.params, opts.window);
  ConvergenceReport r = run_convergence(fam.patch, opts);
  r.family = fam.name;
  r.params = fam.params;
  return r;
}

ConvergenceReport run_convergence(const ImmersionPatch& patch, const ConvergenceOptions& opts) {
  const auto start = Clock::now();
  if (!(opts.h > 0.0)) throw ParameterError("convergence step must be positive");
  ConvergenceReport r;
  r.family = opts.family.empty() ? patch.name : opts.family;
  r.params = opts.params;
  r.h = opts.h;
  std::vector<Eigen::Vector2d> probes = opts.probes;
  if (probes.empty()) {
    const Window& w = patch.window;
    const Window inner{w.x0 + 0.25 * (w.x1 - w.x0), w.x1 - 0.25 * (w.x1 - w.x0), w.y0 + 0.25 * (w.y1 - w.y0),
                       w.y1 - 0.25 * (w.y1 - w.y0)};
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) probes.push_back(inner.grid_point(i, j, 3, 3));
    }
  }
  r.probes.resize(probes.size());
  parallel_for(int(probes.size()), worker_count(opts.threads), [&](int k) {
    ConvergenceProbe& pr = r.probes[std::size_t(k)];
    pr.point = probes[std::size_t(k)];
    pr.margin = patch.margin(pr.point);
    // The widest stencil reaches 2h from the probe.
    pr.ill_conditioned = pr.margin < 3.0 * opts.h;
    try {
      const VectorJet exact = patch_germ(patch, pr.point, {}, false);
      pr.value_scale = exact.value().cwiseAbs().maxCoeff();
      for (int step = 0; step < 3; ++step) {
        const BackendOptions fd{Backend::fd, opts.h / double(1 << step)};
        const VectorJet approx = patch_germ(patch, pr.point, fd, false);
        for (int level = 1; level <= 4; ++level) {
          double e = 0.0;
          for (int j = 0; j <= level; ++j) {
            e = std::max(e, (approx.partial(level - j, j) - exact.partial(level - j, j)).cwiseAbs().maxCoeff());
          }
          pr.errors[std::size_t(step)][std::size_t(level - 1)] = e;
        }
      }
    } catch (const std::exception& e) {
      pr.error = e.what();
      pr.ill_conditioned = true;
    }
  });

  // Rounding level of the finest sub-step (h / 4 inside each extrapolated estimate).
  double size = 0.0;
  for (const auto& pr : r.probes) size = std::max(size, pr.value_scale);
  for (int step = 0; step < 3; ++step) {
    const double fine = opts.h / double(1 << step) / 4.0;
    for (int level = 0; level < 4; ++level) {
      r.rounding_floor[std::size_t(step)][std::size_t(level)] =
          10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, size) / std::pow(fine, level + 1);
    }
  }
  for (int level = 0; level < 4; ++level) {
    std::vector<std::pair<double, double>> pts;  // (log h, log e)
    for (const auto& pr : r.probes) {
      if (pr.ill_conditioned) continue;
      for (int step = 0; step < 3; ++step) {
        const double e = pr.errors[std::size_t(step)][std::size_t(level)];
        r.max_error[std::size_t(step)][std::size_t(level)] = std::max(r.max_error[std::size_t(step)][std::size_t(level)], e);
      }
    }
    // Fit the per-step maxima; steps whose error is already at rounding level are left out.
    for (int step = 0; step < 3; ++step) {
      const double e = r.max_error[std::size_t(step)][std::size_t(level)];
      const double floor = r.rounding_floor[std::size_t(step)][std::size_t(level)];
      if (e > floor) pts.emplace_back(std::log(opts.h / double(1 << step)), std::log(e));
    }
    if (pts.size() < 2) continue;
    double mx = 0, my = 0;
    for (const auto& [x, y] : pts) mx += x, my += y;
    mx /= double(pts.size());
    my /= double(pts.size());
    double sxy = 0, sxx = 0;
    for (const auto& [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
    r.observed_order[std::size_t(level)] = sxy / sxx;
  }
  r.elapsed_ms = ms_since(start);
  return r;
}

nlohmann::ordered_json to_json(const ConvergenceReport& r) {
  using json = nlohmann::ordered_json;
  json j;
  j["schema"] = kReportSchema;
  j["command"] = "convergence";
  j["family"] = {{"name", r.family}, {"params", params_json(r.params)}};
  j["h"] = r.h;
  j["steps"] = {r.h, r.h / 2, r.h / 4};
  json probes = json::array();
  for (const auto& pr : r.probes) {
    json pj = {{"point", point_json(pr.point)}, {"margin", pr.margin}, {"ill_conditioned", pr.ill_conditioned}};
    if (!pr.error.empty()) pj["error"] = pr.error;
    json errs = json::array();
    for (const auto& row : pr.errors) errs.push_back(row);
    pj["errors"] = errs;
    probes.push_back(pj);
  }
  j["probes"] = probes;
  json levels = json::array();
  for (int level = 0; level < 4; ++level) {
    json lj = {{"derivative_level", level + 1}};
    lj["max_error"] = {r.max_error[0][std::size_t(level)], r.max_error[1][std::size_t(level)],
                       r.max_error[2][std::size_t(level)]};
    lj["rounding_floor"] = {r.rounding_floor[0][std::size_t(level)], r.rounding_floor[1][std::size_t(level)],
                            r.rounding_floor[2][std::size_t(level)]};
    lj["observed_order"] = r.observed_order[std::size_t(level)] ? json(*r.observed_order[std::size_t(level)]) : json();
    levels.push_back(lj);
  }
  j["levels"] = levels;
  j["timings"] = {{"total_ms", r.elapsed_ms}};
  return j;
}

// ---------------------------------------------------------------------------

CurveReport run_curve(const CurveOptions& opts) {
  const auto start = Clock::now();
  if (opts.samples < 1) throw ParameterError("need at least one sample");
  if (!(opts.t1 > opts.t0)) throw ParameterError("curve range must be increasing");
  CurveReport r;
  r.params = opts.params;
  r.t0 = opts.t0;
  r.t1 = opts.t1;
  auto sample_time = [&](int k) {
    return opts.samples == 1 ? opts.t0 : opts.t0 + (opts.t1 - opts.t0) * double(k) / double(opts.samples - 1);
  };
  if (opts.mode == CurveOptions::Mode::flat_null) {
    r.mode = "flat-null";
    for (const auto& [k, v] : opts.params) {
      if (k != "mu") throw ParameterError("unknown flat-null parameter: " + k);
    }
    const auto it = opts.params.find("mu");
    const double mu = it == opts.params.end() ? 1.0 : it->second;
    r.params["mu"] = mu;
    const CurveSpec c = make_flat_null_legendre(mu);
    for (int k = 0; k < opts.samples; ++k) r.samples.push_back(legendre_report(c, sample_time(k)));
  } else {
    r.mode = "remark12";
    double sigma = 1.0;
    FamilyParams poly;
    for (const auto& [k, v] : opts.params) {
      if (k == "sigma") {
        sigma = v;
      } else if (k == "f" || k == "delta" || ((k[0] == 'f' || k[0] == 'd') && k.size() == 2 && std::isdigit(k[1]))) {
        poly[k] = v;
      } else {
        throw ParameterError("unknown curve parameter: " + k);
      }
    }
    if (sigma != 1.0 && sigma != -1.0) throw ParameterError("sigma must be +1 or -1");
    const auto fc = polynomial_params(poly, "f", "f", {1.0});
    const auto dc = polynomial_params(poly, "d", "delta", {0.0});
    const LegendreStructure eq = LegendreStructure::from_family(polynomial(fc), polynomial(dc));
    const auto coeff = eq.coefficients(opts.t0, 0);
    const CurveState seed =
        seed_initial_data({3, 1}, sigma, coeff[0].value().imag(), coeff[1].value().real());
    r.step = opts.step;
    const SampledCurve curve =
        integrate_legendre_curve(eq, {3, 1}, sigma, seed, {opts.t0, opts.t1}, opts.step, opts.drift_bound);
    r.drift = curve.drift;
    const CurveSpec c = curve.spec("corrected-curve");
    for (int k = 0; k < opts.samples; ++k) {
      const double t = std::min(sample_time(k), curve.t1());
      r.samples.push_back(legendre_report(c, t));
      r.kappa_sq_expected.push_back(eq.kappa_sq(t));
      r.tau_hat_expected.push_back(eq.tau_hat(t));
    }
  }
  // Null curves of the flat family pair with z' to 1/mu instead of being Legendre.
  const bool flat = opts.mode == CurveOptions::Mode::flat_null;
  for (const auto& s : r.samples) {
    const double third = flat ? std::abs(s.pairing - 1.0 / r.params.at("mu")) : s.residual_legendre;
    r.max_residual = std::max({r.max_residual, s.residual_cone, s.residual_speed, third});
  }
  r.elapsed_ms = ms_since(start);
  return r;
}

nlohmann::ordered_json to_json(const CurveReport& r) {
  using json = nlohmann::ordered_json;
  json j;
  j["schema"] = kReportSchema;
  j["command"] = "curve";
  j["mode"] = r.mode;
  j["params"] = params_json(r.params);
  j["range"] = {r.t0, r.t1};
  if (r.drift) j["step"] = r.step;
  json samples = json::array();
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    const auto& s = r.samples[k];
    json sj = {{"t", s.t},
               {"residual_cone", s.residual_cone},
               {"residual_speed", s.residual_speed},
               {"residual_legendre", s.residual_legendre},
               {"residual_special", s.residual_special},
               {"kappa_sq", s.kappa_sq},
               {"tau_hat", s.tau_hat},
               {"pairing", s.pairing}};
    if (k < r.kappa_sq_expected.size()) {
      sj["kappa_sq_expected"] = r.kappa_sq_expected[k];
      sj["tau_hat_expected"] = r.tau_hat_expected[k];
    }
    samples.push_back(sj);
  }
  j["samples"] = samples;
  j["max_residual"] = r.max_residual;
  if (r.drift) {
    j["drift"] = {{"cone", r.drift->cone},
                  {"speed", r.drift->speed},
                  {"legendre", r.drift->legendre},
                  {"max", r.drift->max()},
                  {"bound", r.drift->bound},
                  {"flagged", r.drift->flagged}};
  }
  j["timings"] = {{"total_ms", r.elapsed_ms}};
  return j;
}

void write_csv(const CurveReport& r, std::ostream& os) {
  os << "t,residual_cone,residual_speed,residual_legendre,residual_special,kappa_sq,tau_hat,pairing\n";
  os.precision(17);
  for (const auto& s : r.samples) {
    os << s.t << ',' << s.residual_cone << ',' << s.residual_speed << ',' << s.residual_legendre << ','
       << s.residual_special << ',' << s.kappa_sq << ',' << s.tau_hat << ',' << s.pairing << '\n';
  }
}

}  // namespace qbh
