// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qbh/adapted_frame.hpp"
#include "qbh/curves.hpp"
#include "qbh/families.hpp"
#include "qbh/geometry.hpp"
#include "qbh/verify.hpp"
#include "snapshot.hpp"

using namespace qbh;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::vector<Eigen::Vector2d> grid(const Window& w, int n = 21) {
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) pts.push_back(w.grid_point(i, j, n, n));
  }
  return pts;
}

ImmersionPatch family(const std::string& name, const FamilyParams& params = {}) {
  return make_family(name, params).patch;
}

const std::vector<std::string>& trapped_families() {
  static const std::vector<std::string> names = {"thm6-flat-biharmonic", "thm7-flat-qbh", "thm9-i",  "thm9-ii",
                                                 "thm9-corrected",       "thm10-i",       "thm10-ii"};
  return names;
}

const std::vector<std::string>& instantiable_families() {
  static const std::vector<std::string> names = {
      "thm6-flat-biharmonic", "thm7-flat-qbh", "thm9-i",  "thm9-ii",   "thm9-iii",     "thm9-corrected",
      "thm10-i",              "thm10-ii",      "thm10-iii", "plane-minimal"};
  return names;
}

// Largest pairwise discrepancy among the bitension routes, relative to 1 + |tau2|. Frame routes
// join only where the surface is marginally trapped.
double route_spread(const SurfaceGerm& germ) {
  std::vector<Eigen::VectorXcd> t{bitension_direct(germ), bitension_via_laplacian(germ)};
  try {
    t.push_back(bitension_from_frame(build_adapted_frame(germ, 1.0)));
    t.push_back(bitension_from_frame(build_adapted_frame(germ, 2.0)));
  } catch (const NotMarginallyTrappedError&) {
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) worst = std::max(worst, (t[i] - t[j]).norm());
  }
  return worst / (1.0 + t[0].norm());
}

Outcome criterion1() {
  Outcome o;
  const std::vector<std::pair<std::string, FamilyParams>> cases = {
      {"thm9-i", {{"a", 1.0}}}, {"thm10-i", {{"a", 1.0}}}, {"thm7-flat-qbh", {{"mu", 1.0}}}, {"thm6-flat-biharmonic", {}}};
  for (const auto& [name, params] : cases) {
    const ImmersionPatch p = family(name, params);
    double worst = 0.0;
    for (const auto& pt : grid(p.window)) worst = std::max(worst, route_spread(SurfaceGerm::at(p, pt)));
    o.detail << " " << name << "=" << worst;
    o.require(worst <= 1e-7, name);
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  const std::vector<std::pair<std::string, double>> cases = {{"thm9-i", 1.0}, {"thm10-i", -1.0}, {"thm7-flat-qbh", 0.0}};
  for (const auto& [name, G] : cases) {
    const ImmersionPatch p = family(name);
    const int s = p.ambient.lift_index;
    double tt = 0.0, hh = 0.0, dG = 0.0, min_tau = INFINITY, min_H = INFINITY;
    for (const auto& pt : grid(p.window)) {
      const SurfaceGerm germ = SurfaceGerm::at(p, pt);
      const Eigen::VectorXcd tau2 = bitension_direct(germ);
      const Eigen::VectorXcd H = germ.mean_curvature().value();
      tt = std::max(tt, std::abs(metric(tau2, tau2, s)));
      hh = std::max(hh, std::abs(metric(H, H, s)));
      dG = std::max(dG, std::abs(gauss_curvature(germ) - G));
      min_tau = std::min(min_tau, tau2.norm());
      min_H = std::min(min_H, H.norm());
    }
    o.detail << " " << name << ": |<t2,t2>|=" << tt << " min|t2|=" << min_tau << " |<H,H>|=" << hh
             << " min|H|=" << min_H << " |G - (" << G << ")|=" << dG << ";";
    o.require(tt <= 1e-8 && min_tau >= 1e-3 && hh <= 1e-10 && min_H > 1e-3 && dG <= 1e-8, name);
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  const ImmersionPatch p = family("thm6-flat-biharmonic");
  double worst = 0.0;
  int trapped = 0, total = 0;
  for (const auto& pt : grid(p.window)) {
    const ClassificationReport r = classify_point(p, pt);
    worst = std::max(worst, r.bitension.tau2_direct.norm());
    trapped += r.flags.marginally_trapped ? 1 : 0;
    ++total;
  }
  o.detail << " max|t2|=" << worst << " marginally trapped " << trapped << "/" << total;
  o.require(worst <= 1e-8, "tau2");
  o.require(trapped == total, "flags");
  return o;
}

Outcome criterion4() {
  Outcome o;
  for (const auto& name : trapped_families()) {
    const ImmersionPatch p = family(name);
    double id = 0.0, lem = 0.0;
    for (const auto& pt : grid(p.window)) {
      const SurfaceGerm germ = SurfaceGerm::at(p, pt);
      const double G = gauss_curvature(germ);
      for (double gauge : {1.0, 2.0}) {
        const AdaptedFrame f = build_adapted_frame(germ, gauge);
        id = std::max(id, frame_identity_residuals(f, G, germ.epsilon()).max());
        lem = std::max(lem, lemma_residuals(f, germ).max());
      }
    }
    o.detail << " " << name << ": " << id << "/" << lem << ";";
    o.require(id <= 1e-8 && lem <= 1e-7, name);
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& name : instantiable_families()) {
    const ImmersionPatch p = family(name);
    for (const auto& pt : grid(p.window)) {
      const StructuralResiduals s = structural_residuals(SurfaceGerm::at(p, pt));
      const double m = std::max(s.gauss, s.codazzi);
      if (m > worst) {
        worst = m;
        worst_name = name;
      }
    }
  }
  o.detail << " max gauss/codazzi=" << worst << " (" << worst_name << ")";
  o.require(worst <= 1e-7, "structure equations");

  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  for (const char* name : {"thm9-i", "thm10-i"}) {
    const ImmersionPatch p = family(name);
    const AmbientSpec amb = p.ambient;
    double curv = 0.0;
    for (const auto& pt : grid(p.window, 3)) {
      const Eigen::VectorXcd L = p.evaluate(pt.x(), pt.y());
      auto horizontal = [&] {
        Eigen::VectorXcd w(L.size());
        for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = cd(N(rng), N(rng));
        return horizontal_projection(amb, L, w);
      };
      const Eigen::VectorXcd X = horizontal(), Y = horizontal(), Z = horizontal();
      const Eigen::VectorXcd expect = space_form_curvature(amb.epsilon, X, Y, Z, amb.lift_index);
      curv = std::max(curv, (connection_curvature(amb, L, X, Y, Z) - expect).norm() / (1.0 + expect.norm()));
    }
    o.detail << " curvature eps=" << amb.epsilon << ": " << curv;
    o.require(curv <= 1e-7, "connection curvature");
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const ImmersionPatch t7 = family("thm7-flat-qbh", {{"mu", 1.0}});
  double bc = 0.0, k7 = INFINITY;
  for (const auto& pt : grid(t7.window)) {
    const AdaptedFrame f = build_adapted_frame(SurfaceGerm::at(t7, pt));
    bc = std::max(bc, std::abs(f.b - f.c));
    k7 = std::min(k7, std::abs(f.a - 2 * f.b - f.c));
  }
  o.detail << " thm7: max|b-c|=" << bc << " min|a-2b-c|=" << k7;
  o.require(bc <= 1e-9 && k7 >= 1e-3, "thm7");
  for (const char* name : {"thm9-i", "thm10-i"}) {
    const ImmersionPatch p = family(name, {{"a", 1.0}});
    double k = 0.0;
    for (const auto& pt : grid(p.window)) {
      const AdaptedFrame f = build_adapted_frame(SurfaceGerm::at(p, pt));
      k = std::max(k, std::abs(f.a - 2 * f.b - f.c));
    }
    o.detail << " " << name << ": max|a-2b-c|=" << k;
    o.require(k <= 1e-8, name);
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> T(-10.0, 10.0);
  double flat = 0.0;
  for (double mu : {1.0, -2.0, 0.5}) {
    const CurveSpec c = make_flat_null_legendre(mu);
    const double k = 1.0 / (2.0 * mu);
    for (int i = 0; i < 50; ++i) {
      const double t = T(rng);
      const LegendreReport r = legendre_report(c, t);
      const auto d = c.at(t, 2);
      flat = std::max({flat, r.residual_cone, r.residual_speed, std::abs(r.pairing - 1.0 / mu),
                       (d[2] + k * k * d[0]).norm()});
    }
  }
  o.detail << " flat-null=" << flat;
  o.require(flat <= 1e-13, "flat null residuals");

  const CurveState init = seed_corrected_initial_data(1.0);
  const SampledCurve c =
      integrate_corrected_curve(polynomial({1.0}), polynomial({0.0}), init, {0.0, 0.5}, 1e-3, 1e-8);
  const CurveSpec spec = c.spec("f=1");
  double dk = 0.0, dt = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const LegendreReport r = legendre_report(spec, 0.5 * i / 100.0);
    dk = std::max(dk, std::abs(r.kappa_sq - 6.0));
    dt = std::max(dt, std::abs(r.tau_hat + 8.0 * std::sqrt(2.0)));
  }
  o.detail << " |k2-6|=" << dk << " |tau+8sqrt2|=" << dt << " drift=" << c.drift.max();
  o.require(dk <= 1e-6 && dt <= 1e-5, "invariants");
  o.require(c.drift.max() <= 1e-8 && !c.drift.flagged, "drift");

  // endpoint error against the closed-form solution z = A + (B + C t) e^{m t}, m = i sqrt2
  const cd m(0.0, std::sqrt(2.0));
  const Eigen::VectorXcd C = (init.ddz - m * init.dz) / m;
  const Eigen::VectorXcd B = (init.dz - C) / m;
  const Eigen::VectorXcd A = init.z - B;
  const Eigen::VectorXcd exact = A + (B + C * 0.5) * std::exp(m * 0.5);
  std::array<double, 2> err{};
  for (int k = 0; k < 2; ++k) {
    const SampledCurve s =
        integrate_corrected_curve(polynomial({1.0}), polynomial({0.0}), init, {0.0, 0.5}, 0.02 / (1 << k));
    err[k] = (s.nodes().back().z - exact).norm();
  }
  const double ratio = err[0] / err[1];
  o.detail << " halving ratio=" << ratio << " (order " << std::log2(ratio) << ")";
  o.require(ratio >= 14.0, "step halving");
  return o;
}

Outcome criterion8() {
  Outcome o;
  for (const auto& name : snapshot::families()) {
    const ExpectedProfile e = expected_profile(name);
    const std::string prov(to_string(e.provenance));
    o.require(prov == "paper-corrected" || prov == "empirical", name + " provenance");
    try {
      const ImmersionPatch p = family(name);
      double worst = 0.0;
      for (const auto& pt : grid(p.window)) worst = std::max(worst, route_spread(SurfaceGerm::at(p, pt)));
      o.detail << " " << name << "=" << worst;
      o.require(worst <= 1e-7, name);
    } catch (const FamilyError&) {
      o.detail << " " << name << "=no instance";
    }
  }
  const auto mismatches = snapshot::check();
  o.detail << " snapshot mismatches=" << mismatches.size();
  o.require(mismatches.empty(), mismatches.empty() ? "" : mismatches.front());
  return o;
}

Outcome criterion9() {
  Outcome o;
  ConvergenceOptions opts;
  opts.family = "thm9-i";
  opts.params = {{"a", 1.0}};
  const ConvergenceReport r = run_convergence(opts);
  for (int level = 0; level < 4; ++level) {
    o.detail << " level " << level + 1 << ": ";
    if (r.observed_order[std::size_t(level)]) {
      o.detail << *r.observed_order[std::size_t(level)];
    } else {
      o.detail << "rounding";
    }
  }
  o.require(r.observed_order[1].has_value() && *r.observed_order[1] >= 2.0, "second derivatives");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"route agreement", criterion1},         {"quasi-biharmonic verification", criterion2},
      {"biharmonic verification", criterion3}, {"frame identities", criterion4},
      {"structure equations", criterion5},     {"proof-route invariants", criterion6},
      {"curve suite", criterion7},             {"consistency snapshot", criterion8},
      {"finite-difference fallback", criterion9}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= 10.0) {
      o.pass = false;
      o.detail << " [over 10 s]";
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %zu (%s, %.2f s):%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.str().c_str());
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
