#include <doctest.h>

#include <cmath>

#include "qbh/adapted_frame.hpp"
#include "qbh/families.hpp"

using namespace qbh;

namespace {

ImmersionPatch family(const std::string& name, const FamilyParams& params = {}) {
  return make_family(name, params).patch;
}

std::vector<Eigen::Vector2d> grid(const Window& w, int n) {
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) pts.push_back(w.grid_point(i, j, n, n));
  }
  return pts;
}

const std::vector<std::string> kTrapped = {"thm6-flat-biharmonic", "thm7-flat-qbh", "thm9-i",  "thm9-ii",
                                           "thm9-corrected",       "thm10-i",       "thm10-ii"};

}  // namespace

TEST_CASE("frame reconstruction on the flat quasi-biharmonic family") {
  const ImmersionPatch p = family("thm7-flat-qbh");
  for (const auto& pt : grid(p.window, 5)) {
    const AdaptedFrame f = build_adapted_frame(SurfaceGerm::at(p, pt));
    INFO(pt.transpose());
    CHECK(f.reconstruction_residual <= 1e-10);
    CHECK(f.orthonormality_residual <= 1e-12);
    CHECK(f.mean_curvature_residual <= 1e-10);
    CHECK(f.alpha > 0.0);
  }
}

TEST_CASE("frame rejects surfaces that are not marginally trapped") {
  const SurfaceGerm plane = SurfaceGerm::at(family("plane-minimal"), {0.5, 0.5});
  try {
    (void)build_adapted_frame(plane);
    FAIL("expected rejection");
  } catch (const NotMarginallyTrappedError& e) {
    CHECK(e.diagnostic() == 0.0);
  }
  CHECK_THROWS_AS(build_adapted_frame(SurfaceGerm::at(family("thm9-iii"), {0.8, 0.8})), NotMarginallyTrappedError);
  CHECK_THROWS_AS(build_adapted_frame(SurfaceGerm::at(family("thm7-flat-qbh"), {0.5, 0.5}), 0.0), ParameterError);
}

TEST_CASE("frame rejects a non-Lagrangian surface") {
  // generic map, not Lagrangian
  ImmersionPatch p;
  p.name = "twisted";
  p.ambient = AmbientSpec::flat();
  p.map = [](const ComplexJet& x, const ComplexJet& y) {
    return stack({x * 2.0 + y * y * cd(0, 1), y + x * x * cd(0, 1) + x * y * 0.3});
  };
  const SurfaceGerm g = SurfaceGerm::at(p, {0.2, 0.3});
  bool rejected = false;
  try {
    (void)build_adapted_frame(g, 1.0, 1e-8);
  } catch (const NotMarginallyTrappedError&) {
    rejected = true;
  } catch (const LagrangianViolationError& e) {
    rejected = true;
    CHECK(e.residual() > 1e-8);
  }
  CHECK(rejected);
}

TEST_CASE("frame identities on every marginally trapped family") {
  for (const auto& name : kTrapped) {
    const ImmersionPatch p = family(name);
    for (const auto& pt : grid(p.window, 4)) {
      const SurfaceGerm germ = SurfaceGerm::at(p, pt);
      const double G = gauss_curvature(germ);
      for (double gauge : {1.0, 2.0}) {
        const AdaptedFrame f = build_adapted_frame(germ, gauge);
        const FrameIdentityResiduals r = frame_identity_residuals(f, G, germ.epsilon());
        const LemmaResiduals l = lemma_residuals(f, germ);
        INFO(name, " at ", pt.transpose(), " gauge ", gauge);
        CHECK(f.reconstruction_residual <= 1e-9);
        CHECK(r.trace_ac <= 1e-9);
        CHECK(r.trace_bd <= 1e-9);
        CHECK(r.gauss <= 1e-8);
        CHECK(r.max() <= 1e-8);
        CHECK(l.max() <= 1e-7);
      }
    }
  }
}

TEST_CASE("frame bitension is gauge invariant and agrees with the direct route") {
  for (const auto& name : kTrapped) {
    const ImmersionPatch p = family(name);
    for (const auto& pt : grid(p.window, 3)) {
      const SurfaceGerm germ = SurfaceGerm::at(p, pt);
      const Eigen::VectorXcd direct = bitension_direct(germ);
      const Eigen::VectorXcd t1 = bitension_from_frame(build_adapted_frame(germ, 1.0));
      const Eigen::VectorXcd t2 = bitension_from_frame(build_adapted_frame(germ, 2.0));
      const Eigen::VectorXcd t3 = bitension_from_frame(build_adapted_frame(germ, 0.3));
      INFO(name, " at ", pt.transpose());
      CHECK((t1 - t2).norm() <= 1e-9 * (1.0 + t1.norm()));
      CHECK((t1 - t3).norm() <= 1e-9 * (1.0 + t1.norm()));
      CHECK((t1 - direct).norm() <= 1e-7 * (1.0 + direct.norm()));
    }
  }
}

TEST_CASE("gauge scales alpha and the null direction") {
  const SurfaceGerm germ = SurfaceGerm::at(family("thm9-i"), {0.6, 0.9});
  const AdaptedFrame f1 = build_adapted_frame(germ, 1.0);
  const AdaptedFrame f2 = build_adapted_frame(germ, 2.0);
  CHECK(std::abs(f2.alpha - 2.0 * f1.alpha) <= 1e-12 * f1.alpha);
  CHECK((f1.e[0] + f1.e[1] - 2.0 * (f2.e[0] + f2.e[1])).norm() <= 1e-12 * f1.e[0].norm());
  CHECK(std::abs(f2.a + f2.c - 2.0 * f2.alpha) <= 1e-10);
  // (a - 2b - c)(c - b) is boost invariant: it is G - eps
  CHECK(std::abs((f2.a - 2 * f2.b - f2.c) * (f2.c - f2.b) - (f1.a - 2 * f1.b - f1.c) * (f1.c - f1.b)) <= 1e-9);
}

TEST_CASE("proof-route invariants") {
  const ImmersionPatch t7 = family("thm7-flat-qbh");
  for (const auto& pt : grid(t7.window, 5)) {
    const AdaptedFrame f = build_adapted_frame(SurfaceGerm::at(t7, pt));
    INFO(pt.transpose());
    CHECK(std::abs(f.b - f.c) <= 1e-9);
    CHECK(std::abs(f.a - 2 * f.b - f.c) >= 1e-3);
  }
  for (const char* name : {"thm9-i", "thm10-i", "thm9-corrected"}) {
    const ImmersionPatch p = family(name);
    for (const auto& pt : grid(p.window, 5)) {
      const AdaptedFrame f = build_adapted_frame(SurfaceGerm::at(p, pt));
      INFO(name, " at ", pt.transpose());
      CHECK(std::abs(f.a - 2 * f.b - f.c) <= 1e-8);
    }
  }
}

TEST_CASE("biharmonic instance has vanishing frame bitension") {
  const ImmersionPatch p = family("thm6-flat-biharmonic");
  for (const auto& pt : grid(p.window, 4)) {
    CHECK(bitension_from_frame(build_adapted_frame(SurfaceGerm::at(p, pt))).norm() <= 1e-7);
  }
}

TEST_CASE("connection form matches the Gauss curvature on the flat family") {
  const ImmersionPatch p = family("thm7-flat-qbh");
  const SurfaceGerm germ = SurfaceGerm::at(p, {0.3, 0.7});
  const AdaptedFrame f = build_adapted_frame(germ);
  const FrameIdentityResiduals r = frame_identity_residuals(f, gauss_curvature(germ), 0.0);
  CHECK(r.connection_gauss <= 1e-10);
  const LemmaResiduals l = lemma_residuals(f, germ);
  CHECK(l.normal_laplacian <= 1e-8);
}
