#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include "qbh/verify.hpp"

using namespace qbh;

namespace {

VerificationReport verify(const std::string& family, const FamilyParams& params = {}, int n = 7, int threads = 0) {
  VerifyOptions o;
  o.family = family;
  o.params = params;
  o.nx = o.ny = n;
  o.threads = threads;
  return run_verify(o);
}

nlohmann::ordered_json without_timings(nlohmann::ordered_json j) {
  j.erase("timings");
  return j;
}

}  // namespace

TEST_CASE("thm9-i passes every listed check") {
  VerifyOptions o;
  o.family = "thm9-i";
  o.params = {{"a", 1.0}};
  o.window = Window{0.3, 1.3, 0.3, 1.3};
  o.tol = 1e-8;
  const VerificationReport r = run_verify(o);
  CHECK(r.passed());
  CHECK(r.points.size() == 21u * 21u);
  CHECK(r.error_points == 0);
  CHECK(r.indeterminate_points == 0);
  CHECK(r.profile_match);
  for (const char* name : {"lift-norm", "lagrangian", "horizontal", "H-lightlike", "tau2-lightlike", "tau2-nonzero",
                           "G-eq-eps", "route-agreement", "codazzi", "gauss-eq", "eq318", "eq319", "eq338"}) {
    const CheckRecord* c = r.check(name);
    REQUIRE_MESSAGE(c != nullptr, name);
    INFO(name);
    CHECK(c->pass);
    CHECK(c->asserted);
    CHECK(c->evaluated == 441);
    CHECK(c->max_abs_residual <= c->tolerance);
  }
  CHECK(r.check("tau2-nonzero")->min_norm.value() >= 1e-3);
  CHECK(r.flag_counts.at("quasi_biharmonic") == 441);
}

TEST_CASE("plane is minimal everywhere") {
  const VerificationReport r = verify("plane-minimal");
  CHECK(r.passed());
  CHECK(r.flag_counts.at("minimal") == int(r.points.size()));
  REQUIRE(r.check("tau2-zero") != nullptr);
  CHECK(r.check("tau2-zero")->pass);
  CHECK(r.check("eq318") == nullptr);
}

TEST_CASE("empirical family records without asserting the profile") {
  const VerificationReport r = verify("thm9-iii", {{"b", 1.0}});
  CHECK(r.passed());
  CHECK_FALSE(r.expected.asserted());
  const auto j = to_json(r);
  CHECK(j["classification"]["status"] == "empirical");
  CHECK(j["expected"]["provenance"] == "paper-corrected");
  CHECK(r.check("tau2-lightlike") == nullptr);
  CHECK(r.check("route-agreement")->pass);
}

TEST_CASE("report layout") {
  const VerificationReport r = verify("thm7-flat-qbh", {}, 5);
  const auto j = to_json(r);
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["command"] == "verify");
  CHECK(j["family"]["name"] == "thm7-flat-qbh");
  CHECK(j["family"]["ambient"] == "FlatC21");
  CHECK(j["grid"]["nx"] == 5);
  CHECK(j["backend"]["kind"] == "jet");
  CHECK(j["pass"] == true);
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("check_name"));
    CHECK(c["worst_point"].size() == 2);
    CHECK(c["pass"] == (c["max_abs_residual"].get<double>() <= c["tolerance"].get<double>()));
  }
  // checks appear in registry order
  const auto& reg = check_registry();
  std::size_t last = 0;
  for (const auto& c : r.checks) {
    const auto at = std::size_t(std::find(reg.begin(), reg.end(), c.name) - reg.begin());
    CHECK(at < reg.size());
    CHECK(at >= last);
    last = at;
  }
}

TEST_CASE("reports do not depend on the thread count") {
  const auto a = without_timings(to_json(verify("thm10-i", {}, 6, 1)));
  const auto b = without_timings(to_json(verify("thm10-i", {}, 6, 4)));
  CHECK(a.dump() == b.dump());
}

TEST_CASE("tolerance overrides") {
  VerifyOptions o;
  o.family = "thm9-i";
  o.nx = o.ny = 3;
  o.check_tol = {{"route-agreement", 1e-30}};
  const VerificationReport r = run_verify(o);
  CHECK_FALSE(r.check("route-agreement")->pass);
  CHECK(r.check("route-agreement")->tolerance == 1e-30);
  CHECK_FALSE(r.passed());

  o.check_tol = {{"tau2-nonzero", 1e6}};
  const VerificationReport big = run_verify(o);
  CHECK(big.check("tau2-nonzero")->bound == 1e6);
  CHECK_FALSE(big.check("tau2-nonzero")->pass);
}

TEST_CASE("per-point CSV") {
  const VerificationReport r = verify("thm9-i", {}, 3);
  std::ostringstream os;
  write_csv(r, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  std::string expect = "x,y";
  for (const auto& c : r.checks) expect += "," + c.name;
  CHECK(header == expect);
  int rows = 0;
  for (std::string line; std::getline(is, line);) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == int(r.checks.size()) + 1);
  }
  CHECK(rows == 9);
}

TEST_CASE("unknown family and bad window") {
  VerifyOptions o;
  o.family = "thm12";
  CHECK_THROWS_AS(run_verify(o), FamilyError);
  o.family = "thm10-i";
  o.window = Window{0.5, 1.5, 0.2, 0.8};
  CHECK_THROWS_AS(run_verify(o), FamilyError);
}

TEST_CASE("finite-difference backend") {
  VerifyOptions o;
  o.family = "thm9-i";
  o.nx = o.ny = 3;
  o.backend.kind = Backend::fd;
  const VerificationReport r = run_verify(o);
  CHECK(r.tol == 1e-4);
  CHECK(to_json(r)["backend"]["fd_step"] == 2e-2);
  CHECK(r.check("lift-norm")->pass);
  CHECK(r.check("lagrangian")->pass);
  CHECK(r.check("H-lightlike")->pass);
}

TEST_CASE("convergence toward jet values") {
  ConvergenceOptions o;
  o.family = "thm9-i";
  o.params = {{"a", 1.0}};
  const ConvergenceReport r = run_convergence(o);
  CHECK(r.probes.size() == 9);
  REQUIRE(r.observed_order[1].has_value());
  CHECK(*r.observed_order[1] >= 2.0);
  CHECK(*r.observed_order[0] >= 2.0);
  for (const auto& p : r.probes) CHECK_FALSE(p.ill_conditioned);
  CHECK(to_json(r)["schema"] == kReportSchema);
}

TEST_CASE("constant map has no finite-difference error") {
  ImmersionPatch p;
  p.name = "constant";
  p.ambient = AmbientSpec::flat();
  p.window = Window{0.0, 1.0, 0.0, 1.0};
  p.map = [](const ComplexJet& x, const ComplexJet&) {
    const ComplexJet c = ComplexJet::constant(cd(1.5, -0.5), 2, x.order());
    return stack({c, c});
  };
  ConvergenceOptions o;
  o.family = "constant";
  const ConvergenceReport r = run_convergence(p, o);
  for (const auto& pr : r.probes) {
    for (const auto& row : pr.errors) {
      for (double e : row) CHECK(e == 0.0);
    }
  }
  for (const auto& ord : r.observed_order) CHECK_FALSE(ord.has_value());
}

TEST_CASE("near-singular probes are flagged and left out of the fit") {
  ConvergenceOptions o;
  o.family = "thm10-i";
  o.probes = {{1.5, 0.5}, {1.02, 1.0}};
  const ConvergenceReport r = run_convergence(o);
  REQUIRE(r.probes.size() == 2);
  CHECK_FALSE(r.probes[0].ill_conditioned);
  CHECK(r.probes[1].ill_conditioned);
  CHECK(std::abs(r.probes[1].margin - 0.02) <= 1e-9);
  const auto j = to_json(r);
  CHECK(j["probes"][1]["ill_conditioned"] == true);
}

TEST_CASE("curve reports") {
  CurveOptions flat;
  flat.params = {{"mu", 1.0}};
  const CurveReport a = run_curve(flat);
  CHECK(a.samples.size() == 50);
  for (const auto& s : a.samples) CHECK(std::abs(s.pairing - 1.0) <= 1e-13);
  CHECK(a.max_residual <= 1e-13);
  CHECK_FALSE(a.drift.has_value());

  CurveOptions rem;
  rem.mode = CurveOptions::Mode::corrected;
  rem.params = {{"f", 1.0}, {"delta", 0.0}};
  rem.t1 = 0.5;
  const CurveReport b = run_curve(rem);
  REQUIRE(b.drift.has_value());
  CHECK(b.drift->max() <= 1e-8);
  for (std::size_t i = 0; i < b.samples.size(); ++i) {
    CHECK(std::abs(b.samples[i].kappa_sq - 6.0) <= 1e-6);
    CHECK(std::abs(b.kappa_sq_expected[i] - 6.0) <= 1e-12);
    CHECK(std::abs(b.samples[i].tau_hat + 8.0 * std::sqrt(2.0)) <= 1e-5);
  }

  rem.params = {{"f", 0.0}, {"delta", 0.0}};
  for (const auto& s : run_curve(rem).samples) CHECK(std::abs(s.kappa_sq) <= 1e-12);

  rem.params = {{"f", 1.0}, {"sigma", -1.0}};
  CHECK_THROWS_AS(run_curve(rem), ParameterError);
  flat.params = {{"mu", 0.0}};
  CHECK_THROWS_AS(run_curve(flat), ParameterError);

  std::ostringstream os;
  write_csv(a, os);
  CHECK(os.str().rfind("t,residual_cone,residual_speed,residual_legendre,residual_special,kappa_sq,tau_hat,pairing\n", 0) ==
        0);
}

TEST_CASE("thread cap") {
  setenv("QBH_THREADS", "2", 1);
  CHECK(worker_count(8) == 2);
  CHECK(worker_count(1) == 1);
  CHECK(worker_count(0) <= 2);
  unsetenv("QBH_THREADS");
  CHECK(worker_count(3) == 3);
}
