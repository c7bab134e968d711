#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("qbh_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(QBH_EXE) + " " + args + " >" + (scratch() / "stdout").string() + " 2>" +
                          (scratch() / "stderr").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

json load(const fs::path& p) { return json::parse(read(p)); }

}  // namespace

TEST_CASE("verify succeeds on the quasi-biharmonic family") {
  const fs::path out = scratch() / "r.json";
  CHECK(run("verify --family thm9-i --param a=1 --grid 21x21 --window 0.3:1.3,0.3:1.3 --backend jet --tol 1e-8 --out " +
            out.string()) == 0);
  const json r = load(out);
  CHECK(r["pass"] == true);
  std::set<std::string> passed;
  for (const auto& c : r["checks"]) {
    if (c["pass"] == true) passed.insert(c["check_name"].get<std::string>());
  }
  for (const char* name : {"lift-norm", "lagrangian", "horizontal", "H-lightlike", "tau2-lightlike", "tau2-nonzero",
                           "G-eq-eps", "route-agreement", "codazzi", "gauss-eq", "eq318", "eq319", "eq338"}) {
    CHECK_MESSAGE(passed.count(name) == 1, name);
  }
}

TEST_CASE("verify output for minimal and empirical families") {
  const fs::path out = scratch() / "plane.json";
  const fs::path csv = scratch() / "plane.csv";
  CHECK(run("verify --family plane-minimal --grid 5x5 --out " + out.string() + " --csv " + csv.string()) == 0);
  const json r = load(out);
  CHECK(r["classification"]["counts"]["minimal"] == 25);
  bool tau2_zero = false;
  for (const auto& c : r["checks"]) tau2_zero |= c["check_name"] == "tau2-zero" && c["pass"] == true;
  CHECK(tau2_zero);
  CHECK(read(csv).rfind("x,y,lift-norm", 0) == 0);

  CHECK(run("verify --family thm9-iii --param b=1 --grid 5x5 --out " + (scratch() / "e.json").string()) == 0);
  CHECK(load(scratch() / "e.json")["classification"]["status"] == "empirical");
}

TEST_CASE("report goes to stdout without --out") {
  CHECK(run("verify --family thm7-flat-qbh --grid 3x3") == 0);
  CHECK(json::parse(read(scratch() / "stdout"))["family"]["name"] == "thm7-flat-qbh");
}

TEST_CASE("failed checks exit 1 with the report written") {
  const fs::path out = scratch() / "fail.json";
  fs::remove(out);
  CHECK(run("verify --family thm9-i --grid 3x3 --tol-check route-agreement=1e-30 --out " + out.string()) == 1);
  REQUIRE(fs::exists(out));
  CHECK(load(out)["pass"] == false);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("verify") == 2);
  CHECK(run("verify --family thm9-i --grid 0x3") == 2);
  CHECK(run("verify --family thm9-i --grid 3by3") == 2);
  CHECK(run("verify --family thm9-i --window 1:0,0:1") == 2);
  CHECK(run("verify --family thm9-i --backend gpu") == 2);
  CHECK(run("verify --family thm9-i --param a") == 2);
  CHECK(run("verify --family thm9-i --tol-check nonsense=1") == 2);
  CHECK(run("curve --range 0:1") == 2);
  CHECK(run("curve --flat-null mu=1 --remark12 f=1") == 2);
}

TEST_CASE("family errors exit 3") {
  CHECK(run("verify --family thm12 --grid 3x3") == 3);
  CHECK(run("verify --family thm9-iv --grid 3x3") == 3);
  CHECK(run("verify --family thm10-i --window 0.5:1.5,0.2:0.8 --grid 3x3") == 3);
  CHECK(run("verify --family thm9-i --param b=2 --grid 3x3") == 3);
  CHECK(run("curve --remark12 f=1 sigma=-1") == 3);
  CHECK(run("curve --flat-null mu=0") == 3);
}

TEST_CASE("curve subcommand") {
  const fs::path out = scratch() / "curve.json";
  CHECK(run("curve --flat-null mu=1 --samples 50 --out " + out.string()) == 0);
  const json r = load(out);
  REQUIRE(r["samples"].size() == 50);
  for (const auto& s : r["samples"]) CHECK(std::abs(s["pairing"].get<double>() - 1.0) <= 1e-13);

  CHECK(run("curve --remark12 f=1 delta=0 --range 0:0.5 --step 1e-3 --out " + out.string()) == 0);
  const json c = load(out);
  CHECK(c["drift"]["flagged"] == false);
  for (const auto& s : c["samples"]) CHECK(std::abs(s["kappa_sq"].get<double>() - 6.0) <= 1e-6);

  CHECK(run("curve --remark12 f=0 delta=0 --out " + out.string()) == 0);
  for (const auto& s : load(out)["samples"]) CHECK(std::abs(s["kappa_sq"].get<double>()) <= 1e-12);

  CHECK(run("curve --remark12 f=1 --step 0.05 --drift-bound 1e-16 --out " + out.string()) == 1);
  CHECK(load(out)["drift"]["flagged"] == true);
}

TEST_CASE("convergence subcommand") {
  const fs::path out = scratch() / "conv.json";
  CHECK(run("convergence --family thm9-i --param a=1 --out " + out.string()) == 0);
  const json r = load(out);
  CHECK(r["levels"][1]["derivative_level"] == 2);
  CHECK(r["levels"][1]["observed_order"].get<double>() >= 2.0);
  CHECK(run("convergence --family thm10-i --probe 1.02,1.0 --probe 1.5,0.5 --out " + out.string()) == 0);
  CHECK(load(out)["probes"][0]["ill_conditioned"] == true);
}

TEST_CASE("repeated runs agree apart from timings") {
  const fs::path a = scratch() / "a.json", b = scratch() / "b.json";
  CHECK(run("verify --family thm10-ii --grid 6x6 --threads 1 --out " + a.string()) == 0);
  CHECK(run("verify --family thm10-ii --grid 6x6 --threads 3 --out " + b.string()) == 0);
  json ja = load(a), jb = load(b);
  ja.erase("timings");
  jb.erase("timings");
  CHECK(ja.dump() == jb.dump());
}
