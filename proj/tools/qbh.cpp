// qbh: verify | convergence | curve

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qbh/errors.hpp"
#include "qbh/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFamily = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("bad number for " + what + ": '" + s + "'");
  }
  if (used != s.size()) throw UsageError("bad number for " + what + ": '" + s + "'");
  return v;
}

qbh::FamilyParams parse_pairs(const std::vector<std::string>& items, const std::string& what) {
  qbh::FamilyParams out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError(what + " expects key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    out[key] = parse_number(item.substr(eq + 1), what + " " + key);
  }
  return out;
}

std::pair<double, double> parse_range(const std::string& s, const std::string& what) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError(what + " expects a:b, got '" + s + "'");
  return {parse_number(s.substr(0, colon), what), parse_number(s.substr(colon + 1), what)};
}

qbh::Window parse_window(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw UsageError("--window expects a:b,c:d, got '" + s + "'");
  const auto [x0, x1] = parse_range(s.substr(0, comma), "--window");
  const auto [y0, y1] = parse_range(s.substr(comma + 1), "--window");
  if (!(x1 > x0) || !(y1 > y0)) throw UsageError("--window ranges must be increasing");
  return {x0, x1, y0, y1};
}

std::pair<int, int> parse_grid(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw UsageError("--grid expects NxM, got '" + s + "'");
  const double nx = parse_number(s.substr(0, x), "--grid");
  const double ny = parse_number(s.substr(x + 1), "--grid");
  if (nx < 1 || ny < 1 || nx != int(nx) || ny != int(ny)) throw UsageError("--grid needs positive integers");
  return {int(nx), int(ny)};
}

Eigen::Vector2d parse_point(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw UsageError("--probe expects x,y, got '" + s + "'");
  return {parse_number(s.substr(0, comma), "--probe"), parse_number(s.substr(comma + 1), "--probe")};
}

void emit(const nlohmann::ordered_json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

template <typename Report>
void emit_csv(const Report& r, const std::string& path) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  qbh::write_csv(r, os);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Marginally trapped Lagrangian surface verifier"};
  app.require_subcommand(1);

  std::string family, grid = "21x21", window, backend = "jet", out, csv;
  std::vector<std::string> params, tol_checks, probes;
  double tol = 0.0, fd_step = 2e-2, h = 0.05;
  int threads = 0;

  auto* verify = app.add_subcommand("verify", "Check residuals and classification over a family grid");
  verify->add_option("--family", family, "Family name")->required();
  verify->add_option("--param", params, "Family parameter key=value")->take_all();
  verify->add_option("--grid", grid, "Grid size NxM");
  verify->add_option("--window", window, "Window x0:x1,y0:y1");
  verify->add_option("--backend", backend, "jet or fd")->check(CLI::IsMember({"jet", "fd"}));
  verify->add_option("--fd-step", fd_step, "Finite-difference step");
  auto* tol_opt = verify->add_option("--tol", tol, "Default check tolerance");
  verify->add_option("--tol-check", tol_checks, "Per-check tolerance name=value")->take_all();
  verify->add_option("--out", out, "JSON report path (stdout if absent)");
  verify->add_option("--csv", csv, "Per-point CSV path");
  verify->add_option("--threads", threads, "Worker threads (0 = all, capped by QBH_THREADS)");

  auto* conv = app.add_subcommand("convergence", "Finite-difference jets against exact jets");
  conv->add_option("--family", family, "Family name")->required();
  conv->add_option("--param", params, "Family parameter key=value")->take_all();
  conv->add_option("--window", window, "Window x0:x1,y0:y1");
  conv->add_option("--step", h, "Largest finite-difference step");
  conv->add_option("--probe", probes, "Probe point x,y")->take_all();
  conv->add_option("--out", out, "JSON report path (stdout if absent)");
  conv->add_option("--threads", threads, "Worker threads");

  std::vector<std::string> flat_null, corrected;
  std::string range = "0:1";
  double step = 1e-3, drift_bound = 1e-8;
  int samples = 50;
  auto* curve = app.add_subcommand("curve", "Legendre curve diagnostics");
  auto* flat_opt = curve->add_option("--flat-null", flat_null, "Closed-form null curve, mu=value")->expected(0, -1);
  auto* rem_opt =
      curve->add_option("--remark12", corrected, "Integrated curve: f=, delta=, f0.., d0.., sigma=")->expected(0, -1);
  flat_opt->excludes(rem_opt);
  curve->add_option("--range", range, "Parameter range a:b");
  curve->add_option("--step", step, "RK4 step");
  curve->add_option("--samples", samples, "Number of samples");
  curve->add_option("--drift-bound", drift_bound, "Drift flag threshold");
  curve->add_option("--out", out, "JSON report path (stdout if absent)");
  curve->add_option("--csv", csv, "Sample CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*verify) {
      qbh::VerifyOptions o;
      o.family = family;
      o.params = parse_pairs(params, "--param");
      if (!window.empty()) o.window = parse_window(window);
      std::tie(o.nx, o.ny) = parse_grid(grid);
      o.backend.kind = backend == "fd" ? qbh::Backend::fd : qbh::Backend::jet;
      o.backend.fd_step = fd_step;
      if (*tol_opt) o.tol = tol;
      o.check_tol = parse_pairs(tol_checks, "--tol-check");
      const auto& reg = qbh::check_registry();
      for (const auto& [name, value] : o.check_tol) {
        if (std::find(reg.begin(), reg.end(), name) == reg.end()) throw UsageError("unknown check: " + name);
      }
      o.threads = threads;
      const qbh::VerificationReport r = qbh::run_verify(o);
      emit(qbh::to_json(r), out);
      emit_csv(r, csv);
      if (!r.passed()) {
        std::cerr << "qbh: " << r.family << ": checks failed\n";
        return kExitCheckFailed;
      }
      return kExitOk;
    }
    if (*conv) {
      qbh::ConvergenceOptions o;
      o.family = family;
      o.params = parse_pairs(params, "--param");
      if (!window.empty()) o.window = parse_window(window);
      o.h = h;
      for (const auto& p : probes) o.probes.push_back(parse_point(p));
      o.threads = threads;
      emit(qbh::to_json(qbh::run_convergence(o)), out);
      return kExitOk;
    }
    if (*curve) {
      qbh::CurveOptions o;
      if (*rem_opt) {
        o.mode = qbh::CurveOptions::Mode::corrected;
        o.params = parse_pairs(corrected, "--remark12");
      } else if (*flat_opt) {
        o.params = parse_pairs(flat_null, "--flat-null");
      } else {
        throw UsageError("curve needs --flat-null or --remark12");
      }
      std::tie(o.t0, o.t1) = parse_range(range, "--range");
      o.step = step;
      o.samples = samples;
      o.drift_bound = drift_bound;
      const qbh::CurveReport r = qbh::run_curve(o);
      emit(qbh::to_json(r), out);
      emit_csv(r, csv);
      return r.drift && r.drift->flagged ? kExitCheckFailed : kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "qbh: " << e.what() << "\n";
    return kExitUsage;
  } catch (const qbh::Error& e) {
    std::cerr << "qbh: " << e.what() << "\n";
    return kExitFamily;
  } catch (const std::exception& e) {
    std::cerr << "qbh: " << e.what() << "\n";
    return kExitFamily;
  }
  return kExitUsage;
}
