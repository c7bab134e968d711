#include "qbh/fd_jet.hpp"

#include <array>
#include <cmath>
#include <map>
#include <utility>

namespace qbh {
namespace {

// Second-order central stencils for the k-th derivative on offsets -2..2, before division by h^k.
constexpr std::array<std::array<double, 5>, 5> kStencil = {{
    {0.0, 0.0, 1.0, 0.0, 0.0},
    {0.0, -0.5, 0.0, 0.5, 0.0},
    {0.0, 1.0, -2.0, 1.0, 0.0},
    {-0.5, 1.0, 0.0, -1.0, 0.5},
    {1.0, -4.0, 6.0, -4.0, 1.0},
}};

using Sampler = std::function<Eigen::VectorXcd(int p, int q)>;

// Raw differences at one step, returned as Taylor coefficients.
VectorJet raw_differences(const Sampler& sample, int order, int nvars, double h) {
  std::map<std::pair<int, int>, Eigen::VectorXcd> cache;
  auto at = [&](int p, int q) -> const Eigen::VectorXcd& {
    auto it = cache.find({p, q});
    if (it == cache.end()) {
      Eigen::VectorXcd v = sample(p, q);
      if (!v.allFinite()) throw StencilError("non-finite map value inside the difference stencil");
      it = cache.emplace(std::make_pair(p, q), std::move(v)).first;
    }
    return it->second;
  };
  const Eigen::VectorXcd& center = at(0, 0);
  VectorJet jet(order, nvars, Eigen::VectorXcd::Zero(center.size()));
  for (int deg = 0; deg <= order; ++deg) {
    for (int j = 0; j <= (nvars == 2 ? deg : 0); ++j) {
      const int i = deg - j;
      Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(center.size());
      for (int p = -2; p <= 2; ++p) {
        const double wp = kStencil[i][p + 2];
        if (wp == 0.0) continue;
        for (int q = -2; q <= 2; ++q) {
          const double wq = kStencil[j][q + 2];
          if (wq == 0.0) continue;
          acc += (wp * wq) * at(p, q);
        }
      }
      const double scale = std::pow(h, deg) * jet_detail::factorial(i) * jet_detail::factorial(j);
      jet(i, j) = acc / scale;
    }
  }
  return jet;
}

FdJet extrapolate(const std::function<Sampler(double)>& sampler_at, int order, int nvars, double h) {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  if (order < 0 || order > VectorJet::kMaxOrder) throw OrderError("jet order must lie in [0, 4]");
  const VectorJet d1 = raw_differences(sampler_at(h), order, nvars, h);
  const VectorJet d2 = raw_differences(sampler_at(h / 2), order, nvars, h / 2);
  const VectorJet d4 = raw_differences(sampler_at(h / 4), order, nvars, h / 4);
  const VectorJet coarse = (4.0 * d2 - d1) / 3.0;
  const VectorJet fine = (4.0 * d4 - d2) / 3.0;
  FdJet out;
  out.jet = fine;
  out.coefficient_error = RealJet(order, nvars, 0.0);
  for (int deg = 0; deg <= order; ++deg) {
    for (int j = 0; j <= (nvars == 2 ? deg : 0); ++j) {
      const double e = (fine(deg - j, j) - coarse(deg - j, j)).cwiseAbs().maxCoeff();
      out.coefficient_error(deg - j, j) = e;
      out.error_estimate = std::max(out.error_estimate, e);
    }
  }
  return out;
}

}  // namespace

FdJet fd_jet(const PointMap& map, double x, double y, int order, double h) {
  return extrapolate(
      [&](double step) -> Sampler {
        return [&map, x, y, step](int p, int q) { return map(x + p * step, y + q * step); };
      },
      order, 2, h);
}

FdJet fd_jet(const CurveMap& map, double t, int order, double h) {
  return extrapolate(
      [&](double step) -> Sampler {
        return [&map, t, step](int p, int) { return map(t + p * step); };
      },
      order, 1, h);
}

}  // namespace qbh
