#include "qbh/immersion.hpp"

#include <sstream>

#include "qbh/errors.hpp"
#include "qbh/fd_jet.hpp"

namespace qbh {

VectorJet patch_germ(const ImmersionPatch& patch, const Eigen::Vector2d& p, const BackendOptions& opts,
                     bool check_window) {
  if (check_window && !patch.window.contains(p)) {
    std::ostringstream os;
    os << patch.name << ": point (" << p.x() << ", " << p.y() << ") lies outside the window";
    throw ExcludedPointError(os.str());
  }
  if (patch.is_singular(p)) {
    std::ostringstream os;
    os << patch.name << ": point (" << p.x() << ", " << p.y() << ") is on the singular locus";
    throw ExcludedPointError(os.str());
  }
  if (opts.kind == Backend::jet) {
    try {
      return jet_eval(patch.map, p.x(), p.y(), 4);
    } catch (const SingularityError& e) {
      throw ExcludedPointError(patch.name + ": " + e.what());
    }
  }
  const PointMap sampler = [&patch](double x, double y) { return patch.evaluate(x, y); };
  return fd_jet(sampler, p.x(), p.y(), 4, opts.fd_step).jet;
}

}  // namespace qbh
