#pragma once

// Built-in Lagrangian surface families in C^2_1, CP^2_1(4) and CH^2_1(-4), with default windows and
// expected classification profiles.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qbh/curves.hpp"
#include "qbh/immersion.hpp"

namespace qbh {

using FamilyParams = std::map<std::string, double>;

enum class Provenance { paper_asserted, paper_corrected, empirical, trivial };

std::string_view to_string(Provenance p);

struct ExpectedProfile {
  std::string name;
  Provenance provenance = Provenance::empirical;
  std::optional<bool> marginally_trapped;
  std::optional<bool> minimal;
  std::optional<bool> biharmonic;
  std::optional<bool> quasi_biharmonic;
  std::optional<double> gauss_curvature;
  std::string note;

  /// Whether the flags are asserted (checked) rather than recorded.
  bool asserted() const { return provenance == Provenance::paper_asserted || provenance == Provenance::trivial; }
};

ExpectedProfile expected_profile(const std::string& name);

/// Names accepted by make_family, in registry order.
const std::vector<std::string>& family_names();

/// Minimal distance of a window to the family's singular locus required for acceptance.
inline constexpr double kWindowMargin = 0.1;

ImmersionPatch make_flat_family(const std::string& name, const FamilyParams& params = {},
                                const std::optional<CurveSpec>& curve = {});
ImmersionPatch make_cp_family(const std::string& name, const FamilyParams& params = {},
                              const std::optional<CurveSpec>& curve = {});
ImmersionPatch make_ch_family(const std::string& name, const FamilyParams& params = {},
                              const std::optional<CurveSpec>& curve = {});

struct FamilySpec {
  std::string name;
  FamilyParams params;
  ImmersionPatch patch;
  std::optional<CurveSpec> curve;
  ExpectedProfile expected;
};

/// Builds a family by name with its default curve inputs. A supplied window replaces the default
/// and must keep kWindowMargin from the singular locus.
FamilySpec make_family(const std::string& name, const FamilyParams& params = {},
                       const std::optional<Window>& window = {});

struct ProbeResiduals {
  double lift_norm = 0.0;
  double lagrangian = 0.0;
  double horizontal = 0.0;
  double min_margin = 0.0;
};

/// Residuals on an n-by-n probe grid of the patch window.
ProbeResiduals probe_patch(const ImmersionPatch& patch, int n = 5);

/// Raises FamilyError if the window comes closer than kWindowMargin to the singular locus.
void require_admissible_window(const ImmersionPatch& patch, const Window& window);

/// Polynomial coefficients from params: a bare `alias` gives a constant, otherwise prefix0, prefix1, ...
std::vector<double> polynomial_params(const FamilyParams& params, const std::string& prefix, const std::string& alias,
                                      std::vector<double> fallback);

/// Built-in null curve of the biharmonic flat instance: z(y) = i e^{iy} (-1, 1) / 2.
CurveSpec biharmonic_instance_curve();

}  // namespace qbh
