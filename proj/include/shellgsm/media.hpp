#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shellgsm/specfun.hpp"

namespace shellgsm {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kVacuumImpedance = 376.730313668;

inline double free_space_wavenumber(double frequency_hz) {
  return 2.0 * kPi * frequency_hz / kSpeedOfLight;
}

/// Relative constitutive values at one radius.
struct MediumSample {
  cplx eps_perp{1.0};
  cplx eps_r{1.0};
  cplx mu_perp{1.0};
  cplx mu_r{1.0};

  bool lossless() const;
  bool isotropic() const { return eps_perp == eps_r && mu_perp == mu_r; }
};

struct HomogeneousRegion {
  cplx eps{1.0};
  cplx mu{1.0};

  /// k0 * sqrt(eps * mu), principal branch (Re k >= 0).
  cplx wavenumber(double frequency_hz) const;
  /// Z0 * sqrt(mu / eps) in ohms, principal branch.
  cplx impedance() const;
  MediumSample as_sample() const { return {eps, eps, mu, mu}; }
};

using RadialFunction = std::function<cplx(double)>;

/// Continuous profile. The derivative callables are optional; when empty the
/// radial solver falls back to central differences.
struct RadialProfile {
  RadialFunction eps_perp, eps_r, mu_perp, mu_r;
  RadialFunction d_eps_perp, d_mu_perp;
};

struct LayerSegment {
  double r_inner = 0.0;
  double r_outer = 0.0;
  std::variant<MediumSample, RadialProfile> profile;

  bool is_constant() const { return std::holds_alternative<MediumSample>(profile); }
  MediumSample at(double r) const;
};

struct ShellGeometry {
  double rb = 0.0;
  double ra = 0.0;
  HomogeneousRegion bubble;
  HomogeneousRegion exterior;
  std::vector<LayerSegment> segments;
};

enum class Side { inner, outer };

/// Constitutive values at r in [rb, ra]. At a shared interface radius `side`
/// picks the segment below (inner) or above (outer) it.
MediumSample sample(const ShellGeometry& geometry, double r, Side side = Side::inner);

/// Replace every continuous segment by n equal-thickness constant segments
/// sampled at their midpoints. Constant segments are kept as they are.
ShellGeometry staircase(const ShellGeometry& geometry, int n_layers);

/// First violated invariant, or nullopt when the geometry is usable.
std::optional<std::string> validate(const ShellGeometry& geometry);

/// Shell of constant segments split at the given interior radii (sorted,
/// strictly inside some segment). Useful for interface-split checks.
ShellGeometry split_segments(const ShellGeometry& geometry, std::vector<double> radii);

}  // namespace shellgsm
