#pragma once

#include <vector>

#include "shellgsm/radial.hpp"

namespace shellgsm {

/// Diagonal operator entries over all canonical modes at one frequency.
struct SSOSet {
  double frequency_hz = 0.0;
  int lmax = 0;
  std::vector<cplx> t, phi, rho, psi;
  /// Bubble medium of the geometry the set was built from.
  HomogeneousRegion bubble;

  int size() const { return static_cast<int>(t.size()); }
};

/// Entries per (tau, l); element l - 1 holds degree l.
struct DegreeEntries {
  std::vector<cplx> te, tm;
};

DegreeEntries transition_entries(const ShellGeometry& geometry, double frequency_hz, int lmax,
                                 const RadialOptions& options = {});
DegreeEntries inward_entries(const ShellGeometry& geometry, double frequency_hz, int lmax,
                             const RadialOptions& options = {});
DegreeEntries reflection_entries(const ShellGeometry& geometry, double frequency_hz, int lmax,
                                 const RadialOptions& options = {});
DegreeEntries outward_entries(const ShellGeometry& geometry, double frequency_hz, int lmax,
                              const RadialOptions& options = {});

/// All four operators, expanded over (sigma, m) into the canonical ordering.
SSOSet assemble(const ShellGeometry& geometry, double frequency_hz, int lmax, const RadialOptions& options = {});

/// Vacuum-shell operators: t = rho = 0, Phi = Psi = 1.
SSOSet identity_sso(double frequency_hz, int lmax);

}  // namespace shellgsm
