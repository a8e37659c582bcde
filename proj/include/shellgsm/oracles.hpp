#pragma once

// Independent reference computations. Nothing here calls into the radial or
// sso solvers except the harnesses that compare against them.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shellgsm/fields.hpp"

namespace shellgsm {

/// Solid-sphere coefficients in the Riccati form with xi = H2 Riccati.
/// a: TM (electric), b: TE (magnetic). The shell transition entries of the
/// same sphere are t_TM = -a, t_TE = -b, so |1 - 2a| = |1 - 2b| = 1 when lossless.
struct MieCoefficients {
  std::vector<cplx> a;  // element l - 1
  std::vector<cplx> b;
};

MieCoefficients mie_solid_sphere(cplx eps, cplx mu, double radius, const HomogeneousRegion& exterior,
                                 double frequency_hz, int lmax);

/// Bistatic RCS of the sphere for incidence along +z polarized along x,
/// observed at (theta, phi). Uses the pi_n / tau_n angular recurrences.
double mie_bistatic_rcs(const MieCoefficients& mie, const HomogeneousRegion& exterior, double frequency_hz,
                        double theta, double phi);

struct NeumannResult {
  EffectiveGSM eff;
  int terms = 0;
  bool converged = false;
  double spectral_radius = 0.0;
};

/// Multiple-bounce expansion M^-1 = sum_k [(S-1) rho / 2]^k, summed until a
/// term's max-norm drops below 1e-13. Refuses (converged = false) when the
/// spectral radius is 0.9 or more.
NeumannResult neumann_compose(const AntennaGSM& antenna, const SSOSet& sso, int max_terms = 2000);

struct StaircaseRow {
  int n_layers;
  double max_err_gamma;  // max |Gamma~(n) - Gamma~(ODE)| over frequency
  double max_err_s;      // same for S~
};

/// Compose through staircase(geometry, n) and through the continuous-profile
/// solve, one antenna block per frequency.
std::vector<StaircaseRow> staircase_convergence(const ShellGeometry& geometry, std::span<const int> n_list,
                                                std::span<const AntennaGSM> antennas, const RadialOptions& options = {});

/// Max |E - E_plane| / |E0| of the truncated regular expansion of the plane
/// wave over `points` random points with k|r| <= lmax / 2.
double plane_wave_reconstruction_error(const PlaneWaveSpec& spec, int lmax, const HomogeneousRegion& exterior,
                                       double frequency_hz, int points, std::uint64_t seed);

/// E field of the regular expansion k sqrt(Z) sum a_n u_n^(1)(k r) in
/// Cartesian components.
std::array<cplx, 3> regular_field(const VectorC& a, int lmax, cplx k, cplx z, const std::array<double, 3>& point);

/// Per-mode 2x2 wave map of the shell in incoming/outgoing amplitudes,
/// from u^(1) = (u^(3) + u^(4)) / 2. Returns its two singular values.
std::array<double, 2> mode_scattering_singular_values(cplx t, cplx phi, cplx rho, cplx psi);

/// Random antenna with ||(S - 1) / 2||_F = contrast (an upper bound on the
/// spectral norm), deterministic in seed.
AntennaGSM random_antenna(double frequency_hz, int lmax, int num_ports, double contrast, std::uint64_t seed,
                          const HomogeneousRegion& bubble = {});
/// Random operator entries with |rho| <= rho_max and |t|, |Phi|, |Psi| <= 1.
SSOSet random_sso(double frequency_hz, int lmax, double rho_max, std::uint64_t seed,
                  const HomogeneousRegion& bubble = {});

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double metric = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Oracle suite used by the `validate` task. Geometry-specific checks run
/// against `geometry` at `frequency_hz`; the rest use built-in scenarios.
std::vector<ValidationCheck> run_validation_suite(const ShellGeometry& geometry, double frequency_hz,
                                                  const RadialOptions& options = {});

}  // namespace shellgsm
