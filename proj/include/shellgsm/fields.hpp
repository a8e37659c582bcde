#pragma once

#include <array>
#include <span>
#include <vector>

#include "shellgsm/gsm.hpp"

namespace shellgsm {

struct SphericalDirection {
  double theta = 0.0;  // radians
  double phi = 0.0;
};

/// Plane wave E0 * e * exp(-j k khat.r). `polarization` is e in the local
/// (theta_hat, phi_hat) basis at the propagation direction khat.
struct PlaneWaveSpec {
  double theta_inc = 0.0;
  double phi_inc = 0.0;
  std::array<cplx, 2> polarization{cplx(1.0), cplx(0.0)};
  double amplitude = 1.0;  // V/m
};

/// Far-field amplitude with exp(-jkr)/r removed, in V.
struct FarFieldSample {
  SphericalDirection direction;
  cplx f_theta;
  cplx f_phi;
};

/// Regular-wave coefficients a^f of the plane wave in the exterior medium.
VectorC plane_wave_coefficients(const PlaneWaveSpec& spec, int lmax, const HomogeneousRegion& exterior,
                                double frequency_hz);

/// F(r) = sqrt(Zf) sum_n f_n j^(l+2-tau) A_tau n(r).
std::vector<FarFieldSample> far_field(const VectorC& f, int lmax, const HomogeneousRegion& exterior,
                                      std::span<const SphericalDirection> directions);

/// G = 4 pi |F|^2 / (2 Re Zf) / P_in with P_in = |v|^2 / 2 and f = T~ v.
std::vector<double> gain_pattern(const EffectiveGSM& eff, const VectorC& v, const HomogeneousRegion& exterior,
                                 std::span<const SphericalDirection> directions);

/// sigma = 4 pi |F_s|^2 / |E0|^2 for f = (S~ - 1) a^f / 2 with no port drive.
std::vector<double> bistatic_rcs(const EffectiveGSM& eff, const PlaneWaveSpec& spec,
                                 const HomogeneousRegion& exterior, std::span<const SphericalDirection> directions);

struct SParameter {
  double frequency_hz;
  int port_i;  // 1-based
  int port_j;
  cplx value;
  double mag_db;
  double phase_deg;
};

/// Gamma~ entries per frequency, row-major in (i, j).
std::vector<SParameter> port_sparams(std::span<const EffectiveGSM> effs);

/// xoz-plane cut: phi = 0 for theta in [0, 180] deg, then phi = 180 deg.
std::vector<SphericalDirection> principal_cut(double step_deg = 1.0);

}  // namespace shellgsm
