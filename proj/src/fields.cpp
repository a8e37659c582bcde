#include "shellgsm/fields.hpp"

#include <cmath>

#include "shellgsm/error.hpp"

namespace shellgsm {

namespace {

// j^p for integer p.
cplx j_power(int p) {
  switch (((p % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_length(const VectorC& f, int lmax, const char* who) {
  if (f.size() != mode_count(lmax)) throw DimensionError(std::string(who) + ": coefficient vector has the wrong length");
}

}  // namespace

VectorC plane_wave_coefficients(const PlaneWaveSpec& spec, int lmax, const HomogeneousRegion& exterior,
                                double frequency_hz) {
  const double norm = std::hypot(std::abs(spec.polarization[0]), std::abs(spec.polarization[1]));
  if (std::abs(norm - 1.0) > 1e-9) throw DomainError("plane wave: polarization must have unit norm");
  const cplx k = exterior.wavenumber(frequency_hz);
  const cplx scale = 4.0 * kPi * spec.amplitude / (k * std::sqrt(exterior.impedance()));
  const auto a = tangential_harmonics(lmax, spec.theta_inc, spec.phi_inc);
  VectorC out(mode_count(lmax));
  for (int n = 0; n < out.size(); ++n) {
    const auto mode = mode_unindex(n);
    const cplx proj = spec.polarization[0] * a[n][0] + spec.polarization[1] * a[n][1];
    // (-j)^l for TE, (-j)^(l-1) for TM.
    out[n] = scale * j_power(-(mode.l + 1 - mode.tau)) * proj;
  }
  return out;
}

std::vector<FarFieldSample> far_field(const VectorC& f, int lmax, const HomogeneousRegion& exterior,
                                      std::span<const SphericalDirection> directions) {
  check_length(f, lmax, "far field");
  const cplx root_z = std::sqrt(exterior.impedance());
  VectorC weighted(f.size());
  for (int n = 0; n < f.size(); ++n) {
    const auto mode = mode_unindex(n);
    weighted[n] = f[n] * j_power(mode.l + 2 - mode.tau);
  }
  std::vector<FarFieldSample> out;
  out.reserve(directions.size());
  for (const auto& d : directions) {
    const auto a = tangential_harmonics(lmax, d.theta, d.phi);
    cplx ft = 0.0, fp = 0.0;
    for (int n = 0; n < f.size(); ++n) {
      ft += weighted[n] * a[n][0];
      fp += weighted[n] * a[n][1];
    }
    out.push_back({d, root_z * ft, root_z * fp});
  }
  return out;
}

std::vector<double> gain_pattern(const EffectiveGSM& eff, const VectorC& v, const HomogeneousRegion& exterior,
                                 std::span<const SphericalDirection> directions) {
  if (v.size() != eff.num_ports) throw DimensionError("gain: port vector has the wrong length");
  const double p_in = 0.5 * v.squaredNorm();
  if (!(p_in > 0.0)) throw DomainError("gain: port drive must be nonzero");
  if (eff.t.rows() != mode_count(eff.lmax)) throw DimensionError("gain: effective GSM lacks the T block");
  const VectorC f = eff.t * v;
  const double zf = exterior.impedance().real();
  std::vector<double> out;
  out.reserve(directions.size());
  for (const auto& s : far_field(f, eff.lmax, exterior, directions))
    out.push_back(4.0 * kPi * (std::norm(s.f_theta) + std::norm(s.f_phi)) / (2.0 * zf) / p_in);
  return out;
}

std::vector<double> bistatic_rcs(const EffectiveGSM& eff, const PlaneWaveSpec& spec,
                                 const HomogeneousRegion& exterior, std::span<const SphericalDirection> directions) {
  if (eff.s.rows() != mode_count(eff.lmax)) throw DimensionError("rcs: effective GSM lacks the S block");
  if (!(spec.amplitude != 0.0)) throw DomainError("rcs: incident amplitude must be nonzero");
  const VectorC a = plane_wave_coefficients(spec, eff.lmax, exterior, eff.frequency_hz);
  const VectorC f = 0.5 * (eff.s * a - a);
  const double e0sq = spec.amplitude * spec.amplitude;
  std::vector<double> out;
  out.reserve(directions.size());
  for (const auto& s : far_field(f, eff.lmax, exterior, directions))
    out.push_back(4.0 * kPi * (std::norm(s.f_theta) + std::norm(s.f_phi)) / e0sq);
  return out;
}

std::vector<SParameter> port_sparams(std::span<const EffectiveGSM> effs) {
  std::vector<SParameter> out;
  for (const auto& e : effs) {
    if (e.gamma.rows() != e.num_ports || e.gamma.cols() != e.num_ports)
      throw DimensionError("sparams: effective GSM lacks the Gamma block");
    for (int i = 0; i < e.num_ports; ++i) {
      for (int j = 0; j < e.num_ports; ++j) {
        const cplx g = e.gamma(i, j);
        out.push_back({e.frequency_hz, i + 1, j + 1, g, 20.0 * std::log10(std::abs(g)),
                       std::arg(g) * 180.0 / kPi});
      }
    }
  }
  return out;
}

std::vector<SphericalDirection> principal_cut(double step_deg) {
  if (!(step_deg > 0.0) || step_deg > 180.0) throw DomainError("pattern step must be in (0, 180] degrees");
  const int n = static_cast<int>(std::floor(180.0 / step_deg + 1e-9));
  std::vector<SphericalDirection> out;
  for (double phi : {0.0, kPi}) {
    for (int i = 0; i <= n; ++i) out.push_back({i * step_deg * kPi / 180.0, phi});
  }
  return out;
}

}  // namespace shellgsm
