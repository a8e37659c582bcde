#pragma once

// Riccati-Bessel/Hankel functions, normalized Legendre functions and the
// real-valued vector spherical harmonics used by every other module.
//
// Time convention is exp(+j*omega*t): outgoing waves use H^(2), and a lossy
// medium has a negative imaginary permittivity.

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace shellgsm {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

enum class Parity { even, odd };

/// Spherical mode n = (tau, sigma, m, l). tau = 1 is TE, tau = 2 is TM.
struct ModeIndex {
  int tau = 1;
  Parity sigma = Parity::even;
  int m = 0;
  int l = 1;

  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

/// Number of modes for a truncation degree: 2*lmax*(lmax+2).
constexpr int mode_count(int lmax) { return 2 * lmax * (lmax + 2); }

/// Canonical linear position: l ascending, then m ascending, then
/// even before odd (odd absent at m = 0), then tau = 1 before tau = 2.
int mode_index(const ModeIndex& mode);
int mode_index(int tau, Parity sigma, int m, int l);
ModeIndex mode_unindex(int linear);

/// Throws DomainError unless tau in {1,2}, l >= 1, 0 <= m <= l and
/// m == 0 implies even parity.
void check_mode(const ModeIndex& mode);

struct RiccatiPair {
  cplx value;
  cplx derivative;
};

struct RiccatiFunctions {
  RiccatiPair psi;
  RiccatiPair xi;
};

/// psi_L(x) = sqrt(pi x / 2) J_{L+1/2}(x) and its derivative.
RiccatiPair riccati_psi(double order, cplx x);
/// xi_L(x) = sqrt(pi x / 2) H2_{L+1/2}(x) and its derivative.
RiccatiPair riccati_xi(double order, cplx x);
/// Both families at once; psi is normalized through the Wronskian against
/// xi, so computing them together costs the same as computing psi alone.
RiccatiFunctions riccati(double order, cplx x);

/// Legendre function normalized to unit L2 norm on [-1, 1] (no
/// Condon-Shortley phase).
double legendre_normalized(int l, int m, double u);

/// Real scalar harmonic sqrt((2 - delta_m0) / 2pi) P~_l^m(cos theta) {cos, sin}(m phi).
double scalar_harmonic(const ModeIndex& mode, double theta, double phi);

/// Components in the local (r, theta, phi) frame.
struct VectorHarmonicValue {
  std::array<double, 3> components{};

  double r() const { return components[0]; }
  double theta() const { return components[1]; }
  double phi() const { return components[2]; }
};

/// kind 1: A_1 = grad(Y) x r / sqrt(l(l+1)); kind 2: r grad(Y) / sqrt(l(l+1));
/// kind 3: r_hat Y. The mode's own tau is ignored; kind selects the family.
VectorHarmonicValue vector_harmonic(int kind, const ModeIndex& mode, double theta, double phi);

/// P~, P~/sin(theta) and dP~/dtheta for all 0 <= m <= l <= lmax at one
/// polar angle. The quotient table is pole-safe (seeded with sin^(m-1)).
class AngularTable {
public:
  AngularTable(int lmax, double theta);

  int lmax() const { return lmax_; }
  double p(int l, int m) const { return p_[slot(l, m)]; }
  /// P~_l^m / sin(theta) for m >= 1; zero for m == 0.
  double p_over_sin(int l, int m) const { return q_[slot(l, m)]; }
  double dp_dtheta(int l, int m) const { return dp_[slot(l, m)]; }

private:
  static int slot(int l, int m) { return l * (l + 1) / 2 + m; }

  int lmax_;
  std::vector<double> p_, q_, dp_;
};

/// Tangential (theta, phi) components of A_{tau n} for every canonical mode
/// n < mode_count(lmax), each mode using its own tau.
std::vector<std::array<double, 2>> tangential_harmonics(int lmax, double theta, double phi);

/// R^(p)_{kind,l}(kr) for p = 1 (regular, psi) or p = 4 (outgoing, xi).
cplx radial_function(int kind, int p, int l, cplx kr);

/// ceil(x + 7 x^(1/3) + 3) with x = kf * ra.
int truncation_degree(double kf, double ra);

}  // namespace shellgsm
