#include "shellgsm/specfun.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "shellgsm/error.hpp"

namespace shellgsm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr cplx kJ{0.0, 1.0};
constexpr int kMaxFractionTerms = 1'000'000;

void check_argument(double order, cplx x) {
  if (!std::isfinite(order) || order < 0.0)
    throw DomainError("riccati: order must be finite and >= 0, got " + std::to_string(order));
  if (x == cplx(0.0) || !std::isfinite(x.real()) || !std::isfinite(x.imag()))
    throw DomainError("riccati: argument must be finite and nonzero");
}

// psi_{L+1}(z) / psi_L(z) from the three-term recurrence read as a continued
// fraction, r_L = 1 / ((2L+3)/z - r_{L+1}); modified Lentz.
cplx psi_ratio(double order, cplx z) {
  constexpr double tiny = 1e-300;
  cplx f = tiny;
  cplx c = f;
  cplx d = 0.0;
  for (int k = 1; k < kMaxFractionTerms; ++k) {
    const cplx b = (2.0 * (order + k) + 1.0) / z;
    const double a = (k == 1) ? 1.0 : -1.0;
    d = b + a * d;
    if (d == cplx(0.0)) d = tiny;
    c = b + a / c;
    if (c == cplx(0.0)) c = tiny;
    d = 1.0 / d;
    const cplx delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 2.0 * kEps) return f;
  }
  throw NumericError("riccati: continued fraction for psi ratio did not converge");
}

// K_nu(w) along the steepest-descent path, tau = w (cosh t - 1) = u^2:
//   K_nu(w) = e^{-w} int_0^inf 2 e^{-u^2} cosh(nu acosh(1 + u^2/w)) / sqrt(2w + u^2) du.
// The integrand is analytic except at u^2 = -2w, so panels are graded
// geometrically up to that distance and unit-length beyond it.
cplx bessel_k_steepest(double nu, cplx w) {
  using Rule = boost::math::quadrature::gauss<double, 30>;
  const auto integrand = [nu, w](double u) {
    const double u2 = u * u;
    return 2.0 * std::exp(-u2) * std::cosh(nu * std::acosh(1.0 + u2 / w)) /
           std::sqrt(2.0 * w + u2);
  };
  constexpr double upper = 8.0;
  const double near = std::sqrt(2.0 * std::abs(w));
  double a = 0.0;
  double b = std::min(0.5 * near, 0.5);
  cplx sum = 0.0;
  while (a < upper) {
    sum += Rule::integrate(integrand, a, b);
    a = b;
    b = std::min(upper, b + std::min(b, 1.0));
  }
  return std::exp(-w) * sum;
}

// xi_L for a non-integer order, through H2_nu(z) = (2/pi) j^(nu+1) K_nu(jz),
// valid for -pi < arg z < pi/2.
cplx xi_fractional(double order, cplx z) {
  const double nu = order + 0.5;
  const cplx phase = std::polar(1.0, 0.5 * kPi * (nu + 1.0));
  return std::sqrt(2.0 * z / kPi) * phase * bessel_k_steepest(nu, kJ * z);
}

// (xi_L, xi_{L+1}) by upward recurrence from the base pair at the fractional
// part of L. Upward is the stable direction for the Hankel family.
std::pair<cplx, cplx> xi_pair(double order, cplx z) {
  const double whole = std::floor(order);
  const double frac = order - whole;
  cplx lo, hi;
  if (frac == 0.0) {
    const cplx e = std::exp(-kJ * z);
    lo = kJ * e;
    hi = e * (kJ / z - 1.0);
  } else {
    if (!(z.real() > 0.0 || z.imag() < 0.0))
      throw DomainError("riccati: non-integer order needs Re(x) > 0 or Im(x) < 0");
    lo = xi_fractional(frac, z);
    hi = xi_fractional(frac + 1.0, z);
  }
  double current = frac;
  const int steps = static_cast<int>(whole);
  for (int k = 0; k < steps; ++k) {
    const cplx next = (2.0 * current + 3.0) / z * hi - lo;
    lo = hi;
    hi = next;
    current += 1.0;
  }
  return {lo, hi};
}

}  // namespace

RiccatiFunctions riccati(double order, cplx x) {
  check_argument(order, x);
  const auto [xi, xi_next] = xi_pair(order, x);
  const cplx dxi = (order + 1.0) / x * xi - xi_next;
  const cplx log_deriv = (order + 1.0) / x - psi_ratio(order, x);

  // Wronskian psi xi' - psi' xi = -j fixes the scale of psi.
  cplx psi, dpsi;
  if (std::abs(log_deriv) <= 1.0) {
    psi = -kJ / (dxi - log_deriv * xi);
    dpsi = log_deriv * psi;
  } else {
    dpsi = -kJ / (dxi / log_deriv - xi);
    psi = dpsi / log_deriv;
  }
  return {{psi, dpsi}, {xi, dxi}};
}

RiccatiPair riccati_psi(double order, cplx x) { return riccati(order, x).psi; }

RiccatiPair riccati_xi(double order, cplx x) {
  check_argument(order, x);
  const auto [xi, xi_next] = xi_pair(order, x);
  return {xi, (order + 1.0) / x * xi - xi_next};
}

// --- mode ordering ---------------------------------------------------------

void check_mode(const ModeIndex& mode) {
  if (mode.tau != 1 && mode.tau != 2) throw DomainError("mode: tau must be 1 or 2");
  if (mode.l < 1) throw DomainError("mode: degree l must be >= 1");
  if (mode.m < 0 || mode.m > mode.l) throw DomainError("mode: order m must satisfy 0 <= m <= l");
  if (mode.m == 0 && mode.sigma == Parity::odd)
    throw DomainError("mode: odd parity does not exist for m = 0");
}

int mode_index(const ModeIndex& mode) {
  check_mode(mode);
  const int base = 2 * (mode.l * mode.l - 1);
  if (mode.m == 0) return base + (mode.tau - 1);
  return base + 2 + 4 * (mode.m - 1) + (mode.sigma == Parity::odd ? 2 : 0) + (mode.tau - 1);
}

int mode_index(int tau, Parity sigma, int m, int l) { return mode_index(ModeIndex{tau, sigma, m, l}); }

ModeIndex mode_unindex(int linear) {
  if (linear < 0) throw DomainError("mode: linear index must be >= 0");
  int l = static_cast<int>(std::sqrt(linear / 2.0 + 1.0));
  while (2 * (l * l - 1) > linear) --l;
  while (2 * ((l + 1) * (l + 1) - 1) <= linear) ++l;
  int rest = linear - 2 * (l * l - 1);
  if (rest < 2) return {rest + 1, Parity::even, 0, l};
  rest -= 2;
  const int m = rest / 4 + 1;
  const int slot = rest % 4;
  return {slot % 2 + 1, slot >= 2 ? Parity::odd : Parity::even, m, l};
}

// --- Legendre functions and harmonics -------------------------------------

namespace {

double recurrence_a(int l, int m) {
  return std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
}

double recurrence_b(int l, int m) {
  const double lm1 = l - 1.0;
  return std::sqrt((lm1 * lm1 - static_cast<double>(m) * m) / (4.0 * lm1 * lm1 - 1.0));
}

}  // namespace

double legendre_normalized(int l, int m, double u) {
  if (l < 0 || m < 0 || m > l) throw DomainError("legendre: need 0 <= m <= l");
  if (!(std::abs(u) <= 1.0)) throw DomainError("legendre: |u| must not exceed 1");
  const double s = std::sqrt((1.0 - u) * (1.0 + u));
  double pmm = std::sqrt(0.5);
  for (int k = 1; k <= m; ++k) pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  if (l == m) return pmm;
  double prev = pmm;
  double cur = std::sqrt(2.0 * m + 3.0) * u * pmm;
  for (int k = m + 2; k <= l; ++k) {
    const double next = recurrence_a(k, m) * (u * cur - recurrence_b(k, m) * prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

AngularTable::AngularTable(int lmax, double theta) : lmax_(lmax) {
  if (lmax < 0) throw DomainError("angular table: lmax must be >= 0");
  const std::size_t size = static_cast<std::size_t>(slot(lmax, lmax) + 1);
  p_.assign(size, 0.0);
  q_.assign(size, 0.0);
  dp_.assign(size, 0.0);
  const double x = std::cos(theta);
  const double s = std::sin(theta);

  p_[slot(0, 0)] = std::sqrt(0.5);
  if (lmax >= 1) p_[slot(1, 0)] = std::sqrt(3.0) * x * p_[slot(0, 0)];
  for (int l = 2; l <= lmax; ++l)
    p_[slot(l, 0)] = recurrence_a(l, 0) * (x * p_[slot(l - 1, 0)] - recurrence_b(l, 0) * p_[slot(l - 2, 0)]);

  // Q_l^m = P~_l^m / sin(theta) obeys the same recurrence in l.
  double qmm = std::sqrt(0.5) * std::sqrt(1.5);
  for (int m = 1; m <= lmax; ++m) {
    if (m > 1) qmm *= s * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    q_[slot(m, m)] = qmm;
    if (m + 1 <= lmax) q_[slot(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * qmm;
    for (int l = m + 2; l <= lmax; ++l)
      q_[slot(l, m)] = recurrence_a(l, m) * (x * q_[slot(l - 1, m)] - recurrence_b(l, m) * q_[slot(l - 2, m)]);
    for (int l = m; l <= lmax; ++l) p_[slot(l, m)] = s * q_[slot(l, m)];
  }

  for (int l = 1; l <= lmax; ++l) {
    dp_[slot(l, 0)] = -std::sqrt(l * (l + 1.0)) * p_[slot(l, 1)];
    for (int m = 1; m <= l; ++m) {
      const double lower = (l - 1 >= m) ? q_[slot(l - 1, m)] : 0.0;
      const double c = std::sqrt((2.0 * l + 1.0) * (l - m) * (l + m) / (2.0 * l - 1.0));
      dp_[slot(l, m)] = l * x * q_[slot(l, m)] - c * lower;
    }
  }
}

namespace {

struct HarmonicParts {
  double y;          // Y
  double d_theta;    // dY/dtheta
  double d_phi_sin;  // (1/sin theta) dY/dphi
};

HarmonicParts harmonic_parts(const AngularTable& table, Parity sigma, int m, int l, double phi) {
  const double norm = std::sqrt((m == 0 ? 1.0 : 2.0) / (2.0 * kPi));
  const double c = std::cos(m * phi);
  const double s = std::sin(m * phi);
  const double trig = (sigma == Parity::even) ? c : s;
  const double dtrig = (sigma == Parity::even) ? -m * s : m * c;
  return {norm * table.p(l, m) * trig, norm * table.dp_dtheta(l, m) * trig,
          norm * table.p_over_sin(l, m) * dtrig};
}

}  // namespace

double scalar_harmonic(const ModeIndex& mode, double theta, double phi) {
  check_mode(mode);
  const AngularTable table(mode.l, theta);
  return harmonic_parts(table, mode.sigma, mode.m, mode.l, phi).y;
}

VectorHarmonicValue vector_harmonic(int kind, const ModeIndex& mode, double theta, double phi) {
  if (kind < 1 || kind > 3) throw DomainError("vector harmonic: kind must be 1, 2 or 3");
  check_mode(mode);
  const AngularTable table(mode.l, theta);
  const auto h = harmonic_parts(table, mode.sigma, mode.m, mode.l, phi);
  const double c = 1.0 / std::sqrt(mode.l * (mode.l + 1.0));
  switch (kind) {
    case 1: return {{0.0, c * h.d_phi_sin, -c * h.d_theta}};
    case 2: return {{0.0, c * h.d_theta, c * h.d_phi_sin}};
    default: return {{h.y, 0.0, 0.0}};
  }
}

std::vector<std::array<double, 2>> tangential_harmonics(int lmax, double theta, double phi) {
  std::vector<std::array<double, 2>> out;
  out.reserve(static_cast<std::size_t>(mode_count(lmax)));
  const AngularTable table(lmax, theta);
  for (int l = 1; l <= lmax; ++l) {
    const double c = 1.0 / std::sqrt(l * (l + 1.0));
    for (int m = 0; m <= l; ++m) {
      for (Parity sigma : {Parity::even, Parity::odd}) {
        if (m == 0 && sigma == Parity::odd) continue;
        const auto h = harmonic_parts(table, sigma, m, l, phi);
        out.push_back({c * h.d_phi_sin, -c * h.d_theta});  // tau = 1
        out.push_back({c * h.d_theta, c * h.d_phi_sin});   // tau = 2
      }
    }
  }
  return out;
}

cplx radial_function(int kind, int p, int l, cplx kr) {
  if (kind < 1 || kind > 3) throw DomainError("radial function: kind must be 1, 2 or 3");
  if (p != 1 && p != 4) throw DomainError("radial function: p must be 1 (regular) or 4 (outgoing)");
  if (l < 0) throw DomainError("radial function: degree must be >= 0");
  if (kr == cplx(0.0)) throw DomainError("radial function: kr must be nonzero");
  const RiccatiPair z = (p == 1) ? riccati_psi(l, kr) : riccati_xi(l, kr);
  switch (kind) {
    case 1: return z.value / kr;
    case 2: return z.derivative / kr;
    default: return std::sqrt(l * (l + 1.0)) * z.value / (kr * kr);
  }
}

int truncation_degree(double kf, double ra) {
  const double x = kf * ra;
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("truncation degree: kf * ra must be positive and finite");
  return static_cast<int>(std::ceil(x + 7.0 * std::cbrt(x) + 3.0));
}

}  // namespace shellgsm
