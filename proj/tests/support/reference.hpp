#pragma once

// Small self-contained references for the unit tests. None of this touches
// the library's own special functions.

#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace testref {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

inline double rel_err(cplx got, cplx want) {
  const double scale = std::abs(want);
  return scale > 0.0 ? std::abs(got - want) / scale : std::abs(got);
}

// psi_nu(z) = sqrt(pi z / 2) J_{nu+1/2}(z) by the ascending series. Only
// trustworthy for |z| up to ~10 (cancellation).
inline cplx series_psi(double nu, cplx z) {
  const double order = nu + 0.5;
  const cplx half = z / 2.0;
  const cplx q = -half * half;
  cplx term = std::pow(half, order) / std::tgamma(order + 1.0);
  cplx sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= q / (double(k) * (k + order));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return std::sqrt(pi * z / 2.0) * sum;
}

// Fourth-order central difference.
inline cplx derivative(const std::function<cplx(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

}  // namespace testref
