#include "shellgsm/sso.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shellgsm/error.hpp"

namespace shellgsm {

namespace {

// A quotient whose denominator is below 1e-12 of its largest additive term
// marks a near-resonant mode.
cplx guarded_quotient(cplx num, cplx den, double den_term_a, double den_term_b, const char* what, int l) {
  if (std::abs(den) < 1e-12 * std::max(den_term_a, den_term_b))
    throw DegenerateError(std::string(what) + ": vanishing denominator (near-resonant mode) for l = " +
                              std::to_string(l),
                          l);
  return num / den;
}

struct Ends {
  cplx kf, kb, zf_over_zb_sqrt;
  MediumSample at_rb, at_ra;
};

Ends ends_of(const ShellGeometry& g, double f) {
  if (auto problem = validate(g)) throw DomainError("invalid geometry: " + *problem);
  return {g.exterior.wavenumber(f), g.bubble.wavenumber(f),
          std::sqrt(g.exterior.impedance()) / std::sqrt(g.bubble.impedance()), g.segments.front().at(g.rb),
          g.segments.back().at(g.ra)};
}

struct OutwardPair {
  cplx t, phi;
};

// Regular wave incident from outside, no source in the bubble.
//
// With c = mu_f / (kf mu_perp(ra)) (eps for TM) and D = c g'(ra) xi_f - g(ra) xi_f',
// the Wronskian gives psi_f + t xi_f = j g(ra) / D and psi_f' + t xi_f' = j c g'(ra) / D,
// so Phi never divides by a radial value that may pass through zero.
OutwardPair forward_mode(const ShellGeometry& g, const Ends& e, Family family, int l, double f,
                         const RadialOptions& options) {
  const auto data = propagate_stack(g, family, l, f, Direction::forward, options);
  const auto ext = riccati(l, e.kf * g.ra);
  const auto bub = riccati_psi(l, e.kb * g.rb);
  const bool te = family == Family::te;
  const cplx perp_ra = te ? e.at_ra.mu_perp : e.at_ra.eps_perp;
  const cplx region_f = te ? g.exterior.mu : g.exterior.eps;
  const cplx c = region_f / (e.kf * perp_ra);
  const auto& psi = ext.psi;
  const auto& xi = ext.xi;
  const cplx cg = c * data.deriv_ra;
  const cplx den = cg * xi.value - data.value_ra * xi.derivative;
  const double den_a = std::abs(cg * xi.value), den_b = std::abs(data.value_ra * xi.derivative);
  const cplx t = -guarded_quotient(cg * psi.value - data.value_ra * psi.derivative, den, den_a, den_b,
                                   "transition entry", l);
  const cplx j(0.0, 1.0);
  cplx phi;
  if (te) {
    phi = guarded_quotient(j * data.value_rb, den, den_a, den_b, "inward entry", l) * e.zf_over_zb_sqrt /
          bub.value;
  } else {
    if (std::abs(bub.derivative) <= 1e-13 * std::abs(bub.value))
      throw DegenerateError("inward entry: psi_l'(kb rb) vanishes for l = " + std::to_string(l), l);
    phi = guarded_quotient(j * c * data.deriv_rb, den, den_a, den_b, "inward entry", l) *
          (e.at_ra.eps_perp / e.at_rb.eps_perp) * e.zf_over_zb_sqrt / bub.derivative;
  }
  return {t, phi};
}

struct InwardPair {
  cplx rho, psi;
};

// Outgoing wave launched from the bubble, nothing incident from outside. Same
// rearrangement at rb: rho psi_b + xi_b = -j g(rb) / D, rho psi_b' + xi_b' = -j c g'(rb) / D.
InwardPair backward_mode(const ShellGeometry& g, const Ends& e, Family family, int l, double f,
                         const RadialOptions& options) {
  const auto data = propagate_stack(g, family, l, f, Direction::backward, options);
  const auto bub = riccati(l, e.kb * g.rb);
  const auto ext = riccati_xi(l, e.kf * g.ra);
  const bool te = family == Family::te;
  const cplx perp_rb = te ? e.at_rb.mu_perp : e.at_rb.eps_perp;
  const cplx region_b = te ? g.bubble.mu : g.bubble.eps;
  const cplx c = region_b / (e.kb * perp_rb);
  const auto& psi = bub.psi;
  const auto& xi = bub.xi;
  const cplx cg = c * data.deriv_rb;
  const cplx den = cg * psi.value - data.value_rb * psi.derivative;
  const double den_a = std::abs(cg * psi.value), den_b = std::abs(data.value_rb * psi.derivative);
  const cplx rho = -guarded_quotient(cg * xi.value - data.value_rb * xi.derivative, den, den_a, den_b,
                                     "reflection entry", l);
  const cplx j(0.0, 1.0);
  cplx out;
  if (te) {
    out = guarded_quotient(-j * data.value_ra, den, den_a, den_b, "outward entry", l) / e.zf_over_zb_sqrt /
          ext.value;
  } else {
    out = guarded_quotient(-j * c * data.deriv_ra, den, den_a, den_b, "outward entry", l) *
          (e.at_rb.eps_perp / e.at_ra.eps_perp) / e.zf_over_zb_sqrt / ext.derivative;
  }
  return {rho, out};
}

void check_lmax(int lmax) {
  if (lmax < 1) throw DomainError("lmax must be >= 1");
}

template <class F>
DegreeEntries per_degree(int lmax, F&& entry) {
  check_lmax(lmax);
  DegreeEntries out;
  for (int l = 1; l <= lmax; ++l) {
    out.te.push_back(entry(Family::te, l));
    out.tm.push_back(entry(Family::tm, l));
  }
  return out;
}

void expand(std::vector<cplx>& dst, const DegreeEntries& src, int lmax) {
  dst.resize(static_cast<std::size_t>(mode_count(lmax)));
  for (int n = 0; n < mode_count(lmax); ++n) {
    const auto mode = mode_unindex(n);
    dst[n] = mode.tau == 1 ? src.te[mode.l - 1] : src.tm[mode.l - 1];
  }
}

}  // namespace

DegreeEntries transition_entries(const ShellGeometry& g, double f, int lmax, const RadialOptions& options) {
  const Ends e = ends_of(g, f);
  return per_degree(lmax, [&](Family fam, int l) { return forward_mode(g, e, fam, l, f, options).t; });
}

DegreeEntries inward_entries(const ShellGeometry& g, double f, int lmax, const RadialOptions& options) {
  const Ends e = ends_of(g, f);
  return per_degree(lmax, [&](Family fam, int l) { return forward_mode(g, e, fam, l, f, options).phi; });
}

DegreeEntries reflection_entries(const ShellGeometry& g, double f, int lmax, const RadialOptions& options) {
  const Ends e = ends_of(g, f);
  return per_degree(lmax, [&](Family fam, int l) { return backward_mode(g, e, fam, l, f, options).rho; });
}

DegreeEntries outward_entries(const ShellGeometry& g, double f, int lmax, const RadialOptions& options) {
  const Ends e = ends_of(g, f);
  return per_degree(lmax, [&](Family fam, int l) { return backward_mode(g, e, fam, l, f, options).psi; });
}

SSOSet assemble(const ShellGeometry& g, double f, int lmax, const RadialOptions& options) {
  check_lmax(lmax);
  if (!(f > 0.0)) throw DomainError("frequency must be positive");
  const Ends e = ends_of(g, f);
  DegreeEntries t, phi, rho, psi;
  for (int l = 1; l <= lmax; ++l) {
    for (Family fam : {Family::te, Family::tm}) {
      const auto fw = forward_mode(g, e, fam, l, f, options);
      const auto bw = backward_mode(g, e, fam, l, f, options);
      const bool te = fam == Family::te;
      (te ? t.te : t.tm).push_back(fw.t);
      (te ? phi.te : phi.tm).push_back(fw.phi);
      (te ? rho.te : rho.tm).push_back(bw.rho);
      (te ? psi.te : psi.tm).push_back(bw.psi);
    }
  }
  SSOSet out;
  out.frequency_hz = f;
  out.lmax = lmax;
  out.bubble = g.bubble;
  expand(out.t, t, lmax);
  expand(out.phi, phi, lmax);
  expand(out.rho, rho, lmax);
  expand(out.psi, psi, lmax);
  return out;
}

SSOSet identity_sso(double frequency_hz, int lmax) {
  check_lmax(lmax);
  const auto n = static_cast<std::size_t>(mode_count(lmax));
  SSOSet out;
  out.frequency_hz = frequency_hz;
  out.lmax = lmax;
  out.t.assign(n, 0.0);
  out.rho.assign(n, 0.0);
  out.phi.assign(n, 1.0);
  out.psi.assign(n, 1.0);
  return out;
}

}  // namespace shellgsm
