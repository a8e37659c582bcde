#include "shellgsm/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "shellgsm/error.hpp"

namespace shellgsm {

namespace {

cplx perp_of(const MediumSample& s, Family f) { return f == Family::te ? s.mu_perp : s.eps_perp; }
cplx ratio_of(const MediumSample& s, Family f) {
  return f == Family::te ? s.mu_perp / s.mu_r : s.eps_perp / s.eps_r;
}
cplx region_of(const HomogeneousRegion& h, Family f) { return f == Family::te ? h.mu : h.eps; }

const char* family_name(Family f) { return f == Family::te ? "TE" : "TM"; }

// Segment entry and exit radii for a direction.
std::pair<double, double> ends(const LayerSegment& s, Direction d) {
  return d == Direction::forward ? std::pair{s.r_inner, s.r_outer} : std::pair{s.r_outer, s.r_inner};
}

RadialBoundaryData make_data(Family family, int l, Direction d, RadialState entry,
                             RadialState exit) {
  RadialBoundaryData out;
  out.family = family;
  out.l = l;
  out.direction = d;
  const RadialState& inner = d == Direction::forward ? entry : exit;
  const RadialState& outer = d == Direction::forward ? exit : entry;
  out.value_rb = inner.value;
  out.deriv_rb = inner.derivative;
  out.value_ra = outer.value;
  out.deriv_ra = outer.derivative;
  return out;
}

// g = A z1(k r) + B z2(k r) with (z1, z2) = (psi_L, xi_L); the Wronskian
// z1 z2' - z1' z2 = -j gives the 2x2 solve in closed form.
RadialState transport_closed(double order, cplx k, double r0, double r1, RadialState ic) {
  const auto f0 = riccati(order, k * r0);
  const auto f1 = riccati(order, k * r1);
  const cplx det = -cplx(0.0, 1.0) * k;
  const cplx a = (ic.value * k * f0.xi.derivative - ic.derivative * f0.xi.value) / det;
  const cplx b = (ic.derivative * f0.psi.value - ic.value * k * f0.psi.derivative) / det;
  RadialState out{a * f1.psi.value + b * f1.xi.value,
                  k * (a * f1.psi.derivative + b * f1.xi.derivative)};
  if (!std::isfinite(std::abs(out.value)) || !std::isfinite(std::abs(out.derivative)))
    throw NumericError("closed-form transport overflowed (order " + std::to_string(order) + ")");
  return out;
}

void require_constant(const LayerSegment& s, const char* who) {
  if (!s.is_constant()) throw DomainError(std::string(who) + ": segment is not constant");
}

}  // namespace

cplx anisotropic_order(cplx ratio, int l) {
  if (l < 0) throw DomainError("anisotropic order: degree must be >= 0");
  return std::sqrt(ratio * (l * (l + 1.0)) + 0.25) - 0.5;
}

RadialState initial_condition_forward(const ShellGeometry& g, Family family, int l, double frequency_hz) {
  if (g.segments.empty()) throw DomainError("initial condition: geometry has no segments");
  const cplx kb = g.bubble.wavenumber(frequency_hz);
  const auto psi = riccati_psi(l, kb * g.rb);
  if (std::abs(psi.value) <= 1e-13 * std::abs(psi.derivative))
    throw DegenerateError("resonance-degenerate input: psi_l(kb rb) vanishes for l = " + std::to_string(l), l);
  const cplx perp = perp_of(g.segments.front().at(g.rb), family);
  return {1.0, kb * perp / region_of(g.bubble, family) * psi.derivative / psi.value};
}

RadialState initial_condition_backward(const ShellGeometry& g, Family family, int l, double frequency_hz) {
  if (g.segments.empty()) throw DomainError("initial condition: geometry has no segments");
  const cplx kf = g.exterior.wavenumber(frequency_hz);
  const auto xi = riccati_xi(l, kf * g.ra);
  if (std::abs(xi.value) <= 1e-13 * std::abs(xi.derivative))
    throw DegenerateError("resonance-degenerate input: xi_l(kf ra) vanishes for l = " + std::to_string(l), l);
  const cplx perp = perp_of(g.segments.back().at(g.ra), family);
  return {1.0, kf * perp / region_of(g.exterior, family) * xi.derivative / xi.value};
}

RadialBoundaryData solve_closed_isotropic(const LayerSegment& segment, Family family, int l,
                                          double frequency_hz, RadialState ic, Direction direction) {
  require_constant(segment, "closed isotropic solve");
  const auto m = std::get<MediumSample>(segment.profile);
  if (!m.isotropic()) throw DomainError("closed isotropic solve: segment is anisotropic");
  const cplx k = free_space_wavenumber(frequency_hz) * std::sqrt(m.eps_perp * m.mu_perp);
  const auto [r0, r1] = ends(segment, direction);
  return make_data(family, l, direction, ic, transport_closed(l, k, r0, r1, ic));
}

RadialBoundaryData solve_closed_anisotropic(const LayerSegment& segment, Family family, int l,
                                            double frequency_hz, RadialState ic, Direction direction) {
  require_constant(segment, "closed anisotropic solve");
  const auto m = std::get<MediumSample>(segment.profile);
  const cplx ratio = ratio_of(m, family);
  if (ratio.imag() != 0.0 || !(ratio.real() > 0.0))
    throw DomainError("closed anisotropic solve: needs a real positive anisotropy ratio");
  const double order = anisotropic_order(ratio, l).real();
  const cplx k = free_space_wavenumber(frequency_hz) * std::sqrt(m.eps_perp * m.mu_perp);
  const auto [r0, r1] = ends(segment, direction);
  return make_data(family, l, direction, ic, transport_closed(order, k, r0, r1, ic));
}

namespace {

// y = (g, g'), y' = (g', -p g' - q g).
struct RadialSystem {
  const LayerSegment& seg;
  Family family;
  double centrifugal;
  double k0sq;
  double fd_step;

  cplx perp_derivative(double r) const {
    if (const auto* p = std::get_if<RadialProfile>(&seg.profile)) {
      const auto& analytic = family == Family::te ? p->d_mu_perp : p->d_eps_perp;
      if (analytic) return analytic(r);
      const auto& f = family == Family::te ? p->mu_perp : p->eps_perp;
      const double h = fd_step;
      if (r - h < seg.r_inner) return (-3.0 * f(r) + 4.0 * f(r + h) - f(r + 2 * h)) / (2 * h);
      if (r + h > seg.r_outer) return (3.0 * f(r) - 4.0 * f(r - h) + f(r - 2 * h)) / (2 * h);
      return (f(r + h) - f(r - h)) / (2 * h);
    }
    return 0.0;
  }

  std::array<cplx, 2> operator()(double r, const std::array<cplx, 2>& y) const {
    const MediumSample m = seg.at(r);
    const cplx perp = perp_of(m, family);
    const cplx p = -perp_derivative(r) / perp;
    const cplx q = k0sq * m.mu_perp * m.eps_perp - ratio_of(m, family) * centrifugal / (r * r);
    return {y[1], -p * y[1] - q * y[0]};
  }
};

using State = std::array<cplx, 2>;

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    out[0] += h * c * (*k)[0];
    out[1] += h * c * (*k)[1];
  }
  return out;
}

}  // namespace

RadialBoundaryData solve_numeric(const LayerSegment& segment, Family family, int l, double frequency_hz,
                                 RadialState ic, Direction direction, const OdeTolerance& tol) {
  const double k0 = free_space_wavenumber(frequency_hz);
  const double width = segment.r_outer - segment.r_inner;
  const RadialSystem f{segment, family, l * (l + 1.0), k0 * k0, 1e-6 * width};
  const auto [r0, r1] = ends(segment, direction);
  const double sign = r1 > r0 ? 1.0 : -1.0;

  // Dormand-Prince 5(4) tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  State y{ic.value, ic.derivative};
  double r = r0;
  double h = sign * width / 64.0;
  State k1 = f(r, y);
  long steps = 0;
  while (sign * (r1 - r) > 0.0) {
    if (++steps > tol.max_steps) {
      std::ostringstream msg;
      msg << "radial ODE (" << family_name(family) << ", l = " << l << "): step limit reached at r = " << r << " m";
      throw NumericError(msg.str());
    }
    if (sign * (r + h - r1) > 0.0) h = r1 - r;
    const State k2 = f(r + c2 * h, axpy(y, h, {{a21, &k1}}));
    const State k3 = f(r + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const State k4 = f(r + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = f(r + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = f(r + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State yn = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = f(r + h, yn);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = tol.atol + tol.rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    if (!std::isfinite(err)) {
      std::ostringstream msg;
      msg << "radial ODE (" << family_name(family) << ", l = " << l << "): non-finite state at r = " << r << " m";
      throw NumericError(msg.str());
    }
    if (err <= 1.0) {
      r = (sign * (r + h - r1) >= 0.0) ? r1 : r + h;
      y = yn;
      k1 = k7;
      h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-30), -0.2)));
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
    if (std::abs(h) < 1e-14 * std::max(std::abs(r), width)) {
      std::ostringstream msg;
      msg << "radial ODE (" << family_name(family) << ", l = " << l
          << "): step size underflow (stiff profile?) at r = " << r << " m";
      throw NumericError(msg.str());
    }
  }
  return make_data(family, l, direction, ic, {y[0], y[1]});
}

namespace {

template <class F>
auto annotated(std::size_t index, F&& body) {
  const std::string where = "segment " + std::to_string(index) + ": ";
  try {
    return body();
  } catch (const DegenerateError& e) {
    throw DegenerateError(where + e.what(), e.degree());
  } catch (const NumericError& e) {
    throw NumericError(where + e.what());
  } catch (const DomainError& e) {
    throw DomainError(where + e.what());
  }
}

RadialBoundaryData solve_segment(const LayerSegment& seg, Family family, int l, double frequency_hz,
                                 RadialState ic, Direction direction, const RadialOptions& options) {
  if (seg.is_constant() && !options.force_numeric) {
    const auto& m = std::get<MediumSample>(seg.profile);
    if (m.isotropic()) return solve_closed_isotropic(seg, family, l, frequency_hz, ic, direction);
    const cplx ratio = ratio_of(m, family);
    // A lossy anisotropy ratio gives a complex order, outside the closed form.
    if (ratio.imag() == 0.0 && ratio.real() > 0.0)
      return solve_closed_anisotropic(seg, family, l, frequency_hz, ic, direction);
  }
  return solve_numeric(seg, family, l, frequency_hz, ic, direction, options.tol);
}

}  // namespace

RadialBoundaryData propagate_stack(const ShellGeometry& geometry, Family family, int l, double frequency_hz,
                                   Direction direction, const RadialOptions& options) {
  const auto& segs = geometry.segments;
  if (segs.empty()) throw DomainError("propagate: geometry has no segments");
  const RadialState start = direction == Direction::forward
                                ? initial_condition_forward(geometry, family, l, frequency_hz)
                                : initial_condition_backward(geometry, family, l, frequency_hz);
  RadialState state = start;
  const std::size_t n = segs.size();
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = direction == Direction::forward ? step : n - 1 - step;
    const LayerSegment& seg = segs[i];
    if (step > 0) {
      // Tangential fields continuous: g and g'/perp carry across.
      const std::size_t prev = direction == Direction::forward ? i - 1 : i + 1;
      const double r = direction == Direction::forward ? seg.r_inner : seg.r_outer;
      state.derivative *= perp_of(seg.at(r), family) / perp_of(segs[prev].at(r), family);
    }
    // Unit-magnitude entry keeps thick lossy stacks away from overflow.
    const double scale = state.value != cplx(0.0) ? std::abs(state.value) : std::abs(state.derivative);
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw NumericError("segment " + std::to_string(i) + ": radial solution vanished or overflowed");
    const RadialState entry{state.value / scale, state.derivative / scale};
    const auto data = annotated(i, [&] { return solve_segment(seg, family, l, frequency_hz, entry, direction, options); });
    state = direction == Direction::forward ? RadialState{data.value_ra * scale, data.deriv_ra * scale}
                                            : RadialState{data.value_rb * scale, data.deriv_rb * scale};
  }
  RadialBoundaryData out;
  out.family = family;
  out.l = l;
  out.direction = direction;
  if (direction == Direction::forward) {
    out.value_rb = start.value;
    out.deriv_rb = start.derivative;
    out.value_ra = state.value;
    out.deriv_ra = state.derivative;
  } else {
    out.value_ra = start.value;
    out.deriv_ra = start.derivative;
    out.value_rb = state.value;
    out.deriv_rb = state.derivative;
  }
  return out;
}

}  // namespace shellgsm
