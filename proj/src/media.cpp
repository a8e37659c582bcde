#include "shellgsm/media.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shellgsm/error.hpp"

namespace shellgsm {

bool MediumSample::lossless() const {
  return eps_perp.imag() == 0.0 && eps_r.imag() == 0.0 && mu_perp.imag() == 0.0 &&
         mu_r.imag() == 0.0;
}

cplx HomogeneousRegion::wavenumber(double frequency_hz) const {
  return free_space_wavenumber(frequency_hz) * std::sqrt(eps * mu);
}

cplx HomogeneousRegion::impedance() const { return kVacuumImpedance * std::sqrt(mu / eps); }

MediumSample LayerSegment::at(double r) const {
  if (const auto* c = std::get_if<MediumSample>(&profile)) return *c;
  const auto& p = std::get<RadialProfile>(profile);
  return {p.eps_perp(r), p.eps_r(r), p.mu_perp(r), p.mu_r(r)};
}

MediumSample sample(const ShellGeometry& geometry, double r, Side side) {
  if (!(r >= geometry.rb && r <= geometry.ra)) {
    std::ostringstream msg;
    msg << "sample: radius " << r << " m outside the shell [" << geometry.rb << ", " << geometry.ra << "]";
    throw DomainError(msg.str());
  }
  const auto& segs = geometry.segments;
  if (segs.empty()) throw DomainError("sample: geometry has no segments");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    if (r < s.r_inner || r > s.r_outer) continue;
    // On a shared radius the outer side belongs to the next segment.
    if (r == s.r_outer && side == Side::outer && i + 1 < segs.size()) continue;
    return s.at(r);
  }
  throw DomainError("sample: radius not covered by any segment");
}

ShellGeometry staircase(const ShellGeometry& geometry, int n_layers) {
  if (n_layers < 1) throw DomainError("staircase: n_layers must be >= 1");
  ShellGeometry out = geometry;
  out.segments.clear();
  for (const auto& seg : geometry.segments) {
    if (seg.is_constant()) {
      out.segments.push_back(seg);
      continue;
    }
    const double width = (seg.r_outer - seg.r_inner) / n_layers;
    for (int i = 0; i < n_layers; ++i) {
      const double lo = seg.r_inner + i * width;
      const double hi = (i + 1 == n_layers) ? seg.r_outer : seg.r_inner + (i + 1) * width;
      out.segments.push_back({lo, hi, seg.at(0.5 * (lo + hi))});
    }
  }
  return out;
}

namespace {

bool nonzero_finite(cplx z) {
  return z != cplx(0.0) && std::isfinite(z.real()) && std::isfinite(z.imag());
}

bool sample_ok(const MediumSample& s) {
  return nonzero_finite(s.eps_perp) && nonzero_finite(s.eps_r) && nonzero_finite(s.mu_perp) &&
         nonzero_finite(s.mu_r);
}

}  // namespace

std::optional<std::string> validate(const ShellGeometry& g) {
  if (!(g.rb > 0.0)) return "bubble radius must be positive";
  if (!(g.ra > g.rb)) return "radii not increasing (need 0 < rb < ra)";
  if (!nonzero_finite(g.bubble.eps) || !nonzero_finite(g.bubble.mu))
    return "bubble medium must be finite and nonzero";
  if (!nonzero_finite(g.exterior.eps) || !nonzero_finite(g.exterior.mu))
    return "exterior medium must be finite and nonzero";
  if (g.segments.empty()) return "no layer segments";
  if (g.segments.front().r_inner != g.rb) return "segments do not tile: first segment must start at rb";
  if (g.segments.back().r_outer != g.ra) return "segments do not tile: last segment must end at ra";
  for (std::size_t i = 0; i < g.segments.size(); ++i) {
    const auto& s = g.segments[i];
    const std::string where = "segment " + std::to_string(i) + ": ";
    if (!(s.r_inner > 0.0 && s.r_outer > s.r_inner)) return where + "radii not increasing";
    if (i > 0 && g.segments[i - 1].r_outer != s.r_inner)
      return "segments do not tile: gap or overlap before segment " + std::to_string(i);
    if (const auto* p = std::get_if<RadialProfile>(&s.profile)) {
      if (!p->eps_perp || !p->eps_r || !p->mu_perp || !p->mu_r)
        return where + "profile is missing a constitutive function";
      // Spot-check finiteness at the ends and a few interior points.
      for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double r = s.r_inner + f * (s.r_outer - s.r_inner);
        MediumSample m;
        try {
          m = s.at(r);
        } catch (const Error& e) {
          return where + e.what();
        }
        if (!sample_ok(m)) return where + "profile not finite and nonzero at r = " + std::to_string(r);
      }
    } else if (!sample_ok(std::get<MediumSample>(s.profile))) {
      return where + "constitutive values must be finite and nonzero";
    }
  }
  return std::nullopt;
}

ShellGeometry split_segments(const ShellGeometry& geometry, std::vector<double> radii) {
  std::sort(radii.begin(), radii.end());
  ShellGeometry out = geometry;
  out.segments.clear();
  std::size_t next = 0;
  for (const auto& seg : geometry.segments) {
    double lo = seg.r_inner;
    while (next < radii.size() && radii[next] <= lo) ++next;
    while (next < radii.size() && radii[next] < seg.r_outer) {
      LayerSegment piece = seg;
      piece.r_inner = lo;
      piece.r_outer = radii[next];
      out.segments.push_back(piece);
      lo = radii[next++];
    }
    LayerSegment last = seg;
    last.r_inner = lo;
    out.segments.push_back(last);
  }
  return out;
}

}  // namespace shellgsm
