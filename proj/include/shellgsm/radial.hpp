#pragma once

#include "shellgsm/media.hpp"

namespace shellgsm {

/// TE uses g(r) with mu_perp in the jump conditions, TM uses h(r) with eps_perp.
enum class Family { te, tm };
enum class Direction { forward, backward };

struct RadialState {
  cplx value;
  cplx derivative;
};

/// Boundary values at the two ends of a solve. For a whole stack the ends
/// are rb and ra; for a single segment they are its inner and outer radius.
struct RadialBoundaryData {
  Family family = Family::te;
  int l = 1;
  cplx value_rb, deriv_rb, value_ra, deriv_ra;
  Direction direction = Direction::forward;
};

struct OdeTolerance {
  double rtol = 1e-10;
  double atol = 1e-12;
  long max_steps = 1'000'000;
};

struct RadialOptions {
  OdeTolerance tol;
  /// Integrate constant segments numerically as well (cross-checks).
  bool force_numeric = false;
};

/// g = 1 at rb, g' = (kb mu_perp(rb) / mu_b) psi_l'(kb rb) / psi_l(kb rb);
/// the TM analogue swaps mu for eps.
RadialState initial_condition_forward(const ShellGeometry& geometry, Family family, int l, double frequency_hz);
/// Same at ra with xi_l and the exterior medium.
RadialState initial_condition_backward(const ShellGeometry& geometry, Family family, int l, double frequency_hz);

/// Modified degree sqrt(ratio l(l+1) + 1/4) - 1/2 of a uniaxial layer, with
/// ratio = mu_perp/mu_r (TE) or eps_perp/eps_r (TM).
cplx anisotropic_order(cplx ratio, int l);

/// Closed-form transport across one constant segment. `ic` is the state at
/// the entry radius (r_inner going forward, r_outer going backward).
RadialBoundaryData solve_closed_isotropic(const LayerSegment& segment, Family family, int l,
                                          double frequency_hz, RadialState ic, Direction direction);
RadialBoundaryData solve_closed_anisotropic(const LayerSegment& segment, Family family, int l,
                                            double frequency_hz, RadialState ic, Direction direction);
/// Adaptive Dormand-Prince 5(4) integration of the radial equation.
RadialBoundaryData solve_numeric(const LayerSegment& segment, Family family, int l, double frequency_hz,
                                 RadialState ic, Direction direction, const OdeTolerance& tol = {});

/// Chain the per-segment solves across the whole shell: value continuous,
/// derivative scaled by the mu_perp (TE) or eps_perp (TM) ratio at each
/// interface.
RadialBoundaryData propagate_stack(const ShellGeometry& geometry, Family family, int l, double frequency_hz,
                                   Direction direction, const RadialOptions& options = {});

}  // namespace shellgsm
