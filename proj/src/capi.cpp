#include "shellgsm/shellgsm.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "shellgsm/error.hpp"
#include "shellgsm/expression.hpp"
#include "shellgsm/oracles.hpp"

#ifndef SHELLGSM_VERSION
#define SHELLGSM_VERSION "0.0.0"
#endif

namespace sg = shellgsm;

struct sg_geometry {
  sg::ShellGeometry g;
};
struct sg_sso {
  sg::SSOSet s;
};
struct sg_gsm_set {
  std::vector<sg::AntennaGSM> blocks;
};
struct sg_effective {
  sg::EffectiveGSM e;
};

namespace {

thread_local std::string last_error;

sg::cplx to_cplx(sg_complex z) { return {z.re, z.im}; }
sg_complex from_cplx(sg::cplx z) { return {z.real(), z.imag()}; }

void require(const void* p, const char* name) {
  if (!p) throw sg::Error(sg::ErrorCode::invalid_argument, std::string(name) + " must not be NULL");
}

template <class F>
sg_status guarded(F&& body) {
  try {
    body();
    return SG_OK;
  } catch (const sg::Error& e) {
    last_error = e.what();
    return static_cast<sg_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = std::string("internal error: ") + e.what();
  } catch (...) {
    last_error = "internal error";
  }
  return SG_ERR_INTERNAL;
}

sg::RadialOptions to_options(const sg_solver_options* o) {
  sg::RadialOptions out;
  if (!o) return out;
  if (!(o->rtol > 0.0) || !(o->atol > 0.0) || o->max_steps < 1)
    throw sg::Error(sg::ErrorCode::invalid_argument, "solver tolerances must be positive");
  out.tol = {o->rtol, o->atol, o->max_steps};
  out.force_numeric = o->force_numeric != 0;
  return out;
}

void copy_matrix(const sg::MatrixC& m, sg_complex* out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = from_cplx(m(i, j));
}

template <class G>
const sg::MatrixC& pick_block(const G& g, char which) {
  switch (which) {
    case 'G': case 'g': return g.gamma;
    case 'R': case 'r': return g.r;
    case 'T': case 't': return g.t;
    case 'S': case 's': return g.s;
    default: throw sg::Error(sg::ErrorCode::invalid_argument, "block must be one of G, R, T, S");
  }
}

const sg::AntennaGSM& block_at(const sg_gsm_set* set, int index) {
  require(set, "set");
  if (index < 0 || index >= static_cast<int>(set->blocks.size()))
    throw sg::Error(sg::ErrorCode::invalid_argument, "GSM block index out of range");
  return set->blocks[static_cast<std::size_t>(index)];
}

std::vector<sg::SphericalDirection> directions(const double* theta, const double* phi, int count) {
  if (count < 0) throw sg::Error(sg::ErrorCode::invalid_argument, "direction count must be >= 0");
  if (count > 0) {
    require(theta, "theta");
    require(phi, "phi");
  }
  std::vector<sg::SphericalDirection> out;
  for (int i = 0; i < count; ++i) out.push_back({theta[i], phi[i]});
  return out;
}

sg::PlaneWaveSpec to_spec(const sg_plane_wave* pw) {
  require(pw, "plane wave");
  return {pw->theta_inc, pw->phi_inc, {to_cplx(pw->pol_theta), to_cplx(pw->pol_phi)}, pw->amplitude};
}

void copy_string(char* dst, std::size_t cap, const std::string& src) {
  const std::size_t n = std::min(cap - 1, src.size());
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

}  // namespace

extern "C" {

const char* sg_version(void) { return SHELLGSM_VERSION; }
const char* sg_last_error(void) { return last_error.c_str(); }

const char* sg_status_name(sg_status status) {
  switch (status) {
    case SG_OK: return "ok";
    case SG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SG_ERR_DOMAIN: return "domain error";
    case SG_ERR_DEGENERATE: return "degenerate input";
    case SG_ERR_NUMERIC: return "numeric failure";
    case SG_ERR_PARSE: return "parse error";
    case SG_ERR_IO: return "i/o error";
    case SG_ERR_DIMENSION: return "dimension mismatch";
    case SG_ERR_VALIDATION: return "validation failure";
    case SG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

sg_status sg_riccati(double order, sg_complex x, sg_complex out[4]) {
  return guarded([&] {
    require(out, "out");
    const auto r = sg::riccati(order, to_cplx(x));
    out[0] = from_cplx(r.psi.value);
    out[1] = from_cplx(r.psi.derivative);
    out[2] = from_cplx(r.xi.value);
    out[3] = from_cplx(r.xi.derivative);
  });
}

sg_status sg_truncation_degree(double kf, double ra, int* lmax) {
  return guarded([&] {
    require(lmax, "lmax");
    *lmax = sg::truncation_degree(kf, ra);
  });
}

int sg_mode_count(int lmax) { return lmax < 1 ? 0 : sg::mode_count(lmax); }

sg_status sg_mode_index(int tau, int odd, int m, int l, int* index) {
  return guarded([&] {
    require(index, "index");
    *index = sg::mode_index(tau, odd ? sg::Parity::odd : sg::Parity::even, m, l);
  });
}

sg_status sg_mode_unindex(int index, int* tau, int* odd, int* m, int* l) {
  return guarded([&] {
    const auto mode = sg::mode_unindex(index);
    if (tau) *tau = mode.tau;
    if (odd) *odd = mode.sigma == sg::Parity::odd;
    if (m) *m = mode.m;
    if (l) *l = mode.l;
  });
}

sg_status sg_expression_eval(const char* expr, double r, sg_complex* value, sg_complex* derivative,
                             int* error_column) {
  if (error_column) *error_column = 0;
  return guarded([&] {
    require(expr, "expr");
    try {
      const auto e = sg::Expression::parse(expr);
      const auto [v, d] = e.evaluate(r);
      if (value) *value = from_cplx(v);
      if (derivative) *derivative = from_cplx(d);
    } catch (const sg::ParseError& e) {
      if (error_column) *error_column = e.column();
      throw;
    }
  });
}

sg_status sg_geometry_create(double rb, double ra, sg_complex bubble_eps, sg_complex bubble_mu,
                             sg_complex exterior_eps, sg_complex exterior_mu, sg_geometry** out) {
  return guarded([&] {
    require(out, "out");
    auto* g = new sg_geometry;
    g->g.rb = rb;
    g->g.ra = ra;
    g->g.bubble = {to_cplx(bubble_eps), to_cplx(bubble_mu)};
    g->g.exterior = {to_cplx(exterior_eps), to_cplx(exterior_mu)};
    *out = g;
  });
}

sg_status sg_geometry_clone(const sg_geometry* g, sg_geometry** out) {
  return guarded([&] {
    require(g, "geometry");
    require(out, "out");
    *out = new sg_geometry{g->g};
  });
}

void sg_geometry_destroy(sg_geometry* g) { delete g; }

sg_status sg_geometry_add_constant(sg_geometry* g, double r_inner, double r_outer, sg_complex eps_perp,
                                   sg_complex eps_r, sg_complex mu_perp, sg_complex mu_r) {
  return guarded([&] {
    require(g, "geometry");
    g->g.segments.push_back(
        {r_inner, r_outer, sg::MediumSample{to_cplx(eps_perp), to_cplx(eps_r), to_cplx(mu_perp), to_cplx(mu_r)}});
  });
}

sg_status sg_geometry_add_profile(sg_geometry* g, double r_inner, double r_outer, const char* eps_perp,
                                  const char* eps_r, const char* mu_perp, const char* mu_r) {
  return guarded([&] {
    require(g, "geometry");
    require(eps_perp, "eps_perp");
    require(eps_r, "eps_r");
    require(mu_perp, "mu_perp");
    require(mu_r, "mu_r");
    const auto ep = sg::Expression::parse(eps_perp);
    const auto er = sg::Expression::parse(eps_r);
    const auto mp = sg::Expression::parse(mu_perp);
    const auto mr = sg::Expression::parse(mu_r);
    sg::RadialProfile p;
    p.eps_perp = [ep](double r) { return ep(r); };
    p.eps_r = [er](double r) { return er(r); };
    p.mu_perp = [mp](double r) { return mp(r); };
    p.mu_r = [mr](double r) { return mr(r); };
    p.d_eps_perp = [ep](double r) { return ep.derivative(r); };
    p.d_mu_perp = [mp](double r) { return mp.derivative(r); };
    g->g.segments.push_back({r_inner, r_outer, std::move(p)});
  });
}

sg_status sg_geometry_set_constant(sg_geometry* g, int segment, sg_complex eps_perp, sg_complex eps_r,
                                   sg_complex mu_perp, sg_complex mu_r) {
  return guarded([&] {
    require(g, "geometry");
    if (segment < 0 || segment >= static_cast<int>(g->g.segments.size()))
      throw sg::Error(sg::ErrorCode::invalid_argument, "segment index out of range");
    auto& s = g->g.segments[static_cast<std::size_t>(segment)];
    if (!s.is_constant()) throw sg::Error(sg::ErrorCode::invalid_argument, "segment is not constant");
    s.profile = sg::MediumSample{to_cplx(eps_perp), to_cplx(eps_r), to_cplx(mu_perp), to_cplx(mu_r)};
  });
}

int sg_geometry_segment_count(const sg_geometry* g) { return g ? static_cast<int>(g->g.segments.size()) : 0; }

sg_status sg_geometry_validate(const sg_geometry* g) {
  return guarded([&] {
    require(g, "geometry");
    if (auto problem = sg::validate(g->g)) throw sg::Error(sg::ErrorCode::validation, *problem);
  });
}

sg_status sg_geometry_sample(const sg_geometry* g, double r, int outer_side, sg_complex out[4]) {
  return guarded([&] {
    require(g, "geometry");
    require(out, "out");
    const auto s = sg::sample(g->g, r, outer_side ? sg::Side::outer : sg::Side::inner);
    out[0] = from_cplx(s.eps_perp);
    out[1] = from_cplx(s.eps_r);
    out[2] = from_cplx(s.mu_perp);
    out[3] = from_cplx(s.mu_r);
  });
}

sg_status sg_geometry_staircase(const sg_geometry* g, int n_layers, sg_geometry** out) {
  return guarded([&] {
    require(g, "geometry");
    require(out, "out");
    *out = new sg_geometry{sg::staircase(g->g, n_layers)};
  });
}

sg_status sg_geometry_exterior(const sg_geometry* g, sg_complex* eps, sg_complex* mu) {
  return guarded([&] {
    require(g, "geometry");
    if (eps) *eps = from_cplx(g->g.exterior.eps);
    if (mu) *mu = from_cplx(g->g.exterior.mu);
  });
}

sg_status sg_geometry_bubble(const sg_geometry* g, sg_complex* eps, sg_complex* mu) {
  return guarded([&] {
    require(g, "geometry");
    if (eps) *eps = from_cplx(g->g.bubble.eps);
    if (mu) *mu = from_cplx(g->g.bubble.mu);
  });
}

sg_status sg_geometry_radii(const sg_geometry* g, double* rb, double* ra) {
  return guarded([&] {
    require(g, "geometry");
    if (rb) *rb = g->g.rb;
    if (ra) *ra = g->g.ra;
  });
}

void sg_solver_options_default(sg_solver_options* options) {
  if (!options) return;
  const sg::OdeTolerance d;
  options->rtol = d.rtol;
  options->atol = d.atol;
  options->max_steps = d.max_steps;
  options->force_numeric = 0;
}

sg_status sg_sso_assemble(const sg_geometry* g, double frequency_hz, int lmax, const sg_solver_options* options,
                          sg_sso** out) {
  return guarded([&] {
    require(g, "geometry");
    require(out, "out");
    *out = new sg_sso{sg::assemble(g->g, frequency_hz, lmax, to_options(options))};
  });
}

sg_status sg_sso_identity(double frequency_hz, int lmax, sg_complex bubble_eps, sg_complex bubble_mu, sg_sso** out) {
  return guarded([&] {
    require(out, "out");
    auto s = sg::identity_sso(frequency_hz, lmax);
    s.bubble = {to_cplx(bubble_eps), to_cplx(bubble_mu)};
    *out = new sg_sso{std::move(s)};
  });
}

void sg_sso_destroy(sg_sso* s) { delete s; }

int sg_sso_lmax(const sg_sso* s) { return s ? s->s.lmax : 0; }

sg_status sg_sso_entries(const sg_sso* s, sg_complex* t, sg_complex* phi, sg_complex* rho, sg_complex* psi) {
  return guarded([&] {
    require(s, "sso");
    const auto copy = [](const std::vector<sg::cplx>& src, sg_complex* dst) {
      if (!dst) return;
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = from_cplx(src[i]);
    };
    copy(s->s.t, t);
    copy(s->s.phi, phi);
    copy(s->s.rho, rho);
    copy(s->s.psi, psi);
  });
}

sg_status sg_gsm_load(const char* path, sg_gsm_set** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new sg_gsm_set{sg::load_gsm(path)};
  });
}

sg_status sg_gsm_save(const sg_gsm_set* set, const char* path) {
  return guarded([&] {
    require(set, "set");
    require(path, "path");
    sg::save_gsm(set->blocks, path);
  });
}

sg_status sg_gsm_synthetic(const char* kind, const double* frequencies_hz, int count, int lmax, int num_ports,
                           sg_complex bubble_eps, sg_complex bubble_mu, sg_gsm_set** out) {
  return guarded([&] {
    require(kind, "kind");
    require(out, "out");
    if (count < 1) throw sg::Error(sg::ErrorCode::invalid_argument, "need at least one frequency");
    require(frequencies_hz, "frequencies_hz");
    const std::string k = kind;
    if (k != "transparent" && k != "null")
      throw sg::Error(sg::ErrorCode::invalid_argument, "synthetic antenna must be 'transparent' or 'null'");
    const sg::HomogeneousRegion bubble{to_cplx(bubble_eps), to_cplx(bubble_mu)};
    auto set = std::make_unique<sg_gsm_set>();
    for (int i = 0; i < count; ++i)
      set->blocks.push_back(k == "null" ? sg::null_antenna(frequencies_hz[i], lmax, num_ports, bubble)
                                        : sg::transparent_antenna(frequencies_hz[i], lmax, num_ports, bubble));
    *out = set.release();
  });
}

sg_status sg_gsm_random(const double* frequencies_hz, int count, int lmax, int num_ports, double contrast,
                        unsigned long long seed, sg_gsm_set** out) {
  return guarded([&] {
    require(out, "out");
    if (count < 1) throw sg::Error(sg::ErrorCode::invalid_argument, "need at least one frequency");
    require(frequencies_hz, "frequencies_hz");
    auto set = std::make_unique<sg_gsm_set>();
    for (int i = 0; i < count; ++i)
      set->blocks.push_back(sg::random_antenna(frequencies_hz[i], lmax, num_ports, contrast, seed + i));
    *out = set.release();
  });
}

void sg_gsm_destroy(sg_gsm_set* set) { delete set; }

int sg_gsm_count(const sg_gsm_set* set) { return set ? static_cast<int>(set->blocks.size()) : 0; }

sg_status sg_gsm_info(const sg_gsm_set* set, int* lmax, int* num_ports, sg_complex* bubble_eps,
                      sg_complex* bubble_mu) {
  return guarded([&] {
    const auto& b = block_at(set, 0);
    if (lmax) *lmax = b.lmax;
    if (num_ports) *num_ports = b.num_ports;
    if (bubble_eps) *bubble_eps = from_cplx(b.bubble.eps);
    if (bubble_mu) *bubble_mu = from_cplx(b.bubble.mu);
  });
}

sg_status sg_gsm_frequency(const sg_gsm_set* set, int index, double* frequency_hz) {
  return guarded([&] {
    require(frequency_hz, "frequency_hz");
    *frequency_hz = block_at(set, index).frequency_hz;
  });
}

sg_status sg_gsm_find(const sg_gsm_set* set, double frequency_hz, int* index) {
  return guarded([&] {
    require(set, "set");
    require(index, "index");
    for (std::size_t i = 0; i < set->blocks.size(); ++i) {
      if (std::abs(set->blocks[i].frequency_hz - frequency_hz) <= 1.0) {
        *index = static_cast<int>(i);
        return;
      }
    }
    throw sg::Error(sg::ErrorCode::domain,
                    "antenna GSM has no block within 1 Hz of " + std::to_string(frequency_hz) + " Hz");
  });
}

sg_status sg_gsm_block(const sg_gsm_set* set, int index, char which, sg_complex* out) {
  return guarded([&] {
    require(out, "out");
    copy_matrix(pick_block(block_at(set, index), which), out);
  });
}

sg_status sg_compose(const sg_gsm_set* set, int index, const sg_sso* sso, unsigned blocks, sg_effective** out) {
  return guarded([&] {
    require(sso, "sso");
    require(out, "out");
    *out = new sg_effective{sg::compose(block_at(set, index), sso->s, blocks)};
  });
}

void sg_effective_destroy(sg_effective* e) { delete e; }

sg_status sg_effective_info(const sg_effective* e, double* frequency_hz, int* lmax, int* num_ports) {
  return guarded([&] {
    require(e, "effective");
    if (frequency_hz) *frequency_hz = e->e.frequency_hz;
    if (lmax) *lmax = e->e.lmax;
    if (num_ports) *num_ports = e->e.num_ports;
  });
}

sg_status sg_effective_block(const sg_effective* e, char which, sg_complex* out) {
  return guarded([&] {
    require(e, "effective");
    require(out, "out");
    const auto& m = pick_block(e->e, which);
    if (m.size() == 0) throw sg::Error(sg::ErrorCode::invalid_argument, "block was not computed");
    copy_matrix(m, out);
  });
}

sg_status sg_effective_save(const sg_effective* const* effs, int count, sg_complex bubble_eps, sg_complex bubble_mu,
                            const char* path) {
  return guarded([&] {
    require(effs, "effs");
    require(path, "path");
    std::vector<sg::AntennaGSM> blocks;
    for (int i = 0; i < count; ++i) {
      require(effs[i], "effective");
      const auto& e = effs[i]->e;
      blocks.push_back({e.frequency_hz, e.num_ports, e.lmax, {to_cplx(bubble_eps), to_cplx(bubble_mu)}, e.gamma,
                        e.r, e.t, e.s});
    }
    sg::save_gsm(blocks, path);
  });
}

sg_status sg_respond(const sg_effective* e, const sg_complex* v, const sg_complex* a_f, sg_complex* w,
                     sg_complex* f) {
  return guarded([&] {
    require(e, "effective");
    require(v, "v");
    require(a_f, "a_f");
    const int p = e->e.num_ports;
    const int n = sg::mode_count(e->e.lmax);
    sg::VectorC vv(p), av(n);
    for (int i = 0; i < p; ++i) vv[i] = to_cplx(v[i]);
    for (int i = 0; i < n; ++i) av[i] = to_cplx(a_f[i]);
    const auto r = sg::respond(e->e, vv, av);
    if (w)
      for (int i = 0; i < p; ++i) w[i] = from_cplx(r.w[i]);
    if (f)
      for (int i = 0; i < n; ++i) f[i] = from_cplx(r.f[i]);
  });
}

sg_status sg_plane_wave_coefficients(const sg_plane_wave* pw, int lmax, const sg_geometry* g, double frequency_hz,
                                     sg_complex* a_f) {
  return guarded([&] {
    require(g, "geometry");
    require(a_f, "a_f");
    const auto a = sg::plane_wave_coefficients(to_spec(pw), lmax, g->g.exterior, frequency_hz);
    for (Eigen::Index i = 0; i < a.size(); ++i) a_f[i] = from_cplx(a[i]);
  });
}

sg_status sg_far_field(const sg_complex* f, int lmax, const sg_geometry* g, const double* theta, const double* phi,
                       int count, sg_complex* f_theta, sg_complex* f_phi) {
  return guarded([&] {
    require(f, "f");
    require(g, "geometry");
    if (lmax < 1) throw sg::Error(sg::ErrorCode::invalid_argument, "lmax must be >= 1");
    sg::VectorC fv(sg::mode_count(lmax));
    for (Eigen::Index i = 0; i < fv.size(); ++i) fv[i] = to_cplx(f[i]);
    const auto dirs = directions(theta, phi, count);
    const auto samples = sg::far_field(fv, lmax, g->g.exterior, dirs);
    for (int i = 0; i < count; ++i) {
      if (f_theta) f_theta[i] = from_cplx(samples[i].f_theta);
      if (f_phi) f_phi[i] = from_cplx(samples[i].f_phi);
    }
  });
}

sg_status sg_gain_pattern(const sg_effective* e, const sg_complex* v, const sg_geometry* g, const double* theta,
                          const double* phi, int count, double* gain) {
  return guarded([&] {
    require(e, "effective");
    require(v, "v");
    require(g, "geometry");
    require(gain, "gain");
    sg::VectorC vv(e->e.num_ports);
    for (Eigen::Index i = 0; i < vv.size(); ++i) vv[i] = to_cplx(v[i]);
    const auto out = sg::gain_pattern(e->e, vv, g->g.exterior, directions(theta, phi, count));
    std::copy(out.begin(), out.end(), gain);
  });
}

sg_status sg_bistatic_rcs(const sg_effective* e, const sg_plane_wave* pw, const sg_geometry* g, const double* theta,
                          const double* phi, int count, double* sigma) {
  return guarded([&] {
    require(e, "effective");
    require(g, "geometry");
    require(sigma, "sigma");
    const auto out = sg::bistatic_rcs(e->e, to_spec(pw), g->g.exterior, directions(theta, phi, count));
    std::copy(out.begin(), out.end(), sigma);
  });
}

sg_status sg_validation_suite(const sg_geometry* g, double frequency_hz, const sg_solver_options* options,
                              sg_check_result* results, int capacity, int* count) {
  return guarded([&] {
    require(g, "geometry");
    require(count, "count");
    const auto checks = sg::run_validation_suite(g->g, frequency_hz, to_options(options));
    *count = static_cast<int>(checks.size());
    for (int i = 0; i < std::min(capacity, *count); ++i) {
      require(results, "results");
      const auto& c = checks[static_cast<std::size_t>(i)];
      copy_string(results[i].name, sizeof results[i].name, c.name);
      copy_string(results[i].detail, sizeof results[i].detail, c.detail);
      results[i].passed = c.passed;
      results[i].metric = c.metric;
      results[i].threshold = c.threshold;
    }
  });
}

sg_status sg_staircase_convergence(const sg_geometry* g, const int* n_list, int count, const sg_gsm_set* set,
                                   const sg_solver_options* options, double* err_gamma, double* err_s) {
  return guarded([&] {
    require(g, "geometry");
    require(set, "set");
    if (count < 0) throw sg::Error(sg::ErrorCode::invalid_argument, "count must be >= 0");
    if (count > 0) require(n_list, "n_list");
    const auto rows = sg::staircase_convergence(g->g, std::span<const int>(n_list, static_cast<std::size_t>(count)),
                                                set->blocks, to_options(options));
    for (int i = 0; i < count; ++i) {
      if (err_gamma) err_gamma[i] = rows[static_cast<std::size_t>(i)].max_err_gamma;
      if (err_s) err_s[i] = rows[static_cast<std::size_t>(i)].max_err_s;
    }
  });
}

}  // extern "C"
