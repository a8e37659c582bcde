#ifndef SHELLGSM_H
#define SHELLGSM_H

/* C interface to the shell scattering library.
 *
 * Every function returns an sg_status. On failure the message is available
 * from sg_last_error() on the same thread until the next failing call.
 * Handles are opaque and must be released with the matching _destroy.
 * Matrices are row-major; mode axes follow the canonical ordering
 * (l, then m, then even/odd, then TE/TM). Radii are meters, frequencies Hz.
 */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(SHELLGSM_BUILDING)
#    define SG_API __declspec(dllexport)
#  else
#    define SG_API __declspec(dllimport)
#  endif
#else
#  define SG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sg_status {
  SG_OK = 0,
  SG_ERR_INVALID_ARGUMENT = 1,
  SG_ERR_DOMAIN = 2,
  SG_ERR_DEGENERATE = 3,
  SG_ERR_NUMERIC = 4,
  SG_ERR_PARSE = 5,
  SG_ERR_IO = 6,
  SG_ERR_DIMENSION = 7,
  SG_ERR_VALIDATION = 8,
  SG_ERR_INTERNAL = 99
} sg_status;

typedef struct sg_complex {
  double re;
  double im;
} sg_complex;

typedef struct sg_geometry sg_geometry;
typedef struct sg_sso sg_sso;
typedef struct sg_gsm_set sg_gsm_set;
typedef struct sg_effective sg_effective;

SG_API const char* sg_version(void);
SG_API const char* sg_last_error(void);
SG_API const char* sg_status_name(sg_status status);

/* --- special functions -------------------------------------------------- */

/* out = {psi, psi', xi, xi'} of the given (possibly fractional) order. */
SG_API sg_status sg_riccati(double order, sg_complex x, sg_complex out[4]);
SG_API sg_status sg_truncation_degree(double kf, double ra, int* lmax);
SG_API int sg_mode_count(int lmax);
SG_API sg_status sg_mode_index(int tau, int odd, int m, int l, int* index);
SG_API sg_status sg_mode_unindex(int index, int* tau, int* odd, int* m, int* l);

/* value and d/dr of a profile expression at r. On a parse error the 1-based
 * column is stored in *error_column (if non-NULL). */
SG_API sg_status sg_expression_eval(const char* expr, double r, sg_complex* value, sg_complex* derivative,
                                    int* error_column);

/* --- geometry ----------------------------------------------------------- */

SG_API sg_status sg_geometry_create(double rb, double ra, sg_complex bubble_eps, sg_complex bubble_mu,
                                    sg_complex exterior_eps, sg_complex exterior_mu, sg_geometry** out);
SG_API sg_status sg_geometry_clone(const sg_geometry* g, sg_geometry** out);
SG_API void sg_geometry_destroy(sg_geometry* g);

/* Segments must be appended from the inside out. */
SG_API sg_status sg_geometry_add_constant(sg_geometry* g, double r_inner, double r_outer, sg_complex eps_perp,
                                          sg_complex eps_r, sg_complex mu_perp, sg_complex mu_r);
/* Four expressions in r (meters); see sg_expression_eval for the grammar. */
SG_API sg_status sg_geometry_add_profile(sg_geometry* g, double r_inner, double r_outer, const char* eps_perp,
                                         const char* eps_r, const char* mu_perp, const char* mu_r);
/* Replace the constitutive values of an existing constant segment. */
SG_API sg_status sg_geometry_set_constant(sg_geometry* g, int segment, sg_complex eps_perp, sg_complex eps_r,
                                          sg_complex mu_perp, sg_complex mu_r);
SG_API int sg_geometry_segment_count(const sg_geometry* g);
/* SG_ERR_VALIDATION with the first violated invariant as the message. */
SG_API sg_status sg_geometry_validate(const sg_geometry* g);
/* out = {eps_perp, eps_r, mu_perp, mu_r}; outer_side picks the segment above
 * a shared interface radius. */
SG_API sg_status sg_geometry_sample(const sg_geometry* g, double r, int outer_side, sg_complex out[4]);
SG_API sg_status sg_geometry_staircase(const sg_geometry* g, int n_layers, sg_geometry** out);
SG_API sg_status sg_geometry_exterior(const sg_geometry* g, sg_complex* eps, sg_complex* mu);
SG_API sg_status sg_geometry_bubble(const sg_geometry* g, sg_complex* eps, sg_complex* mu);
SG_API sg_status sg_geometry_radii(const sg_geometry* g, double* rb, double* ra);

/* --- scattering operators ----------------------------------------------- */

typedef struct sg_solver_options {
  double rtol;
  double atol;
  long max_steps;
  int force_numeric; /* integrate constant segments too */
} sg_solver_options;

SG_API void sg_solver_options_default(sg_solver_options* options);

/* options may be NULL for defaults. */
SG_API sg_status sg_sso_assemble(const sg_geometry* g, double frequency_hz, int lmax,
                                 const sg_solver_options* options, sg_sso** out);
SG_API sg_status sg_sso_identity(double frequency_hz, int lmax, sg_complex bubble_eps, sg_complex bubble_mu,
                                 sg_sso** out);
SG_API void sg_sso_destroy(sg_sso* s);
SG_API int sg_sso_lmax(const sg_sso* s);
/* Each output array holds sg_mode_count(lmax) entries; any may be NULL. */
SG_API sg_status sg_sso_entries(const sg_sso* s, sg_complex* t, sg_complex* phi, sg_complex* rho,
                                sg_complex* psi);

/* --- antenna GSM -------------------------------------------------------- */

SG_API sg_status sg_gsm_load(const char* path, sg_gsm_set** out);
SG_API sg_status sg_gsm_save(const sg_gsm_set* set, const char* path);
/* kind is "transparent" or "null". */
SG_API sg_status sg_gsm_synthetic(const char* kind, const double* frequencies_hz, int count, int lmax,
                                  int num_ports, sg_complex bubble_eps, sg_complex bubble_mu, sg_gsm_set** out);
/* Dense random GSM with ||(S-1)/2||_F = contrast; deterministic in seed. */
SG_API sg_status sg_gsm_random(const double* frequencies_hz, int count, int lmax, int num_ports, double contrast,
                               unsigned long long seed, sg_gsm_set** out);
SG_API void sg_gsm_destroy(sg_gsm_set* set);
SG_API int sg_gsm_count(const sg_gsm_set* set);
SG_API sg_status sg_gsm_info(const sg_gsm_set* set, int* lmax, int* num_ports, sg_complex* bubble_eps,
                             sg_complex* bubble_mu);
SG_API sg_status sg_gsm_frequency(const sg_gsm_set* set, int index, double* frequency_hz);
/* Index of the block within 1 Hz of frequency_hz. */
SG_API sg_status sg_gsm_find(const sg_gsm_set* set, double frequency_hz, int* index);
/* which is one of 'G', 'R', 'T', 'S'. */
SG_API sg_status sg_gsm_block(const sg_gsm_set* set, int index, char which, sg_complex* out);

/* --- composition -------------------------------------------------------- */

enum {
  SG_BLOCK_GAMMA = 1,
  SG_BLOCK_R = 2,
  SG_BLOCK_T = 4,
  SG_BLOCK_S = 8,
  SG_BLOCK_ALL = 15
};

SG_API sg_status sg_compose(const sg_gsm_set* set, int index, const sg_sso* sso, unsigned blocks,
                            sg_effective** out);
SG_API void sg_effective_destroy(sg_effective* e);
SG_API sg_status sg_effective_info(const sg_effective* e, double* frequency_hz, int* lmax, int* num_ports);
SG_API sg_status sg_effective_block(const sg_effective* e, char which, sg_complex* out);
/* Writes the effective matrices in the GSM interchange format. */
SG_API sg_status sg_effective_save(const sg_effective* const* effs, int count, sg_complex bubble_eps,
                                   sg_complex bubble_mu, const char* path);
SG_API sg_status sg_respond(const sg_effective* e, const sg_complex* v, const sg_complex* a_f, sg_complex* w,
                            sg_complex* f);

/* --- observables -------------------------------------------------------- */

typedef struct sg_plane_wave {
  double theta_inc; /* propagation direction, radians */
  double phi_inc;
  sg_complex pol_theta;
  sg_complex pol_phi;
  double amplitude;
} sg_plane_wave;

SG_API sg_status sg_plane_wave_coefficients(const sg_plane_wave* pw, int lmax, const sg_geometry* g,
                                            double frequency_hz, sg_complex* a_f);
/* Far-field amplitude (V) of outgoing coefficients f in the exterior of g. */
SG_API sg_status sg_far_field(const sg_complex* f, int lmax, const sg_geometry* g, const double* theta,
                              const double* phi, int count, sg_complex* f_theta, sg_complex* f_phi);
SG_API sg_status sg_gain_pattern(const sg_effective* e, const sg_complex* v, const sg_geometry* g,
                                 const double* theta, const double* phi, int count, double* gain);
SG_API sg_status sg_bistatic_rcs(const sg_effective* e, const sg_plane_wave* pw, const sg_geometry* g,
                                 const double* theta, const double* phi, int count, double* sigma);

/* --- validation --------------------------------------------------------- */

typedef struct sg_check_result {
  char name[64];
  int passed;
  double metric;
  double threshold;
  char detail[192];
} sg_check_result;

SG_API sg_status sg_validation_suite(const sg_geometry* g, double frequency_hz, const sg_solver_options* options,
                                     sg_check_result* results, int capacity, int* count);
/* Max |Gamma~| and |S~| deviation of staircase(n) from the continuous solve,
 * over all blocks of the set. */
SG_API sg_status sg_staircase_convergence(const sg_geometry* g, const int* n_list, int count,
                                          const sg_gsm_set* set, const sg_solver_options* options,
                                          double* err_gamma, double* err_s);

#ifdef __cplusplus
}
#endif

#endif
