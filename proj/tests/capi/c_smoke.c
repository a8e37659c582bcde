/* The public header must stay plain C. */
#include <math.h>
#include <stdio.h>

#include "shellgsm/shellgsm.h"

#define EXPECT(cond)                                   \
  do {                                                 \
    if (!(cond)) {                                     \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                        \
    }                                                  \
  } while (0)

int main(void) {
  sg_complex one = {1.0, 0.0};
  sg_complex eps = {5.0, -0.5};
  sg_geometry* g = NULL;
  sg_sso* s = NULL;
  sg_gsm_set* set = NULL;
  sg_effective* e = NULL;
  sg_complex gamma;
  double f = 3.5e9;

  EXPECT(sg_version() != NULL);
  EXPECT(sg_geometry_create(0.15, 0.18, one, one, one, one, &g) == SG_OK);
  EXPECT(sg_geometry_add_constant(g, 0.15, 0.18, eps, eps, one, one) == SG_OK);
  EXPECT(sg_sso_assemble(g, f, 8, NULL, &s) == SG_OK);
  EXPECT(sg_gsm_synthetic("null", &f, 1, 8, 1, one, one, &set) == SG_OK);
  EXPECT(sg_compose(set, 0, s, SG_BLOCK_GAMMA, &e) == SG_OK);
  EXPECT(sg_effective_block(e, 'G', &gamma) == SG_OK);
  EXPECT(isfinite(gamma.re) && isfinite(gamma.im));
  EXPECT(sg_sso_assemble(NULL, f, 8, NULL, &s) == SG_ERR_INVALID_ARGUMENT);
  EXPECT(sg_last_error()[0] != '\0');

  sg_effective_destroy(e);
  sg_gsm_destroy(set);
  sg_sso_destroy(s);
  sg_geometry_destroy(g);
  puts("c api smoke ok");
  return 0;
}
