#include <math.h>
#include <stdio.h>
#include "nonmarkov.h"

#define CHECK(call)                                                            \
  do {                                                                         \
    NmStatus s_ = (call);                                                      \
    if (s_ != NM_STATUS_OK) {                                                  \
      fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, nm_last_error_message()); \
      return 1;                                                                \
    }                                                                          \
  } while (0)

int main(int argc, char **argv) {
  if (argc < 2) return 2;
  double marginal[4] = {0.25, 0.25, 0.25, 0.25}, pmf[16], nm;
  CHECK(nm_joint_pmf(marginal, 1.0, pmf));
  CHECK(nm_non_markovianity(pmf, 2.0, &nm));
  if (fabs(nm - 1.0) > 1e-9) return 3;

  double q[1] = {0.9}, r[1] = {1.0};
  NmPlanParams p;
  CHECK(nm_plan_params_default(&p));
  p.q = q;
  p.r = r;
  p.n_pairs = 1;
  p.pmfs_per_pair = 40;
  NmDataset *ds = NULL;
  CHECK(nm_dataset_generate(&p, &ds));
  if (nm_dataset_len(ds) != 40 || nm_dataset_feature_count(ds) != 9) return 4;
  CHECK(nm_dataset_write_csv(ds, argv[1]));

  NmModel *m = NULL;
  CHECK(nm_model_fit(ds, 1, 0.0, &m));
  double x[9], label, y;
  CHECK(nm_dataset_row(ds, 0, x, 9, &label));
  CHECK(nm_model_predict(m, x, 9, &y));
  if (!isfinite(y)) return 5;

  if (nm_model_fit(ds, 0, 0.0, &m) != NM_STATUS_INVALID_ARGUMENT) return 6;
  if (nm_last_error_message()[0] == '\0') return 7;

  nm_model_free(m);
  nm_dataset_free(ds);
  printf("ok %s\n", nm_version());
  return 0;
}
