/* Compiled as C to keep the public header C-clean. */
#include <stdio.h>

#include "aoi/aoi.h"

int main(void) {
    aoi_index_info info;
    aoi_solution* sol = NULL;
    if (aoi_approx_index(1, 3, 1.0, 1.0, &info) != AOI_OK || info.value != 6.0) return 1;
    if (aoi_decoupled_solve(1.0, 1.0, 5.0, 0, 0, NULL, &sol) != AOI_OK) return 2;
    if (aoi_solution_threshold(sol, 1) != 3) return 3;
    aoi_solution_free(sol);
    if (aoi_approx_index(0, 3, 1.0, 1.0, &info) != AOI_ERR_INVALID_ARGUMENT) return 4;
    printf("ok: %s\n", aoi_last_error());
    return 0;
}
