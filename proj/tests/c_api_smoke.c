// SPDX-License-Identifier: Apache-2.0
// Plain C consumer of the public header.
#include "phicsl/phicsl.h"

#include <math.h>
#include <stdio.h>

static int failures = 0;

static void expect(int ok, const char* what) {
    if (!ok) {
        fprintf(stderr, "FAILED: %s (%s)\n", what, phicsl_last_error());
        ++failures;
    }
}

int main(void) {
    phicsl_state* bell = NULL;
    expect(phicsl_state_parse("bell", &bell) == PHICSL_OK, "parse bell");
    double phi = 0.0;
    expect(phicsl_phi_max(bell, &phi) == PHICSL_OK, "phi_max");
    expect(fabs(phi - log(2.0)) < 1e-9, "bell phi = ln 2");
    phicsl_state_destroy(bell);

    const size_t dims[2] = {2, 2};
    const double amps[8] = {1, 0, 0, 0, 0, 0, 0, 0};
    phicsl_state* product = NULL;
    expect(phicsl_state_create(dims, 2, amps, &product) == PHICSL_OK, "create product");
    expect(phicsl_phi_max(product, &phi) == PHICSL_OK && fabs(phi) < 1e-12, "product phi = 0");
    phicsl_state_destroy(product);

    phicsl_state* bad = NULL;
    expect(phicsl_state_parse("ghz:1", &bad) == PHICSL_ERR_INVALID_ARGUMENT, "bad spec rejected");
    expect(bad == NULL, "no handle on failure");
    expect(phicsl_scenario_count() > 0, "scenario catalog");

    if (failures == 0) printf("c api smoke: ok\n");
    return failures == 0 ? 0 : 1;
}
