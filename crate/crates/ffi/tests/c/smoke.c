#include <stdio.h>
#include <string.h>
#include "papseries.h"

static int fail(const char *what) {
    const char *m = ps_last_error();
    fprintf(stderr, "%s: %s\n", what, m ? m : "(no message)");
    return 1;
}

int main(void) {
    PsSeries *s = NULL;
    if (ps_count_avoiders("25314", 7, &s) != PS_STATUS_OK) return fail("count");
    char *c = NULL;
    if (ps_series_coeff(s, 7, &c) != PS_STATUS_OK) return fail("coeff");
    printf("%s\n", c);
    ps_string_free(c);
    ps_series_free(s);

    PsSeries *cat = NULL;
    if (ps_series_import("0 1\n1 1\n2 2\n3 5\n4 14\n5 42\n6 132\n", PS_FORMAT_BFILE, "catalan", 50, &cat) != PS_STATUS_OK)
        return fail("import");
    PsBounds *b = NULL;
    if (ps_bounds(cat, 50, &b) != PS_STATUS_OK) return fail("bounds");
    double v = 0;
    ps_bounds_value(b, &v);
    printf("%.12g\n", v);
    ps_bounds_free(b);
    ps_series_free(cat);

    if (ps_dataset_get("no-such-class", &s) != PS_STATUS_NOT_FOUND) return 1;
    printf("%s\n", ps_last_error() ? "error set" : "no error");
    return 0;
}
