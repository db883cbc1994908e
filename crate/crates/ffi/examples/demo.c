/* cc demo.c -I../include -L../../../target/release -ltwodel_ffi -lpthread -ldl -lm */
#include <stdio.h>
#include "twodel.h"

int main(void) {
    TdCode *code = NULL;
    if (td_code_new(12, 0, 2, NULL, &code) != TD_STATUS_OK) {
        fprintf(stderr, "%s\n", td_last_error_message());
        return 1;
    }
    size_t n = td_code_length(code);
    uint8_t x[64], y[64], z[64];
    for (unsigned v = 0; v < (1u << n); v++) {
        bool member = false;
        for (size_t i = 0; i < n; i++)
            x[i] = (v >> (n - 1 - i)) & 1;
        td_is_member(code, x, n, &member);
        if (member)
            break;
    }
    td_delete2(x, n, 2, 7, y, sizeof y);
    size_t len = 0;
    char *branch = NULL;
    TdStatus st = td_decode(code, y, n - 2, z, sizeof z, &len, &branch);
    if (st != TD_STATUS_OK) {
        fprintf(stderr, "%s\n", td_last_error_message());
        return 1;
    }
    for (size_t i = 0; i < len; i++)
        putchar('0' + z[i]);
    printf(" via %s\n", branch);
    td_string_free(branch);
    td_code_free(code);
    return 0;
}
