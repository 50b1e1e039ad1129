#include <stdio.h>
#include <string.h>
#include "mintej.h"

#define CHECK(cond)                                                    \
    do {                                                               \
        if (!(cond)) {                                                 \
            fprintf(stderr, "check failed at line %d: %s\n", __LINE__, #cond); \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(void) {
    MintejBuffer *buf = NULL;
    CHECK(mintej_buffer_load("a\nb\nc\n", &buf) == MINTEJ_STATUS_OK);
    CHECK(mintej_buffer_line_count(buf) == 3);
    CHECK(mintej_buffer_delete(buf, 2, 2) == MINTEJ_STATUS_OK);
    CHECK(mintej_buffer_delete(buf, 5, 5) == MINTEJ_STATUS_RANGE);
    CHECK(mintej_last_error() != NULL);
    char *text = NULL;
    CHECK(mintej_buffer_render(buf, 1, &text) == MINTEJ_STATUS_OK);
    CHECK(strcmp(text, "1: a\n2: c") == 0);
    mintej_string_free(text);
    mintej_buffer_free(buf);

    MintejRun *run = NULL;
    CHECK(mintej_run_program("for k = 1:2\nprintln(k)\nend", "c.jl", &run) == MINTEJ_STATUS_OK);
    char *out = NULL;
    CHECK(mintej_run_output(run, &out) == MINTEJ_STATUS_OK);
    CHECK(strcmp(out, "1\n2") == 0);
    mintej_string_free(out);
    mintej_run_free(run);

    CHECK(mintej_run_program("println(\"x)", "c.jl", &run) == MINTEJ_STATUS_SYNTAX);
    char *err = NULL;
    uint32_t line = 0;
    CHECK(mintej_run_error(run, &line, &err) == MINTEJ_STATUS_OK);
    CHECK(strstr(err, "unterminated string literal") != NULL && line == 1);
    mintej_string_free(err);
    mintej_run_free(run);

    CHECK(mintej_buffer_load(NULL, &buf) == MINTEJ_STATUS_NULL_ARGUMENT);
    puts("ok");
    return 0;
}
