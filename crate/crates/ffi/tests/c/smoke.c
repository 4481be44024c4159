#include <stdio.h>
#include <string.h>

#include "lwebb.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "check failed: %s (line %d)\n", #cond, __LINE__); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    LwebbSession *s = lwebb_session_new();
    CHECK(s != NULL);
    CHECK(lwebb_session_add_program(s, "p :- q. q.") == LWEBB_STATUS_OK);

    LwebbResult *r = NULL;
    CHECK(lwebb_session_query(s, "?- (10) p.", &r) == LWEBB_STATUS_OK);
    CHECK(lwebb_result_outcome(r) == LWEBB_OUTCOME_SUCCESS);
    uint64_t n = 0;
    CHECK(lwebb_result_length(r, 0, &n) == LWEBB_STATUS_OK);
    CHECK(n == 4);
    char *text = lwebb_result_render(r);
    CHECK(strcmp(text, "yes, length = 4\n") == 0);
    lwebb_string_free(text);
    lwebb_result_free(r);

    CHECK(lwebb_session_query(s, "?- (3) p.", &r) == LWEBB_STATUS_OK);
    CHECK(lwebb_result_outcome(r) == LWEBB_OUTCOME_BOUND_EXHAUSTED);
    lwebb_result_free(r);

    CHECK(lwebb_session_query(s, "?- p(.", &r) == LWEBB_STATUS_PARSE_ERROR);
    CHECK(r == NULL);
    CHECK(lwebb_last_error_message() != NULL);

    lwebb_session_free(s);
    printf("ok\n");
    return 0;
}
