#include <stdio.h>
#include <string.h>

#include "eprint_oai.h"

static int fail(const char *what) {
    const char *msg = oai_last_error_message();
    fprintf(stderr, "%s: %s\n", what, msg ? msg : "(no message)");
    return 1;
}

int main(void) {
    OaiProvider *p = NULL;
    if (oai_provider_open_demo(&p) != OAI_STATUS_OK) return fail("open");
    if (oai_provider_set_now(p, "2001-01-22T10:08:02Z") != OAI_STATUS_OK) return fail("set_now");

    OaiResponse r;
    if (oai_provider_handle(p, "c", "verb=GetRecord&identifier=oai:arXiv:cs.SE/0101002&metadataPrefix=oai_dc", &r) != OAI_STATUS_OK)
        return fail("handle");
    if (r.http_status != 200 || strstr(r.body, "<datestamp>2001-01-08</datestamp>") == NULL) return fail("GetRecord body");
    oai_response_free(&r);

    if (oai_provider_handle(p, "c", "verb=Nonsense", &r) != OAI_STATUS_OK) return fail("handle");
    if (r.http_status != 400) return fail("malformed status");
    oai_response_free(&r);

    char *s = NULL;
    if (oai_tex_to_utf8("Schr\\\"odinger", &s) != OAI_STATUS_OK) return fail("tex");
    if (strcmp(s, "Schr\xc3\xb6" "dinger") != 0) return fail("tex value");
    oai_string_free(s);

    if (oai_parse_identifier("oai:other:cs.SE/0101002", "arXiv", &s) != OAI_STATUS_INVALID_ARGUMENT) return fail("wrong repository accepted");
    if (oai_last_error_message() == NULL) return fail("missing message");

    oai_provider_free(p);
    puts("ok");
    return 0;
}
