#ifndef EPRINT_OAI_H
#define EPRINT_OAI_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdint.h>

typedef enum OaiStatus {
  OAI_STATUS_OK = 0,
  OAI_STATUS_NULL_ARGUMENT = 1,
  OAI_STATUS_INVALID_UTF8 = 2,
  OAI_STATUS_INVALID_ARGUMENT = 3,
  OAI_STATUS_IO = 4,
  OAI_STATUS_PANIC = 5,
} OaiStatus;

/**
 * Opaque provider handle.
 */
typedef struct OaiProvider OaiProvider;

/**
 * One protocol response. `content_type` and `body` are NUL-terminated and
 * owned by the library until [`oai_response_free`].
 */
typedef struct OaiResponse {
  uint16_t http_status;
  char *content_type;
  char *body;
  /**
   * Milliseconds to wait on a 503, rounded up; 0 otherwise.
   */
  uint64_t retry_after_ms;
} OaiResponse;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Open the bundled demo corpus.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum OaiStatus oai_provider_open_demo(struct OaiProvider **out);

/**
 * Open a store directory. `repository_toml` and `taxonomy_toml` are file
 * paths and may be null to use the built-in ones.
 *
 * # Safety
 * String arguments are null or NUL-terminated; `out` must be valid for writes.
 */
enum OaiStatus oai_provider_open_dir(const char *data_dir,
                                     const char *repository_toml,
                                     const char *taxonomy_toml,
                                     struct OaiProvider **out);

/**
 * Pin the provider clock to an RFC 3339 instant, or unpin it with null.
 *
 * # Safety
 * `provider` comes from an open function; `now` is null or NUL-terminated.
 */
enum OaiStatus oai_provider_set_now(struct OaiProvider *provider, const char *now);

/**
 * Turn on flow control with the given minimum intervals in seconds.
 *
 * # Safety
 * `provider` comes from an open function and is not in use on another thread.
 */
enum OaiStatus oai_provider_set_flow_control(struct OaiProvider *provider,
                                             double min_interval_list_s,
                                             double min_interval_other_s);

/**
 * Answer one request. `query` is a form-encoded argument string such as
 * `verb=GetRecord&identifier=...`; `client` keys flow control.
 *
 * # Safety
 * `provider` comes from an open function; strings are NUL-terminated; `out`
 * must be valid for writes.
 */
enum OaiStatus oai_provider_handle(const struct OaiProvider *provider,
                                   const char *client,
                                   const char *query,
                                   struct OaiResponse *out);

/**
 * Release the strings inside a response and null them out.
 *
 * # Safety
 * `response` is null or was filled by [`oai_provider_handle`].
 */
void oai_response_free(struct OaiResponse *response);

/**
 * # Safety
 * `provider` is null or came from an open function and is not used again.
 */
void oai_provider_free(struct OaiProvider *provider);

/**
 * Map an OAI identifier such as `oai:arXiv:cs.DL/0101042` in `repository`
 * to its internal form.
 *
 * # Safety
 * Strings are NUL-terminated; `out` must be valid for writes.
 */
enum OaiStatus oai_parse_identifier(const char *identifier, const char *repository, char **out);

/**
 * Convert TeX accent and glyph markup to UTF-8 with the built-in tables.
 *
 * # Safety
 * `input` is NUL-terminated; `out` must be valid for writes.
 */
enum OaiStatus oai_tex_to_utf8(const char *input, char **out);

/**
 * # Safety
 * `s` is null or came from this library and is not used again.
 */
void oai_string_free(char *s);

/**
 * The message for the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *oai_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EPRINT_OAI_H */
