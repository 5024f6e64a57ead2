#ifndef CAUSAL_AXIOMS_H
#define CAUSAL_AXIOMS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CA_OK 0

#define CA_ERR_NULL 1

#define CA_ERR_UTF8 2

#define CA_ERR_PARSE 3

#define CA_ERR_INVALID 4

#define CA_ERR_UNSUPPORTED 5

#define CA_ERR_PANIC 6

#define CA_CRITERION_SIGMA 0

#define CA_CRITERION_M 1

#define CA_CRITERION_D 2

#define CA_MODE_ITERATIVE 0

#define CA_MODE_ANCESTRAL_SHORTCUT 1

struct CaDerivation;

struct CaFamily;

struct CaGraph;

struct CaTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *ca_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ca_string_free(char *s);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
int32_t ca_graph_from_json(const char *json, struct CaGraph **out);

/**
 * # Safety
 * `g` must come from this library and not be freed twice.
 */
void ca_graph_free(struct CaGraph *g);

/**
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
int32_t ca_graph_to_json(const struct CaGraph *g, char **out);

/**
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
int32_t ca_graph_to_dot(const struct CaGraph *g, char **out);

/**
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
int32_t ca_graph_acyclify(const struct CaGraph *g, struct CaGraph **out);

/**
 * Writes whether `a` and `b` are separated given `c`. Sets are comma
 * separated labels; `c` may be empty or NULL.
 *
 * # Safety
 * `g` must be a live handle, the strings NUL-terminated and `out` writable.
 */
int32_t ca_graph_separated(const struct CaGraph *g,
                           int32_t criterion,
                           const char *a,
                           const char *b,
                           const char *c,
                           bool *out);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
int32_t ca_table_from_json(const char *json, struct CaTable **out);

/**
 * # Safety
 * `t` must come from this library and not be freed twice.
 */
void ca_table_free(struct CaTable *t);

/**
 * # Safety
 * `t` must be a live handle and `out` writable.
 */
int32_t ca_table_to_json(const struct CaTable *t, char **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
int32_t ca_family_from_json(const char *json, struct CaFamily **out);

/**
 * # Safety
 * `f` must come from this library and not be freed twice.
 */
void ca_family_free(struct CaFamily *f);

/**
 * # Safety
 * `f` must be a live handle and `out` writable.
 */
int32_t ca_derive(const struct CaFamily *f, int32_t mode, struct CaDerivation **out);

/**
 * # Safety
 * `d` must come from this library and not be freed twice.
 */
void ca_derivation_free(struct CaDerivation *d);

/**
 * The causal graph `G` as a new handle.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
int32_t ca_derivation_graph(const struct CaDerivation *d, struct CaGraph **out);

/**
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
int32_t ca_derivation_to_json(const struct CaDerivation *d, char **out);

/**
 * Checks one axiom (`A2`, `A3`, `A4`, `A4_identity`, `A5`, `A5_all_pairs` or
 * `compatible`) of `f` against `p`. `report` may be NULL.
 *
 * # Safety
 * Handles must be live, `axiom` NUL-terminated and `holds` writable.
 */
int32_t ca_check_axiom(const struct CaFamily *f,
                       const struct CaTable *p,
                       const char *axiom,
                       bool *holds,
                       char **report);

/**
 * Runs a verification suite. `result` may be NULL.
 *
 * # Safety
 * `suite` must be NUL-terminated and `passed` writable.
 */
int32_t ca_run_suite(const char *suite,
                     uint64_t seed,
                     uint32_t budget,
                     bool *passed,
                     char **result);

const char *ca_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAUSAL_AXIOMS_H */
