#ifndef WPBDD_H
#define WPBDD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WpbddStatus {
  WPBDD_STATUS_OK = 0,
  WPBDD_STATUS_NULL_POINTER = 1,
  WPBDD_STATUS_INVALID_UTF8 = 2,
  WPBDD_STATUS_INVALID_NETWORK = 3,
  WPBDD_STATUS_UNKNOWN_ATOM = 4,
  WPBDD_STATUS_ZERO_EVIDENCE = 5,
  WPBDD_STATUS_INVALID_EVIDENCE = 6,
  WPBDD_STATUS_INTERNAL = 7,
} WpbddStatus;

/*
 Opaque compiled model handle.
 */
typedef struct WpbddModel WpbddModel;

/*
 Opaque network handle.
 */
typedef struct WpbddNetwork WpbddNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. The pointer is
 valid until the next call into this library on the same thread.
 */
const char *wpbdd_last_error_message(void);

/*
 Parse a network from a NUL-terminated JSON document.

 # Safety
 `json` must be a valid C string and `out` a valid pointer.
 */
enum WpbddStatus wpbdd_network_from_json(const char *json, struct WpbddNetwork **out);

/*
 # Safety
 `net` must come from [`wpbdd_network_from_json`] or be null.
 */
void wpbdd_network_free(struct WpbddNetwork *net);

/*
 Number of variables in the network.

 # Safety
 `net` must be a live handle.
 */
size_t wpbdd_network_num_variables(const struct WpbddNetwork *net);

/*
 Compile a network. `collapse` selects the collapse reduction.

 # Safety
 `net` must be a live handle and `out` a valid pointer.
 */
enum WpbddStatus wpbdd_model_compile(const struct WpbddNetwork *net,
                                     bool collapse,
                                     struct WpbddModel **out);

/*
 # Safety
 `model` must come from [`wpbdd_model_compile`] or be null.
 */
void wpbdd_model_free(struct WpbddModel *model);

/*
 Diagram node count, 0 for a null handle.

 # Safety
 `model` must be a live handle or null.
 */
size_t wpbdd_model_node_count(const struct WpbddModel *model);

/*
 Arithmetic circuit operator count, 0 for a null handle.

 # Safety
 `model` must be a live handle or null.
 */
size_t wpbdd_model_operator_count(const struct WpbddModel *model);

/*
 `P(target_var = target_value | evidence)`. Evidence is given as
 `n_evidence` parallel variable/value name arrays (may be null when
 `n_evidence` is 0).

 # Safety
 All strings must be valid C strings; arrays must hold `n_evidence`
 entries; `out` must be a valid pointer.
 */
enum WpbddStatus wpbdd_model_query(const struct WpbddModel *model,
                                   const char *target_var,
                                   const char *target_value,
                                   const char *const *evidence_vars,
                                   const char *const *evidence_values,
                                   size_t n_evidence,
                                   double *out);

/*
 Canonical text form of the compiled diagram. Release with
 [`wpbdd_string_free`]. Null on failure.

 # Safety
 `model` must be a live handle or null.
 */
char *wpbdd_model_serialize(const struct WpbddModel *model);

/*
 # Safety
 `s` must come from this library or be null.
 */
void wpbdd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WPBDD_H */
