#ifndef SIPKIT_H
#define SIPKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Sign type of a nonzero integer.
typedef enum SipkitSignType {
  SIPKIT_SIGN_TYPE_POSITIVE = 0,
  SIPKIT_SIGN_TYPE_NEGATIVE = 1,
} SipkitSignType;

// Result codes.
typedef enum SipkitStatus {
  SIPKIT_STATUS_OK = 0,
  SIPKIT_STATUS_NULL_POINTER = 1,
  SIPKIT_STATUS_INVALID_ARGUMENT = 2,
  SIPKIT_STATUS_DOMAIN = 3,
  SIPKIT_STATUS_BUDGET = 4,
  SIPKIT_STATUS_HORIZON = 5,
  SIPKIT_STATUS_PANIC = 6,
} SipkitStatus;

// Opaque upward-closed family on `[1..u]`.
typedef struct SipkitFamily SipkitFamily;

// Opaque finite set of integers.
typedef struct SipkitIntSet SipkitIntSet;

// Exhaustive classification of a family.
typedef struct SipkitClassification {
  bool proper;
  bool filter;
  bool ramsey;
  bool dual_is_filter;
} SipkitClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread; empty after
// a success. Valid until the next call into this library on the thread.
const char *sipkit_last_error(void);

// Library version as a static string.
const char *sipkit_version(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void sipkit_string_free(char *s);

// Sign-change count of the decimal integer `t ≥ 1`.
//
// # Safety
// `t` must be a nul-terminated string; `out` must be writable.
enum SipkitStatus sipkit_z_count(const char *t, uint64_t *out);

// `z(t) mod modulus` for odd `modulus ≥ 3`.
//
// # Safety
// `t` must be a nul-terminated string; `out` must be writable.
enum SipkitStatus sipkit_color_class(const char *t, uint32_t modulus, uint32_t *out);

// Sign type of the decimal integer `t ≠ 0`.
//
// # Safety
// `t` must be a nul-terminated string; `out` must be writable.
enum SipkitStatus sipkit_sign_type(const char *t, enum SipkitSignType *out);

// Whether every ternary index of `t` exceeds every index of `s`.
//
// # Safety
// `t`, `s` must be nul-terminated strings; `out` must be writable.
enum SipkitStatus sipkit_is_beyond(const char *t, const char *s, bool *out);

// Builds a set from `len` machine integers (duplicates are merged).
//
// # Safety
// `values` must point to `len` readable integers (or be null with `len == 0`);
// `out` must be writable.
enum SipkitStatus sipkit_intset_new(const int64_t *values, size_t len, struct SipkitIntSet **out);

// # Safety
// `set` must come from this library and not have been freed.
void sipkit_intset_free(struct SipkitIntSet *set);

// Number of elements.
//
// # Safety
// `set` must be a live handle or null.
size_t sipkit_intset_len(const struct SipkitIntSet *set);

// Element `index` (ascending order) as an `i64`; `Domain` if it does not fit.
//
// # Safety
// `set` must be a live handle; `out` must be writable.
enum SipkitStatus sipkit_intset_get(const struct SipkitIntSet *set, size_t index, int64_t *out);

// The set as text, e.g. `{-3, 0, 3}`; free with [`sipkit_string_free`].
//
// # Safety
// `set` must be a live handle; `out` must be writable.
enum SipkitStatus sipkit_intset_to_string(const struct SipkitIntSet *set, char **out);

// `D(A) = A − A`.
//
// # Safety
// `set` must be a live handle; `out` must be writable.
enum SipkitStatus sipkit_difference_set(const struct SipkitIntSet *set, struct SipkitIntSet **out);

// `IP(A)`: all finite subset sums, including the empty sum 0.
//
// # Safety
// `set` must be a live handle; `out` must be writable.
enum SipkitStatus sipkit_ip_closure(const struct SipkitIntSet *set, struct SipkitIntSet **out);

// `SIP(A) = D(IP(A))`.
//
// # Safety
// `set` must be a live handle; `out` must be writable.
enum SipkitStatus sipkit_sip_closure(const struct SipkitIntSet *set, struct SipkitIntSet **out);

// Whether `SIP(B) = IP(B ∪ −B)` for a nonempty set of positive integers.
//
// # Safety
// `set` must be a live handle; `out` must be writable.
enum SipkitStatus sipkit_verify_symmetrization(const struct SipkitIntSet *set, bool *out);

// `N(x, U) ∩ [1..horizon]` for rotation number `alpha` (`p/q`), point `x`
// and arc text such as `-1/8,1/8` or `[0,1/8)`.
//
// # Safety
// String arguments must be nul-terminated; `out` must be writable.
enum SipkitStatus sipkit_hitting_set(const char *alpha,
                                     const char *x,
                                     const char *arc,
                                     uint64_t horizon,
                                     struct SipkitIntSet **out);

// Upward closure of `len` generator bitmasks on `[1..universe]`
// (bit `i` stands for element `i + 1`).
//
// # Safety
// `masks` must point to `len` readable values (or be null with `len == 0`);
// `out` must be writable.
enum SipkitStatus sipkit_family_new(uint32_t universe,
                                    const uint32_t *masks,
                                    size_t len,
                                    struct SipkitFamily **out);

// # Safety
// `family` must come from this library and not have been freed.
void sipkit_family_free(struct SipkitFamily *family);

// Number of minimal members.
//
// # Safety
// `family` must be a live handle or null.
size_t sipkit_family_minimal_len(const struct SipkitFamily *family);

// Minimal member `index` as a bitmask.
//
// # Safety
// `family` must be a live handle; `out` must be writable.
enum SipkitStatus sipkit_family_minimal_get(const struct SipkitFamily *family,
                                            size_t index,
                                            uint32_t *out);

// Whether the subset `mask` belongs to the family.
//
// # Safety
// `family` must be a live handle; `out` must be writable.
enum SipkitStatus sipkit_family_contains(const struct SipkitFamily *family,
                                         uint32_t mask,
                                         bool *out);

// Sets meeting every member.
//
// # Safety
// `family` must be a live handle; `out` must be writable.
enum SipkitStatus sipkit_family_dual(const struct SipkitFamily *family, struct SipkitFamily **out);

// Upward closure of pairwise intersections.
//
// # Safety
// Both handles must be live; `out` must be writable.
enum SipkitStatus sipkit_family_join(const struct SipkitFamily *left,
                                     const struct SipkitFamily *right,
                                     struct SipkitFamily **out);

// Members whose intersection with every member stays in the family.
//
// # Safety
// `family` must be a live handle; `out` must be writable.
enum SipkitStatus sipkit_family_sharp_dual(const struct SipkitFamily *family,
                                           uint32_t cap,
                                           struct SipkitFamily **out);

// # Safety
// `family` must be a live handle; `out` must be writable.
enum SipkitStatus sipkit_family_classify(const struct SipkitFamily *family,
                                         uint32_t cap,
                                         struct SipkitClassification *out);

// Runs one CLI command (`argv` without the program name) and returns the
// rendered report, or the usage text on exit code 64.
//
// # Safety
// `argv` must point to `argc` nul-terminated strings; `out_text` and
// `out_exit` must be writable.
enum SipkitStatus sipkit_execute(size_t argc,
                                 const char *const *argv,
                                 char **out_text,
                                 int32_t *out_exit);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIPKIT_H */
