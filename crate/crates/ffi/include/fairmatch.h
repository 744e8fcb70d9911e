#ifndef FAIRMATCH_H
#define FAIRMATCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result codes. The first four match the command-line exit codes.
typedef enum FmStatus {
  FM_STATUS_OK = 0,
  FM_STATUS_INPUT_ERROR = 1,
  FM_STATUS_INFEASIBLE = 2,
  FM_STATUS_GUARD_EXCEEDED = 3,
  FM_STATUS_OVERFLOW = 4,
  FM_STATUS_NULL_POINTER = 5,
  FM_STATUS_PANIC = 6,
} FmStatus;

// Opaque graph handle.
typedef struct FmGraph FmGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL after a
// success. Valid until the next call on the same thread.
const char *fm_last_error_message(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void fm_string_free(char *s);

// Parses a JSON graph document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum FmStatus fm_graph_parse(const char *json, struct FmGraph **out);

// Releases a graph handle. NULL is ignored.
//
// # Safety
// `graph` must come from this library and not be freed twice.
void fm_graph_free(struct FmGraph *graph);

// Number of groups.
//
// # Safety
// `graph` must be a live handle; `out` must be writable.
enum FmStatus fm_graph_k(const struct FmGraph *graph, size_t *out);

// Serializes the graph back to JSON.
//
// # Safety
// `graph` must be a live handle; `out` must be writable.
enum FmStatus fm_graph_to_json(const struct FmGraph *graph, char **out);

// `OPT(Λ)` for the groups whose bits are set in `groups` (bit 0 is group 1).
//
// # Safety
// `graph` must be a live handle; `out` must be writable.
enum FmStatus fm_opt(const struct FmGraph *graph, uint64_t groups, int64_t *out);

// Serial dictatorship for the 1-based priority order `sigma` of length
// `len`, as a JSON report.
//
// # Safety
// `sigma` must point to `len` readable values; `out` must be writable.
enum FmStatus fm_lexmax(const struct FmGraph *graph,
                        const uint32_t *sigma,
                        size_t len,
                        bool emit_matching,
                        char **out);

// Shapley values as a JSON report: exact when `samples` is 0, otherwise
// the average over `samples` random orders drawn with `seed`.
//
// # Safety
// `graph` must be a live handle; `out` must be writable.
enum FmStatus fm_shapley(const struct FmGraph *graph, uint64_t samples, uint64_t seed, char **out);

// Weighted leximin point as a JSON report. `notion` is one of
// `egalitarian`, `demographic`, `opportunity`, `custom`; `weights` is a
// comma list such as `"2,1"`. Either may be NULL (default egalitarian).
//
// # Safety
// String arguments must be NULL or NUL-terminated; `out` must be writable.
enum FmStatus fm_leximin(const struct FmGraph *graph,
                         const char *notion,
                         const char *weights,
                         bool emit_matching,
                         char **out);

// Largest fair point `c*·w` as a JSON report; arguments as in `fm_leximin`.
//
// # Safety
// String arguments must be NULL or NUL-terminated; `out` must be writable.
enum FmStatus fm_fair_optimum(const struct FmGraph *graph,
                              const char *notion,
                              const char *weights,
                              bool emit_matching,
                              char **out);

// Price of Fairness report (default notion: opportunity). With `bounds`
// the applicable bounds and the decreasing check (up to `max_k` groups)
// are added; with `integral` only integral fair points count.
//
// # Safety
// String arguments must be NULL or NUL-terminated; `out` must be writable.
enum FmStatus fm_pof(const struct FmGraph *graph,
                     const char *notion,
                     const char *weights,
                     bool bounds,
                     size_t max_k,
                     bool integral,
                     char **out);

// # Safety
// `out` must be writable.
enum FmStatus fm_gen_toblerone(size_t k, size_t m, size_t n, struct FmGraph **out);

// # Safety
// `out` must be writable.
enum FmStatus fm_gen_tight_halves(size_t k, size_t m, struct FmGraph **out);

// `rho` is a rational string such as `"7/10"`.
//
// # Safety
// `rho` must be NUL-terminated; `out` must be writable.
enum FmStatus fm_gen_rho_tight(size_t k, size_t m, const char *rho, struct FmGraph **out);

// # Safety
// `out` must be writable.
enum FmStatus fm_gen_prime(size_t m1, size_t m2, struct FmGraph **out);

// Complete bipartite graph; `sizes` holds `k` agent counts.
//
// # Safety
// `sizes` must point to `k` readable values; `out` must be writable.
enum FmStatus fm_gen_complete(size_t k, const size_t *sizes, size_t jobs, struct FmGraph **out);

// Random graph. `beta`, `alpha` and `p` are rational strings (`alpha` and
// `p` comma separated, `p` may also be a single value, `auto-dense` or
// `sparse`).
//
// # Safety
// String arguments must be NUL-terminated; `out` must be writable.
enum FmStatus fm_gen_er(size_t n,
                        const char *beta,
                        const char *alpha,
                        const char *p,
                        uint64_t seed,
                        struct FmGraph **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FAIRMATCH_H */
