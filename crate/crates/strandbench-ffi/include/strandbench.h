/* strandbench C API. Generated by cbindgen; do not edit. */

#ifndef STRANDBENCH_H
#define STRANDBENCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every API call.
 */
typedef enum SbStatus {
  /**
   * The call succeeded and all out-parameters are set.
   */
  SB_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  SB_STATUS_NULL_ARG = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  SB_STATUS_UTF8 = 2,
  /**
   * A document argument did not parse.
   */
  SB_STATUS_PARSE = 3,
  /**
   * Arguments were readable but violated a precondition.
   */
  SB_STATUS_INVALID = 4,
  /**
   * The inputs were valid but admit no solution.
   */
  SB_STATUS_NO_SOLUTION = 5,
  /**
   * An internal panic was caught at the boundary.
   */
  SB_STATUS_PANIC = 6,
} SbStatus;

/**
 * A compiled displacement circuit. Opaque; release with
 * [`sb_circuit_free`].
 */
typedef struct SbCircuit SbCircuit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The most recent error message on this thread, or NULL when the last
 * call succeeded. Owned by the library; do not free.
 */
const char *sb_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a pointer obtained from this library that has not
 * already been freed.
 */
void sb_string_free(char *s);

/**
 * The library version as a static string. Do not free.
 */
const char *sb_version(void);

/**
 * Writes the reverse complement of `seq` (ACGT, case-insensitive).
 *
 * # Safety
 * `seq`, if non-NULL, must point to a NUL-terminated string; `out`, if
 * non-NULL, must be valid for writing one pointer.
 */
enum SbStatus sb_reverse_complement(const char *seq, char **out);

/**
 * Writes the Wallace-rule melting temperature of `seq` in Celsius.
 *
 * # Safety
 * `seq`, if non-NULL, must point to a NUL-terminated string; `out`, if
 * non-NULL, must be valid for writing one double.
 */
enum SbStatus sb_melting_temp(const char *seq, double *out);

/**
 * Designs `count` oligos of `length` bases, pairwise at least
 * `min_hamming` apart (also against reverse complements), and writes
 * them as a JSON array of strings. Fails with `SB_STATUS_NO_SOLUTION`
 * when the search budget runs out.
 *
 * # Safety
 * `out_json`, if non-NULL, must be valid for writing one pointer.
 */
enum SbStatus sb_design_library(uintptr_t length,
                                uintptr_t count,
                                uintptr_t min_hamming,
                                uint64_t seed,
                                char **out_json);

/**
 * Solves a Hamiltonian-path instance by exhaustive strand assembly.
 * `graph_json` is `{"nodes":[...],"edges":[[u,v],...]}`; the result is a
 * JSON array of node arrays (empty when no path exists).
 *
 * # Safety
 * `graph_json`, if non-NULL, must point to a NUL-terminated string;
 * `out_json`, if non-NULL, must be valid for writing one pointer.
 */
enum SbStatus sb_hamiltonian_solve(const char *graph_json,
                                   uintptr_t start,
                                   uintptr_t end,
                                   char **out_json);

/**
 * Runs the cumulative-XOR tile computation on `x_bits` (e.g. "10110")
 * with initial parity `y0`, writing the output bits as a string of the
 * same length.
 *
 * # Safety
 * `x_bits`, if non-NULL, must point to a NUL-terminated string;
 * `out_bits`, if non-NULL, must be valid for writing one pointer.
 */
enum SbStatus sb_run_xor(const char *x_bits, int y0, char **out_bits);

/**
 * Compiles circuit source text. On success `*out` owns the circuit.
 *
 * # Safety
 * `source`, if non-NULL, must point to a NUL-terminated string; `out`,
 * if non-NULL, must be valid for writing one pointer.
 */
enum SbStatus sb_circuit_compile(const char *source,
                                 int multi_input,
                                 int dual_rail,
                                 struct SbCircuit **out);

/**
 * Writes the full compiled form (complexes, injections, reporters,
 * statistics) as JSON.
 *
 * # Safety
 * `circuit` must be NULL or a live handle from [`sb_circuit_compile`];
 * `out_json`, if non-NULL, must be valid for writing one pointer.
 */
enum SbStatus sb_circuit_json(const struct SbCircuit *circuit, char **out_json);

/**
 * Simulates the compiled circuit on `assignment` ("101"; one bit per
 * input) and writes `{"outputs":[...],"consistent":...,"quiescent":...,
 * "events":...}` as JSON.
 *
 * # Safety
 * `circuit` must be NULL or a live handle from [`sb_circuit_compile`];
 * `assignment`, if non-NULL, must point to a NUL-terminated string;
 * `out_json`, if non-NULL, must be valid for writing one pointer.
 */
enum SbStatus sb_circuit_evaluate(const struct SbCircuit *circuit,
                                  const char *assignment,
                                  uint64_t seed,
                                  uint64_t max_events,
                                  double leak_rate,
                                  char **out_json);

/**
 * Releases a circuit. NULL is ignored.
 *
 * # Safety
 * `circuit` must be NULL or a handle from [`sb_circuit_compile`] that
 * has not already been freed.
 */
void sb_circuit_free(struct SbCircuit *circuit);

/**
 * Simulates a solution state given as JSON (`{"free":[...],
 * "complexes":[...],"waste":[...]}`) and writes the final state with
 * trace length and quiescence flag as JSON.
 *
 * # Safety
 * `state_json`, if non-NULL, must point to a NUL-terminated string;
 * `out_json`, if non-NULL, must be valid for writing one pointer.
 */
enum SbStatus sb_dsd_simulate(const char *state_json,
                              uint64_t seed,
                              uint64_t max_events,
                              double leak_rate,
                              char **out_json);

/**
 * Writes the brute-force feasibility report for an `n`-node instance as
 * JSON (path count, strand length, mass, species count, capacity bound).
 *
 * # Safety
 * `out_json`, if non-NULL, must be valid for writing one pointer.
 */
enum SbStatus sb_feasibility_report(uint64_t n,
                                    uint64_t seg_len,
                                    uint64_t copies,
                                    double mass_per_bp,
                                    char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STRANDBENCH_H */
