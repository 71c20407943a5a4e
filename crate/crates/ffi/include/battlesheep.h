#ifndef BATTLESHEEP_H
#define BATTLESHEEP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BsStatus {
  BS_STATUS_OK = 0,
  BS_STATUS_NULL_POINTER = 1,
  BS_STATUS_INVALID_UTF8 = 2,
  BS_STATUS_PARSE = 3,
  BS_STATUS_ILLEGAL_MOVE = 4,
  BS_STATUS_OUT_OF_RANGE = 5,
  BS_STATUS_BUDGET = 6,
  BS_STATUS_COMPILE = 7,
  BS_STATUS_PANIC = 8,
} BsStatus;

/**
 * Opaque board handle.
 */
typedef struct BsPosition BsPosition;

typedef struct BsMove {
  int32_t q;
  int32_t r;
  /**
   * 0..=5, counter-clockwise from +q.
   */
  uint8_t dir;
  uint32_t count;
} BsMove;

typedef struct BsSolveResult {
  /**
   * 1 if the player to move wins, 0 if they lose.
   */
  uint8_t win;
  /**
   * Meaningful only when `win` is 1.
   */
  struct BsMove best_move;
  uint64_t nodes;
} BsSolveResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * Valid until the next call into this library on the same thread.
 */
const char *bs_last_error(void);

/**
 * Parses a board file.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum BsStatus bs_position_parse(const char *text, struct BsPosition **out);

/**
 * Compiles a circuit description to a board.
 *
 * # Safety
 * `circuit` must be a NUL-terminated string and `out` a writable pointer.
 */
enum BsStatus bs_compile(const char *circuit, struct BsPosition **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void bs_position_free(struct BsPosition *p);

/**
 * 0 when Blue is to move, 1 for Red, -1 on null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
int32_t bs_position_to_move(const struct BsPosition *p);

/**
 * Number of legal moves for the player to move.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum BsStatus bs_position_move_count(const struct BsPosition *p, size_t *out);

/**
 * The `index`th legal move, in the engine's stable order.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum BsStatus bs_position_move(const struct BsPosition *p, size_t index, struct BsMove *out);

/**
 * Plays `m` and returns the successor as a new handle; `p` is unchanged.
 *
 * # Safety
 * `p` must be a live handle, `m` readable and `out` writable.
 */
enum BsStatus bs_position_apply(const struct BsPosition *p,
                                const struct BsMove *m,
                                struct BsPosition **out);

/**
 * Board file text; free with `bs_string_free`.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum BsStatus bs_position_serialize(const struct BsPosition *p, char **out);

/**
 * # Safety
 * `s` must be null or come from `bs_position_serialize`.
 */
void bs_string_free(char *s);

/**
 * Decides the position. Zero limits select the defaults.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum BsStatus bs_solve(const struct BsPosition *p,
                       uint64_t max_nodes,
                       uint64_t max_seconds,
                       struct BsSolveResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BATTLESHEEP_H */
