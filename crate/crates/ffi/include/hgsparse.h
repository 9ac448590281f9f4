#ifndef HGSPARSE_H
#define HGSPARSE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HgsMethod {
  HGS_METHOD_PER_TYPE = 0,
  HGS_METHOD_ALL_TYPES = 1,
} HgsMethod;

typedef enum HgsStatus {
  HGS_STATUS_OK = 0,
  HGS_STATUS_NULL_ARGUMENT = 1,
  HGS_STATUS_INVALID_ARGUMENT = 2,
  HGS_STATUS_IO = 3,
  HGS_STATUS_PARSE = 4,
  HGS_STATUS_GRAPH = 5,
  HGS_STATUS_EMPTY_GRAPH = 6,
  HGS_STATUS_BUFFER_TOO_SMALL = 7,
  HGS_STATUS_PANIC = 8,
} HgsStatus;

// A loaded heterogeneous graph.
typedef struct HgsGraph HgsGraph;

// The edges kept by one sparsifier run over a specific graph.
typedef struct HgsSparsifier HgsSparsifier;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null if none failed.
// The pointer stays valid until the next failing call on the same thread.
const char *hgs_last_error(void);

// Library version as a static string.
const char *hgs_version(void);

// Load a link file (`src dst type [weight]`, tab separated) and an optional
// node file (`nodes` may be null).
//
// # Safety
// `links` and a non-null `nodes` must be NUL-terminated strings; `out` must
// be writable.
enum HgsStatus hgs_graph_load(const char *links,
                              const char *nodes,
                              bool weighted,
                              struct HgsGraph **out);

// Build a graph from parallel arrays of length `len`. `weight` may be null
// for an unweighted graph.
//
// # Safety
// Non-null arrays must hold `len` elements; `out` must be writable.
enum HgsStatus hgs_graph_from_edges(const uint64_t *src,
                                    const uint64_t *dst,
                                    const uint32_t *etype,
                                    const double *weight,
                                    size_t len,
                                    struct HgsGraph **out);

// # Safety
// `graph` must come from this library and not be used afterwards.
void hgs_graph_free(struct HgsGraph *graph);

// # Safety
// `graph` must be a live handle or null (returns 0).
size_t hgs_graph_node_count(const struct HgsGraph *graph);

// # Safety
// `graph` must be a live handle or null (returns 0).
size_t hgs_graph_edge_count(const struct HgsGraph *graph);

// # Safety
// `graph` must be a live handle or null (returns 0).
size_t hgs_graph_edge_type_count(const struct HgsGraph *graph);

// Total degree (in + out) of the node with original id `node`.
//
// # Safety
// `graph` must be a live handle; `out` must be writable.
enum HgsStatus hgs_graph_degree(const struct HgsGraph *graph, uint64_t node, size_t *out);

// Run a sparsifier with budget `k` (at least 1).
//
// # Safety
// `graph` must be a live handle; `out` must be writable.
enum HgsStatus hgs_sparsify(const struct HgsGraph *graph,
                            size_t k,
                            enum HgsMethod method,
                            uint64_t seed,
                            struct HgsSparsifier **out);

// # Safety
// `sparsifier` must come from this library and not be used afterwards.
void hgs_sparsifier_free(struct HgsSparsifier *sparsifier);

// # Safety
// `sparsifier` must be a live handle or null (returns 0).
size_t hgs_sparsifier_kept(const struct HgsSparsifier *sparsifier);

// Kept edges over all edges; NaN for a null handle.
//
// # Safety
// `sparsifier` must be a live handle or null.
double hgs_sparsifier_ratio(const struct HgsSparsifier *sparsifier);

// Copy kept edges, in (src, dst, type) order, into caller arrays of
// capacity `cap`. `written` receives the number of kept edges; if that
// exceeds `cap` nothing is copied and `HGS_STATUS_BUFFER_TOO_SMALL` is
// returned, so a call with `cap = 0` queries the size.
//
// # Safety
// Handles must be live and belong together; non-null arrays must hold `cap`
// elements; `written` must be writable.
enum HgsStatus hgs_sparsifier_edges(const struct HgsGraph *graph,
                                    const struct HgsSparsifier *sparsifier,
                                    uint64_t *src,
                                    uint64_t *dst,
                                    uint32_t *etype,
                                    size_t cap,
                                    size_t *written);

// Write the kept edges as a link file.
//
// # Safety
// Handles must be live and belong together; `path` must be a NUL-terminated
// string.
enum HgsStatus hgs_sparsifier_write_links(const struct HgsGraph *graph,
                                          const struct HgsSparsifier *sparsifier,
                                          const char *path);

// Count coverage violations (for the sparsifier's own budget and method)
// and nodes left without edges. Both are 0 for a correct sparsifier.
//
// # Safety
// Handles must be live and belong together; both outputs must be writable.
enum HgsStatus hgs_sparsifier_check(const struct HgsGraph *graph,
                                    const struct HgsSparsifier *sparsifier,
                                    size_t *violations,
                                    size_t *isolated);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HGSPARSE_H */
