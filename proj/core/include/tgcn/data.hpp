#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tgcn/mixing.hpp"
#include "tgcn/model.hpp"
#include "tgcn/sparse.hpp"
#include "tgcn/tensor3.hpp"

namespace tgcn {

enum class DatasetKind { bitcoin_otc, bitcoin_alpha, reddit, chess };
DatasetKind dataset_from_string(const std::string& s);
std::string to_string(DatasetKind k);

// Fixed per-dataset protocol: window length, partitioning, class count,
// metric, and the published statistics the ingest checks compare against.
struct DatasetInfo {
    DatasetKind kind;
    const char* name;
    std::int64_t window_seconds;
    int classes;
    Metric metric;
    int s_train, s_val, s_test;
    long published_nodes;
    long published_edges;
    int published_depth;
    int depth_tolerance;  // 0 = exact match required
};
const DatasetInfo& dataset_info(DatasetKind kind);

struct RawRecord {
    std::string src;
    std::string dst;
    double rating = 0.0;
    double timestamp = 0.0;  // epoch seconds
};

// File formats:
//  - bitcoin_otc / bitcoin_alpha: headerless CSV rows SOURCE,TARGET,RATING,TIME
//    (TIME may be fractional epoch seconds)
//  - reddit: TSV with a header line; the SOURCE_SUBREDDIT, TARGET_SUBREDDIT,
//    TIMESTAMP (YYYY-MM-DD HH:MM:SS, UTC) and LINK_SENTIMENT columns are used
//  - chess: whitespace-separated rows `white black result timestamp`,
//    '%'-prefixed comment lines skipped
// Malformed rows raise DataError with the 1-based line number.
std::vector<RawRecord> parse_dataset(DatasetKind kind, const std::string& path);

// One aggregated edge of one time step. cls is the class index after label
// aggregation, or -1 when the summed rating maps to no class (bitcoin/reddit
// sum of exactly zero); such edges stay in the adjacency and feature counts
// but not in the classification sets.
struct StepEdge {
    int src = 0;
    int dst = 0;
    double rating_sum = 0.0;
    int cls = -1;
};

struct DynamicGraph {
    DatasetKind kind = DatasetKind::bitcoin_otc;
    int num_nodes = 0;
    int num_steps = 0;
    long records_kept = 0;  // raw interactions inside complete windows
    std::vector<std::vector<StepEdge>> steps;  // sorted by (src, dst) within a step
    std::vector<std::string> node_ids;         // dense index -> raw id
};

// Temporal partition into complete windows of the dataset's length, anchored
// at the earliest timestamp; records in the trailing partial window are
// dropped. Duplicate (src, dst) records within a window collapse into one
// edge with the summed rating; the class mapping applies to the sum.
// Node indexing: integer-id datasets span the raw id range (index =
// id - min_id), reddit maps subreddit names by first appearance. Reddit
// records are pre-filtered to subreddits with >= 20 total interactions.
DynamicGraph partition(const std::vector<RawRecord>& records, DatasetKind kind);

struct IngestStats {
    long nodes = 0;
    long edges = 0;  // records kept, matching the published "Edges" counts
    int depth = 0;
};
IngestStats ingest_stats(const DynamicGraph& g);

// Per-step out-degree/in-degree counts over aggregated edges, N x 2 x T.
Tensor3 build_features(const DynamicGraph& g, bool log_scale = false);

// 0/1 presence matrices per step (aggregated edges).
std::vector<CsrMatrix> binary_adjacency(const DynamicGraph& g);

// slices[t] replaced by the sum of slices max(0, t-life+1) .. t. life >= 1;
// life == 1 is the identity. Labels are untouched by construction.
std::vector<CsrMatrix> apply_edge_life(const std::vector<CsrMatrix>& slices, int life);

// Node subset ranked by total degree (out + in, aggregated over all steps),
// ties toward the lower index; result sorted ascending.
std::vector<int> top_degree_nodes(const DynamicGraph& g, int count);

// Subgraph induced on `keep` (sorted dense indices); edges with an endpoint
// outside the set are dropped and indices remapped to 0..keep.size()-1.
DynamicGraph induce_subgraph(const DynamicGraph& g, const std::vector<int>& keep);

struct SplitSpec {
    int s_train = 0;
    int s_val = 0;
    int s_test = 0;
    int total() const { return s_train + s_val + s_test; }
    void validate(int depth) const;  // all positive, sums to depth
};

struct PrepareOptions {
    int edge_life = 10;
    bool symmetrize = false;
    bool log_features = false;
};

struct PreparedData {
    int num_nodes = 0;
    SplitSpec split;
    PreparedWindow train_window;
    PreparedWindow val_window;
    PreparedWindow test_window;
};

// Slices the edge-life-extended, optionally symmetrized, normalized adjacency
// sequence into the three sliding windows (offsets 0, s_val, s_val + s_test,
// each s_train slices long), transforms adjacency and features per window
// with m (must be s_train x s_train), and maps each period's labeled edges to
// window-local slice indices (the last s_val / s_test slices of their
// windows).
PreparedData make_windows(const DynamicGraph& g, const SplitSpec& split, const MixingMatrix& m,
                          const PrepareOptions& options);

// The normalized (pre-transform) slice sequence of one window; what the
// spectral checks consume.
std::vector<CsrMatrix> window_normalized_slices(const DynamicGraph& g, int offset, int length,
                                                const PrepareOptions& options);

// Versioned binary cache of a partitioned graph (magic, version, node count,
// step count, node ids, per-step edge arrays) so re-runs skip parsing.
void save_graph_cache(const std::string& path, const DynamicGraph& g);
DynamicGraph load_graph_cache(const std::string& path);  // DataError on mismatch

}  // namespace tgcn
