#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "randclust/dense.hpp"

namespace randclust {

using NodeId = std::uint32_t;

/// Weighted sparse adjacency in compressed-row form with sorted column
/// indices. Values are 1 for a raw adjacency matrix and 1/p after random
/// sampling. Immutable after construction; safe to share across threads.
struct SparseDirectedGraph {
    NodeId n = 0;
    std::vector<std::size_t> row_offsets;  // length n+1, non-decreasing
    std::vector<NodeId> col_indices;       // per-edge target, strictly increasing per row
    std::vector<double> values;            // per-edge positive weight

    std::size_t nnz() const { return col_indices.size(); }

    std::span<const NodeId> row_targets(NodeId i) const {
        return {col_indices.data() + row_offsets[i], row_offsets[i + 1] - row_offsets[i]};
    }
    std::span<const double> row_values(NodeId i) const {
        return {values.data() + row_offsets[i], row_offsets[i + 1] - row_offsets[i]};
    }

    bool operator==(const SparseDirectedGraph&) const = default;

    /// Build a canonical graph from (src, dst, weight) triplets. Weights must
    /// be positive; duplicate (src, dst) pairs are rejected.
    static SparseDirectedGraph from_triplets(
        NodeId n, std::vector<std::tuple<NodeId, NodeId, double>> triplets);
};

/// Parse a `src<TAB>dst` edge list (0-based decimal ids, `#` comments).
/// Duplicate edges collapse to a single edge of weight 1. With n_hint, any id
/// >= n_hint is an error and the result has exactly n_hint nodes; otherwise
/// n = max id + 1. one_based shifts every id down by one while reading.
SparseDirectedGraph from_edge_list(std::istream& in,
                                   std::optional<NodeId> n_hint = std::nullopt,
                                   bool one_based = false);

/// Write sorted `src<TAB>dst` lines. Weights are not representable in this
/// format; from_edge_list(to_edge_list(g)) == g holds for unit-weight graphs.
void to_edge_list(const SparseDirectedGraph& g, std::ostream& out);

/// Exact transpose in canonical form; an involution.
SparseDirectedGraph transpose(const SparseDirectedGraph& g);

/// A*M, or A^T*M when transposed. Per-row reduction order is fixed, so the
/// result is bitwise reproducible.
DenseMatrix multiply_dense(const SparseDirectedGraph& g, const DenseMatrix& m,
                           bool transposed = false);

/// Out-degrees (nnz per row) and in-degrees (occurrences per column).
std::pair<std::vector<NodeId>, std::vector<NodeId>> degrees(const SparseDirectedGraph& g);

/// Dense n x n copy. Guarded at n <= 20000; desk-scale metrics only.
DenseMatrix to_dense(const SparseDirectedGraph& g);

/// Sparse graph holding every strictly positive entry of a dense matrix.
/// Negative entries are rejected (edge weights must be positive).
SparseDirectedGraph from_dense(const DenseMatrix& m);

}  // namespace randclust
