#pragma once

#include <vector>

#include "randclust/dense.hpp"
#include "randclust/graph.hpp"
#include "randclust/models.hpp"
#include "randclust/randsvd.hpp"

namespace randclust {

/// Largest singular value via power iteration on M^T M with a deterministic
/// seeded start. Sets *converged (when given) to false if max_iter ran out.
double spectral_norm(const DenseMatrix& m, double tol = 1e-9, int max_iter = 5000,
                     bool* converged = nullptr);

/// ||U Sigma V^T - P||_2 for a factor, or ||densify(g) - P||_2 for a graph
/// (the raw adjacency A or its sampled surrogate A^rs).
double approximation_error(const SvdFactor& factor, const DenseMatrix& p);
double approximation_error(const SparseDirectedGraph& g, const DenseMatrix& p);

/// Fraction of nodes misassigned under the best cluster-label permutation,
/// solved as a maximum-agreement assignment on the k x k confusion matrix.
double misclustering_rate(const std::vector<int>& est, const std::vector<int>& truth, int k);

/// Theoretical misclustering rates for each backend and model, evaluated
/// with all leading constants set to 1 (rates, not certified bounds).
struct BoundReport {
    double phi = 0.0;         // sampling concentration rate max{sqrt(n a/p), sqrt(log n)/p, delta}
    double delta_term = 0.0;  // sqrt(n a^2/p) (1 + p^{1/4} max(1, sqrt(1/p - 1)))
    double rp_row_bound = 0.0;
    double rp_col_bound = 0.0;
    double rs_row_bound = 0.0;
    double rs_col_bound = 0.0;
    double dc_rp_row_bound = 0.0;
    double dc_rp_col_bound = 0.0;
    double dc_rs_row_bound = 0.0;
    double dc_rs_col_bound = 0.0;
    bool sparsity_ok = true;  // alpha_n >= log(n)/n
};

BoundReport theoretical_bounds(NodeId n, double p, double alpha_n,
                               const PopulationStructure& structure, int ky, int kz,
                               const std::vector<NodeId>& row_sizes,
                               const std::vector<NodeId>& col_sizes);

}  // namespace randclust
