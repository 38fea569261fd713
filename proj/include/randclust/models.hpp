#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "randclust/dense.hpp"
#include "randclust/graph.hpp"

namespace randclust {

/// Stochastic co-block model: directed edge i -> j is Bernoulli with
/// probability b(row cluster of i, column cluster of j).
struct ScbmSpec {
    NodeId n = 0;
    int ky = 0;                     // row cluster count, ky <= kz
    int kz = 0;                     // column cluster count
    DenseMatrix b;                  // ky x kz connectivity, entries in [0,1], rank ky
    std::vector<NodeId> row_sizes;  // length ky, positive, sums to n
    std::vector<NodeId> col_sizes;  // length kz, positive, sums to n

    /// Throws ValidationError naming the violated invariant. Structural
    /// checks only; rank(b) == ky is enforced by the consumers that need the
    /// singular structure (sampling any b in [0,1] is well defined).
    void validate() const;
};

/// Numerical check that rank(b) == ky, at 1e-10 relative to the largest
/// singular value.
void require_full_rank_connectivity(const ScbmSpec& spec);

/// Degree-corrected variant: edge probability theta_y[i] * theta_z[j] * b.
/// Identifiability: each row/column cluster's propensities attain max 1.
struct DcScbmSpec {
    ScbmSpec base;
    Vector theta_y;  // length n, positive send propensities
    Vector theta_z;  // length n, positive receive propensities

    void validate() const;
};

/// Row and column cluster labels per node.
struct MembershipPair {
    std::vector<int> y;  // in [0, ky)
    std::vector<int> z;  // in [0, kz)
};

/// Population quantities of P: truncated singular factors and the separation,
/// heterogeneity, and angle measures the misclustering bounds are built from.
struct PopulationStructure {
    DenseMatrix u_bar;  // n x ky left singular vectors of P
    DenseMatrix v_bar;  // n x ky right singular vectors of P
    Vector sigma;       // ky singular values, descending; sigma_n = sigma(0), gamma_n = min
    double tau = 0.0;   // min row-separation of u_bar across row clusters
    double delta = 0.0; // min row-separation bound of v_bar across column clusters
    Vector kappa_y;     // per-row-cluster send heterogeneity (1 when homogeneous)
    Vector kappa_z;     // per-column-cluster receive heterogeneity
    double eta = 0.0;   // max cross-cluster cosine among population right directions
    double alpha_n = 0.0;  // max entry of the edge-probability matrix

    double sigma_max() const { return sigma(0); }
    double gamma_min() const { return sigma(sigma.size() - 1); }
};

/// Cluster labels implied by the contiguous block layout of a spec.
MembershipPair block_memberships(const ScbmSpec& spec);

/// Sample an adjacency matrix. Memberships are contiguous blocks (the first
/// row_sizes[0] nodes form row cluster 0, and so on). Each off-diagonal entry
/// is an independent Bernoulli draw; the diagonal is zero. One RNG substream
/// per row, so output is reproducible at any thread count.
std::pair<SparseDirectedGraph, MembershipPair> generate_scbm(const ScbmSpec& spec,
                                                             std::uint64_t seed);

/// Degree-corrected sampling. With all propensities equal to 1 this is
/// bit-identical to generate_scbm at the same seed.
std::pair<SparseDirectedGraph, MembershipPair> generate_dc_scbm(const DcScbmSpec& spec,
                                                                std::uint64_t seed);

/// Dense population matrix P including its diagonal (E[A] = P - diag(P)).
/// Guarded at n <= 20000.
DenseMatrix population_matrix(const ScbmSpec& spec);
DenseMatrix population_matrix(const DcScbmSpec& spec);

/// Exact dense SVD of P truncated to ky factors plus every derived quantity.
/// Throws NumericalError if the numerical rank of P falls below ky.
PopulationStructure population_structure(const ScbmSpec& spec);
PopulationStructure population_structure(const DcScbmSpec& spec);

/// Balanced ScBM with alpha on the diagonal of b and alpha*(1-lambda) off it.
ScbmSpec four_parameter_spec(NodeId n, int k, double alpha, double lambda);

}  // namespace randclust
