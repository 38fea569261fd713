#pragma once

#include <cstdint>

#include "randclust/dense.hpp"
#include "randclust/graph.hpp"

namespace randclust {

/// Rank-k singular factors from any backend. Columns of u and v are
/// orthonormal; sigma is non-increasing and non-negative. Sign convention:
/// in each column of u the entry of largest magnitude is positive.
struct SvdFactor {
    DenseMatrix u;    // n x k left singular vectors
    Vector sigma;     // k singular values
    DenseMatrix v;    // n x k right singular vectors
    bool converged = true;
};

/// Random-projection SVD parameters. Test matrices are generated internally
/// from the seed with independent standard Gaussian entries.
struct ProjectionConfig {
    int rank = 0;
    int oversample_r = 10;  // extra columns on the right sketch
    int oversample_s = 10;  // extra columns on the left sketch
    int power_q = 2;        // power-iteration count
    std::uint64_t seed = 0;
};

/// Random-sampling SVD parameters: Bernoulli keep-rate p for existing edges
/// (kept values rescaled by 1/p) followed by the iterative backend.
struct SamplingConfig {
    int rank = 0;
    double p = 0.7;
    std::uint64_t seed = 0;
    double tol = 1e-8;
    int max_iter = 1000;
};

/// Sketch-based rank factors: Gaussian sketches of A and A^T (with power
/// iterations, re-orthonormalized by QR after every product), a small SVD of
/// Q^T A T, and truncation to the leading `rank` triplets.
SvdFactor projection_svd(const SparseDirectedGraph& g, const ProjectionConfig& cfg);

/// Keep each existing edge independently with probability p and rescale kept
/// values by 1/p. Entries absent from g stay zero, so only nnz draws are
/// made (one row substream each). p = 1 returns a bit-identical graph.
SparseDirectedGraph sparsify(const SparseDirectedGraph& g, double p, std::uint64_t seed);

/// Block subspace iteration on (A*, A^T*) with QR re-orthonormalization each
/// step and Ritz extraction; converged when the max relative change of the
/// `rank` Ritz values drops below tol. Hitting max_iter returns the best
/// iterate with converged = false.
SvdFactor iterative_partial_svd(const SparseDirectedGraph& g, int rank, double tol = 1e-8,
                                int max_iter = 1000);

/// iterative_partial_svd on sparsify(g, p, seed).
SvdFactor sampling_svd(const SparseDirectedGraph& g, const SamplingConfig& cfg);

}  // namespace randclust
