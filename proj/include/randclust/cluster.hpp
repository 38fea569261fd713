#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "randclust/dense.hpp"
#include "randclust/graph.hpp"
#include "randclust/randsvd.hpp"

namespace randclust {

struct ClusterAssignment {
    std::vector<int> labels;    // length m, in [0, k)
    DenseMatrix centers;        // k x d
    double objective = 0.0;     // sum of squared distances (k-means) or distances (k-median)
    bool converged = false;
    std::size_t zero_rows = 0;  // rows set aside and randomly assigned (k-median only)
};

/// k-means++-seeded Lloyd iterations, best of `restarts` runs by objective.
/// Empty clusters are refilled with the point farthest from its center.
ClusterAssignment lloyd_kmeans(const DenseMatrix& x, int k, std::uint64_t seed,
                               int max_iter = 100, int restarts = 10);

/// Rows with norm <= 1e-12 are set aside and assigned uniformly at random;
/// the rest are normalized to unit length and clustered by alternating
/// nearest-center assignment and Weiszfeld geometric-median updates.
ClusterAssignment spherical_kmedian(const DenseMatrix& x, int k, std::uint64_t seed,
                                    int max_iter = 100, int restarts = 10);

enum class SvdBackend { exact, projection, sampling };
enum class ClusterMethod { kmeans, spherical_kmedian };

const char* to_string(SvdBackend b);
const char* to_string(ClusterMethod m);
std::optional<SvdBackend> backend_from_string(std::string_view s);
std::optional<ClusterMethod> method_from_string(std::string_view s);

struct CoClusterOptions {
    SvdBackend backend = SvdBackend::exact;
    ClusterMethod method = ClusterMethod::kmeans;
    int oversample_r = 10;   // projection backend
    int oversample_s = 10;
    int power_q = 2;
    double sample_p = 0.7;   // sampling backend
    double tol = 1e-8;       // iterative backends
    int max_iter = 1000;
    int cluster_restarts = 10;
    int cluster_max_iter = 100;
};

struct CoClusterDiagnostics {
    double svd_ms = 0.0;
    double row_cluster_ms = 0.0;
    double col_cluster_ms = 0.0;
    std::size_t zero_rows_u = 0;
    std::size_t zero_rows_v = 0;
    double row_objective = 0.0;
    double col_objective = 0.0;
    bool svd_converged = true;
    bool row_converged = true;
    bool col_converged = true;
};

struct CoClusterResult {
    std::vector<int> row_labels;  // in [0, ky)
    std::vector<int> col_labels;  // in [0, kz)
    SvdFactor svd;
    SvdBackend backend = SvdBackend::exact;
    ClusterMethod method = ClusterMethod::kmeans;
    CoClusterDiagnostics diagnostics;
};

/// Rank-ky factors of the adjacency matrix via the chosen backend, then the
/// left embedding clustered into ky groups and the right into kz groups.
/// Deterministic for a fixed seed.
CoClusterResult co_cluster(const SparseDirectedGraph& g, int ky, int kz,
                           const CoClusterOptions& opt, std::uint64_t seed);

}  // namespace randclust
