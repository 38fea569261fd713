#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "randclust/errors.hpp"
#include "randclust/metrics.hpp"
#include "randclust/models.hpp"
#include "randclust/randsvd.hpp"
#include "randclust/rng.hpp"

using namespace randclust;

namespace {

bool bit_equal(const SvdFactor& a, const SvdFactor& b) {
    return a.u.rows() == b.u.rows() && a.u.cols() == b.u.cols() &&
           (a.u.array() == b.u.array()).all() && (a.sigma.array() == b.sigma.array()).all() &&
           (a.v.array() == b.v.array()).all();
}

double frobenius_residual(const SvdFactor& f, const DenseMatrix& dense) {
    DenseMatrix recon = f.u * f.sigma.asDiagonal() * f.v.transpose();
    return (recon - dense).norm();
}

}  // namespace

TEST_CASE("projection reconstructs exactly low-rank weighted graphs") {
    rng::Stream s(8086);
    for (int q : {0, 1, 2}) {
        auto g = oracles::random_rank_k_graph(s, 80, 4);
        ProjectionConfig cfg;
        cfg.rank = 4;
        cfg.power_q = q;
        cfg.seed = 500 + q;
        SvdFactor f = projection_svd(g, cfg);
        CHECK(frobenius_residual(f, oracles::densify(g)) <= 1e-8);
        CHECK(oracles::orthonormality_defect(f.u) <= 1e-8);
        CHECK(oracles::orthonormality_defect(f.v) <= 1e-8);
    }
}

TEST_CASE("full-rank projection matches the dense SVD oracle") {
    rng::Stream s(17);
    std::vector<std::tuple<NodeId, NodeId, double>> triplets;
    for (NodeId i = 0; i < 40; ++i)
        for (NodeId j = 0; j < 40; ++j)
            if (s.next_uniform() < 0.2) triplets.emplace_back(i, j, 0.1 + s.next_uniform());
    auto g = SparseDirectedGraph::from_triplets(40, std::move(triplets));
    ProjectionConfig cfg;
    cfg.rank = 40;
    cfg.oversample_r = cfg.oversample_s = 0;
    cfg.power_q = 0;
    cfg.seed = 3;
    SvdFactor f = projection_svd(g, cfg);
    Vector oracle = oracles::dense_singular_values(oracles::densify(g));
    CHECK((f.sigma - oracle).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("projection never exceeds the raw approximation error on block models") {
    auto spec = four_parameter_spec(300, 3, 0.2, 0.5);
    DenseMatrix p = population_matrix(spec);
    for (int rep = 0; rep < 5; ++rep) {
        auto [g, mem] = generate_scbm(spec, rng::mix(606, rep));
        ProjectionConfig cfg;
        cfg.rank = 3;
        cfg.seed = rng::mix(707, rep);
        SvdFactor f = projection_svd(g, cfg);
        double rp_err = approximation_error(f, p);
        double raw_err = approximation_error(g, p);
        CHECK(rp_err <= raw_err);
    }
}

TEST_CASE("power iterations do not hurt the mean approximation error") {
    auto spec = four_parameter_spec(240, 3, 0.25, 0.5);
    DenseMatrix p = population_matrix(spec);
    double mean_q0 = 0.0, mean_q2 = 0.0;
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        auto [g, mem] = generate_scbm(spec, rng::mix(11011, rep));
        ProjectionConfig cfg;
        cfg.rank = 3;
        cfg.seed = rng::mix(22022, rep);
        cfg.power_q = 0;
        mean_q0 += approximation_error(projection_svd(g, cfg), p);
        cfg.power_q = 2;
        mean_q2 += approximation_error(projection_svd(g, cfg), p);
    }
    CHECK(mean_q2 / reps <= mean_q0 / reps + 1e-9);
}

TEST_CASE("projection validates its configuration") {
    rng::Stream s(5);
    auto g = oracles::random_rank_k_graph(s, 20, 2);
    ProjectionConfig cfg;
    cfg.rank = 15;  // 15 + 10 > 20
    CHECK_THROWS_AS(projection_svd(g, cfg), ValidationError);
    cfg.rank = 0;
    CHECK_THROWS_AS(projection_svd(g, cfg), ValidationError);
    cfg.rank = 2;
    cfg.power_q = -1;
    CHECK_THROWS_AS(projection_svd(g, cfg), ValidationError);
}

TEST_CASE("sparsify at p=1 is the identity") {
    auto spec = four_parameter_spec(120, 2, 0.3, 0.5);
    auto [g, mem] = generate_scbm(spec, 9);
    CHECK(sparsify(g, 1.0, 42) == g);
}

TEST_CASE("sparsify keeps a binomial share of edges with rescaled values") {
    // ~10000-edge graph.
    auto spec = four_parameter_spec(320, 2, 0.2, 0.5);
    auto [g, mem] = generate_scbm(spec, 64);
    double nnz = double(g.nnz());
    CHECK(nnz > 9000);
    auto kept = sparsify(g, 0.5, 1234);
    CHECK(std::abs(double(kept.nnz()) - 0.5 * nnz) <= 3.0 * std::sqrt(nnz * 0.25));
    for (double v : kept.values) CHECK(v == 2.0);
    // Support containment.
    for (NodeId i = 0; i < kept.n; ++i) {
        auto targets = g.row_targets(i);
        for (NodeId j : kept.row_targets(i))
            CHECK(std::find(targets.begin(), targets.end(), j) != targets.end());
    }
}

TEST_CASE("sparsified values are unbiased for the original entries") {
    auto spec = four_parameter_spec(24, 2, 0.4, 0.5);
    auto [g, mem] = generate_scbm(spec, 31337);
    const int seeds = 200;
    const double p = 0.7;
    std::vector<double> sums(g.nnz(), 0.0);
    for (int r = 0; r < seeds; ++r) {
        auto kept = sparsify(g, p, rng::mix(701, r));
        // Walk both edge lists in lockstep (support(kept) is a subset).
        for (NodeId i = 0; i < g.n; ++i) {
            std::size_t ke = kept.row_offsets[i];
            for (std::size_t e = g.row_offsets[i]; e < g.row_offsets[i + 1]; ++e) {
                if (ke < kept.row_offsets[i + 1] && kept.col_indices[ke] == g.col_indices[e]) {
                    sums[e] += kept.values[ke];
                    ++ke;
                }
            }
        }
    }
    double band = 3.0 * std::sqrt((1.0 - p) / (p * seeds));
    for (std::size_t e = 0; e < sums.size(); ++e)
        CHECK(std::abs(sums[e] / seeds - g.values[e]) <= band);
}

TEST_CASE("sparsify rejects probabilities outside (0,1]") {
    auto g = SparseDirectedGraph::from_triplets(2, {{0, 1, 1.0}});
    CHECK_THROWS_AS(sparsify(g, 0.0, 1), ValidationError);
    CHECK_THROWS_AS(sparsify(g, 1.5, 1), ValidationError);
}

TEST_CASE("iterative backend resolves a diagonal weighted graph") {
    auto g = SparseDirectedGraph::from_triplets(3, {{0, 0, 3.0}, {1, 1, 2.0}, {2, 2, 1.0}});
    SvdFactor f = iterative_partial_svd(g, 3);
    CHECK(f.converged);
    CHECK(f.sigma(0) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(f.sigma(1) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(f.sigma(2) == doctest::Approx(1.0).epsilon(1e-10));
    // Axis vectors with the positive-sign convention.
    CHECK((f.u - DenseMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((f.v - DenseMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("iterative backend matches the dense oracle on a random graph") {
    rng::Stream s(626);
    std::vector<std::tuple<NodeId, NodeId, double>> triplets;
    for (NodeId i = 0; i < 60; ++i)
        for (NodeId j = 0; j < 60; ++j)
            if (s.next_uniform() < 0.15) triplets.emplace_back(i, j, 0.2 + s.next_uniform());
    auto g = SparseDirectedGraph::from_triplets(60, std::move(triplets));
    SvdFactor f = iterative_partial_svd(g, 5, 1e-10, 5000);
    Vector oracle = oracles::dense_singular_values(oracles::densify(g)).head(5);
    CHECK((f.sigma - oracle).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(oracles::orthonormality_defect(f.u) <= 1e-8);
    CHECK(oracles::orthonormality_defect(f.v) <= 1e-8);
}

TEST_CASE("iterative backend on the empty graph returns zero values") {
    SparseDirectedGraph g;
    g.n = 6;
    g.row_offsets.assign(7, 0);
    SvdFactor f = iterative_partial_svd(g, 2);
    CHECK(f.sigma.isZero(0.0));
    CHECK(oracles::orthonormality_defect(f.u) <= 1e-8);
    CHECK(oracles::orthonormality_defect(f.v) <= 1e-8);
}

TEST_CASE("every backend returns orthonormal factors on block-model graphs") {
    auto spec = four_parameter_spec(150, 3, 0.3, 0.6);
    auto [g, mem] = generate_scbm(spec, 8675309);
    ProjectionConfig pc;
    pc.rank = 3;
    pc.seed = 4;
    SamplingConfig sc;
    sc.rank = 3;
    sc.p = 0.7;
    sc.seed = 5;
    for (const SvdFactor& f :
         {iterative_partial_svd(g, 3), projection_svd(g, pc), sampling_svd(g, sc)}) {
        CHECK(oracles::orthonormality_defect(f.u) <= 1e-8);
        CHECK(oracles::orthonormality_defect(f.v) <= 1e-8);
        for (Eigen::Index i = 1; i < f.sigma.size(); ++i) CHECK(f.sigma(i - 1) >= f.sigma(i));
        CHECK(f.sigma(f.sigma.size() - 1) >= 0.0);
    }
}

TEST_CASE("backends are bit-deterministic in (graph, config)") {
    auto spec = four_parameter_spec(120, 3, 0.3, 0.5);
    auto [g, mem] = generate_scbm(spec, 1);
    ProjectionConfig pc;
    pc.rank = 3;
    pc.seed = 99;
    CHECK(bit_equal(projection_svd(g, pc), projection_svd(g, pc)));
    CHECK(bit_equal(iterative_partial_svd(g, 3), iterative_partial_svd(g, 3)));
    SamplingConfig sc;
    sc.rank = 3;
    sc.p = 0.6;
    sc.seed = 12;
    CHECK(bit_equal(sampling_svd(g, sc), sampling_svd(g, sc)));
}

TEST_CASE("sampling at p=1 equals the iterative backend bit for bit") {
    auto spec = four_parameter_spec(150, 3, 0.25, 0.5);
    auto [g, mem] = generate_scbm(spec, 2024);
    SamplingConfig sc;
    sc.rank = 3;
    sc.p = 1.0;
    sc.seed = 5150;
    CHECK(bit_equal(sampling_svd(g, sc), iterative_partial_svd(g, 3, sc.tol, sc.max_iter)));
}

TEST_CASE("sampling inflates the mean approximation error") {
    auto spec = four_parameter_spec(300, 3, 0.2, 0.5);
    DenseMatrix p = population_matrix(spec);
    double mean_raw = 0.0, mean_rs = 0.0;
    const int reps = 5;
    for (int rep = 0; rep < reps; ++rep) {
        auto [g, mem] = generate_scbm(spec, rng::mix(414, rep));
        mean_raw += approximation_error(g, p);
        mean_rs += approximation_error(sparsify(g, 0.7, rng::mix(515, rep)), p);
    }
    CHECK(mean_rs >= mean_raw);
}

TEST_CASE("sampled subspace stays within the Davis-Kahan budget") {
    auto spec = four_parameter_spec(600, 3, 0.2, 0.5);
    auto st = population_structure(spec);
    DenseMatrix p = population_matrix(spec);
    auto [g, mem] = generate_scbm(spec, 1962);
    SamplingConfig sc;
    sc.rank = 3;
    sc.p = 0.7;
    sc.seed = 1963;
    SvdFactor f = sampling_svd(g, sc);
    auto sampled = sparsify(g, sc.p, sc.seed);
    double err = approximation_error(sampled, p);
    double budget = 2.0 * std::sqrt(2.0 * 3.0) * err / st.gamma_min();
    // Procrustes-aligned distance between sampled and population left factors.
    Vector overlap = oracles::dense_singular_values(st.u_bar.transpose() * f.u);
    double dist = std::sqrt(std::max(0.0, 2.0 * 3.0 - 2.0 * overlap.sum()));
    CHECK(dist <= budget);
}
