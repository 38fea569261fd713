#include "randclust/randsvd.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "randclust/errors.hpp"
#include "randclust/rng.hpp"

namespace randclust {

namespace {

// Fixed internal seed for the iterative backend's start block and the
// deterministic retry tag, so results depend only on (graph, config).
constexpr std::uint64_t kSubspaceStartSeed = 0x7261646e636c7573ull;

DenseMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, rng::GaussianStream& stream) {
    DenseMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = stream.next();
    return m;
}

DenseMatrix thin_q(const DenseMatrix& m) {
    Eigen::HouseholderQR<DenseMatrix> qr(m);
    return qr.householderQ() * DenseMatrix::Identity(m.rows(), m.cols());
}

std::pair<DenseMatrix, DenseMatrix> thin_qr(const DenseMatrix& m) {
    Eigen::HouseholderQR<DenseMatrix> qr(m);
    DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(m.rows(), m.cols());
    DenseMatrix r = qr.matrixQR()
                        .topRows(m.cols())
                        .template triangularView<Eigen::Upper>();
    return {std::move(q), std::move(r)};
}

// Largest-magnitude entry of each u column made positive; v flips along.
void fix_signs(DenseMatrix& u, DenseMatrix& v) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        Eigen::Index arg = 0;
        u.col(j).cwiseAbs().maxCoeff(&arg);
        if (u(arg, j) < 0.0) {
            u.col(j) *= -1.0;
            v.col(j) *= -1.0;
        }
    }
}

}  // namespace

SvdFactor projection_svd(const SparseDirectedGraph& g, const ProjectionConfig& cfg) {
    if (cfg.rank < 1) throw ValidationError("projection rank must be at least 1");
    if (cfg.oversample_r < 0 || cfg.oversample_s < 0)
        throw ValidationError("oversampling parameters must be non-negative");
    if (cfg.power_q < 0) throw ValidationError("power parameter must be non-negative");
    int widest = cfg.rank + std::max(cfg.oversample_r, cfg.oversample_s);
    if (static_cast<NodeId>(widest) > g.n)
        throw ValidationError("rank + oversampling must not exceed n");

    const SparseDirectedGraph gt = transpose(g);
    const Eigen::Index n = g.n;
    const Eigen::Index left_cols = cfg.rank + cfg.oversample_s;
    const Eigen::Index right_cols = cfg.rank + cfg.oversample_r;

    for (int attempt = 0; attempt < 2; ++attempt) {
        rng::GaussianStream omega_stream(rng::mix(cfg.seed, 2 * attempt));
        rng::GaussianStream gamma_stream(rng::mix(cfg.seed, 2 * attempt + 1));
        DenseMatrix omega = gaussian_matrix(n, left_cols, omega_stream);
        DenseMatrix gamma = gaussian_matrix(n, right_cols, gamma_stream);

        // Left sketch (A A^T)^q A Omega with a QR after every product.
        DenseMatrix q = thin_q(multiply_dense(g, omega));
        for (int t = 0; t < cfg.power_q; ++t) {
            q = thin_q(multiply_dense(gt, q));
            q = thin_q(multiply_dense(g, q));
        }
        // Right sketch (A^T A)^q A^T Gamma.
        DenseMatrix t_basis = thin_q(multiply_dense(gt, gamma));
        for (int t = 0; t < cfg.power_q; ++t) {
            t_basis = thin_q(multiply_dense(g, t_basis));
            t_basis = thin_q(multiply_dense(gt, t_basis));
        }

        DenseMatrix small = q.transpose() * multiply_dense(g, t_basis);
        if (!q.allFinite() || !t_basis.allFinite() || !small.allFinite()) continue;

        Eigen::JacobiSVD<DenseMatrix> svd(small, Eigen::ComputeThinU | Eigen::ComputeThinV);
        SvdFactor f;
        f.u = q * svd.matrixU().leftCols(cfg.rank);
        f.v = t_basis * svd.matrixV().leftCols(cfg.rank);
        f.sigma = svd.singularValues().head(cfg.rank);
        fix_signs(f.u, f.v);
        return f;
    }
    throw NumericalError("degenerate sketch: projection sketches are not finite after retry");
}

SparseDirectedGraph sparsify(const SparseDirectedGraph& g, double p, std::uint64_t seed) {
    if (!(p > 0.0 && p <= 1.0))
        throw ValidationError("sampling probability must lie in (0,1]");
    SparseDirectedGraph out;
    out.n = g.n;
    out.row_offsets.assign(static_cast<std::size_t>(g.n) + 1, 0);
    const double inv_p = 1.0 / p;
    for (NodeId i = 0; i < g.n; ++i) {
        rng::Stream stream(rng::mix(seed, i));
        for (std::size_t e = g.row_offsets[i]; e < g.row_offsets[i + 1]; ++e) {
            if (stream.next_uniform() < p) {
                out.col_indices.push_back(g.col_indices[e]);
                out.values.push_back(g.values[e] * inv_p);
            }
        }
        out.row_offsets[i + 1] = out.col_indices.size();
    }
    return out;
}

SvdFactor iterative_partial_svd(const SparseDirectedGraph& g, int rank, double tol,
                                int max_iter) {
    if (rank < 1) throw ValidationError("rank must be at least 1");
    if (static_cast<NodeId>(rank) > g.n) throw ValidationError("rank must not exceed n");
    if (!(tol > 0.0)) throw ValidationError("tol must be positive");
    if (max_iter < 1) throw ValidationError("max_iter must be at least 1");

    const SparseDirectedGraph gt = transpose(g);
    rng::GaussianStream start(kSubspaceStartSeed);
    DenseMatrix v = thin_q(gaussian_matrix(g.n, rank, start));
    DenseMatrix u, small_u, small_v;
    Vector ritz = Vector::Zero(rank);
    bool converged = false;

    for (int iter = 0; iter < max_iter; ++iter) {
        u = thin_q(multiply_dense(g, v));
        auto [v_next, r] = thin_qr(multiply_dense(gt, u));
        v = std::move(v_next);
        // A^T U = V R, so the restriction U^T A V equals R^T.
        Eigen::JacobiSVD<DenseMatrix> small(r.transpose(),
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
        Vector next = small.singularValues();
        double change = 0.0;
        for (int j = 0; j < rank; ++j)
            change = std::max(change, std::abs(next(j) - ritz(j)) / std::max(next(j), 1e-300));
        ritz = next;
        small_u = small.matrixU();
        small_v = small.matrixV();
        if (iter > 0 && change < tol) {
            converged = true;
            break;
        }
    }

    SvdFactor f;
    f.u = u * small_u;
    f.v = v * small_v;
    f.sigma = ritz;
    f.converged = converged;
    fix_signs(f.u, f.v);
    return f;
}

SvdFactor sampling_svd(const SparseDirectedGraph& g, const SamplingConfig& cfg) {
    if (cfg.rank < 1) throw ValidationError("sampling rank must be at least 1");
    return iterative_partial_svd(sparsify(g, cfg.p, cfg.seed), cfg.rank, cfg.tol, cfg.max_iter);
}

}  // namespace randclust
