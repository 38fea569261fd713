#include "randclust/cluster.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "randclust/errors.hpp"
#include "randclust/rng.hpp"

namespace randclust {

namespace {

constexpr double kZeroRowTol = 1e-12;
constexpr int kWeiszfeldMaxIter = 50;
constexpr double kWeiszfeldStepTol = 1e-10;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// k-means++ seeding: uniform first center, then squared-distance-weighted
// picks. Falls back to a uniform pick when every point already coincides
// with a chosen center.
DenseMatrix seed_centers(const DenseMatrix& x, int k, rng::Stream& stream) {
    const Eigen::Index m = x.rows();
    DenseMatrix centers(k, x.cols());
    centers.row(0) = x.row(static_cast<Eigen::Index>(stream.next_below(m)));
    Vector dist2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        double total = dist2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double target = stream.next_uniform() * total;
            double cum = 0.0;
            pick = m - 1;
            for (Eigen::Index i = 0; i < m; ++i) {
                cum += dist2(i);
                if (target < cum) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(stream.next_below(m));
        }
        centers.row(c) = x.row(pick);
        dist2 = dist2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

// Nearest center by squared Euclidean distance, ties to the lowest index.
// Returns true when any label changed.
bool assign_labels(const DenseMatrix& x, const DenseMatrix& centers, std::vector<int>& labels) {
    bool changed = false;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        int best = 0;
        double best_d = (x.row(i) - centers.row(0)).squaredNorm();
        for (Eigen::Index c = 1; c < centers.rows(); ++c) {
            double d = (x.row(i) - centers.row(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        if (labels[i] != best) {
            labels[i] = best;
            changed = true;
        }
    }
    return changed;
}

// Moves the point farthest from its current center into each empty cluster.
bool repair_empty(const DenseMatrix& x, DenseMatrix& centers, std::vector<int>& labels) {
    const int k = static_cast<int>(centers.rows());
    std::vector<Eigen::Index> counts(k, 0);
    for (int l : labels) counts[l]++;
    bool repaired = false;
    for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) continue;
        Eigen::Index far = -1;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (counts[labels[i]] <= 1) continue;  // do not empty another cluster
            double d = (x.row(i) - centers.row(labels[i])).squaredNorm();
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far < 0) continue;
        counts[labels[far]]--;
        labels[far] = c;
        counts[c] = 1;
        centers.row(c) = x.row(far);
        repaired = true;
    }
    return repaired;
}

void check_monotone(double obj, double prev, const char* what) {
    if (obj > prev + 1e-9 * (1.0 + prev))
        throw NumericalError(std::string(what) + " objective increased");
}

ClusterAssignment lloyd_once(const DenseMatrix& x, int k, std::uint64_t seed, int max_iter) {
    rng::Stream stream(seed);
    DenseMatrix centers = seed_centers(x, k, stream);
    std::vector<int> labels(x.rows(), -1);
    ClusterAssignment out;
    out.objective = std::numeric_limits<double>::infinity();
    double prev = out.objective;
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = assign_labels(x, centers, labels);
        changed |= repair_empty(x, centers, labels);
        // Means per cluster.
        centers.setZero();
        std::vector<double> counts(k, 0.0);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            centers.row(labels[i]) += x.row(i);
            counts[labels[i]] += 1.0;
        }
        for (int c = 0; c < k; ++c) centers.row(c) /= counts[c];
        double obj = 0.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            obj += (x.row(i) - centers.row(labels[i])).squaredNorm();
        check_monotone(obj, prev, "k-means");
        prev = obj;
        if (!changed) {
            out.converged = true;
            break;
        }
    }
    out.labels = labels;
    out.centers = centers;
    out.objective = prev;
    return out;
}

// Weiszfeld iterations started from the previous center, so each update can
// only lower the cluster's sum of distances. Iterates landing on a data
// point (centers are seeded at data rows) take the Vardi-Zhang step: the
// coincident points are left out of the weighted mean, the vertex is kept
// when the resultant of the remaining unit directions says it is optimal,
// and the move is damped otherwise. Returns whether the step tolerance was
// reached within the iteration cap; callers keep alternating (warm-starting
// here) until every median settles.
bool geometric_median(const DenseMatrix& x, const std::vector<Eigen::Index>& rows,
                      Eigen::RowVectorXd& y) {
    for (int t = 0; t < kWeiszfeldMaxIter; ++t) {
        Eigen::RowVectorXd num = Eigen::RowVectorXd::Zero(y.cols());
        double den = 0.0;
        double coincident = 0.0;
        for (Eigen::Index i : rows) {
            double d = (x.row(i) - y).norm();
            if (d <= kZeroRowTol) {
                coincident += 1.0;
                continue;
            }
            num += x.row(i) / d;
            den += 1.0 / d;
        }
        if (den == 0.0) return true;  // every member sits at y
        Eigen::RowVectorXd next = num / den;
        if (coincident > 0.0) {
            double resultant = (num - den * y).norm();
            if (resultant <= coincident) return true;  // the vertex is the median
            double damp = std::min(1.0, coincident / resultant);
            next = (1.0 - damp) * next + damp * y;
        }
        double step = (next - y).norm();
        y = next;
        if (step < kWeiszfeldStepTol) return true;
    }
    return false;
}

ClusterAssignment kmedian_once(const DenseMatrix& x, int k, std::uint64_t seed, int max_iter) {
    rng::Stream stream(seed);
    DenseMatrix centers = seed_centers(x, k, stream);
    std::vector<int> labels(x.rows(), -1);
    ClusterAssignment out;
    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = assign_labels(x, centers, labels);
        changed |= repair_empty(x, centers, labels);
        std::vector<std::vector<Eigen::Index>> members(k);
        for (Eigen::Index i = 0; i < x.rows(); ++i) members[labels[i]].push_back(i);
        bool settled = true;
        for (int c = 0; c < k; ++c) {
            Eigen::RowVectorXd center = centers.row(c);
            settled &= geometric_median(x, members[c], center);
            centers.row(c) = center;
        }
        double obj = 0.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            obj += (x.row(i) - centers.row(labels[i])).norm();
        check_monotone(obj, prev, "k-median");
        prev = obj;
        if (!changed && settled) {
            out.converged = true;
            break;
        }
    }
    out.labels = labels;
    out.centers = centers;
    out.objective = prev;
    return out;
}

template <typename RunOnce>
ClusterAssignment best_of_restarts(int restarts, std::uint64_t seed, RunOnce run) {
    ClusterAssignment best;
    best.objective = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        ClusterAssignment cur = run(rng::mix(seed, r + 1));
        if (cur.objective < best.objective) best = std::move(cur);
    }
    return best;
}

}  // namespace

ClusterAssignment lloyd_kmeans(const DenseMatrix& x, int k, std::uint64_t seed, int max_iter,
                               int restarts) {
    if (k < 1) throw ValidationError("k must be at least 1");
    if (max_iter < 1 || restarts < 1)
        throw ValidationError("max_iter and restarts must be at least 1");
    if (x.rows() < k) throw ValidationError("k-means needs at least k rows");
    if (!x.allFinite()) throw ValidationError("k-means input must be finite");
    return best_of_restarts(restarts, seed,
                            [&](std::uint64_t s) { return lloyd_once(x, k, s, max_iter); });
}

ClusterAssignment spherical_kmedian(const DenseMatrix& x, int k, std::uint64_t seed,
                                    int max_iter, int restarts) {
    if (k < 1) throw ValidationError("k must be at least 1");
    if (max_iter < 1 || restarts < 1)
        throw ValidationError("max_iter and restarts must be at least 1");
    if (!x.allFinite()) throw ValidationError("k-median input must be finite");
    std::vector<Eigen::Index> nonzero;
    std::vector<Eigen::Index> zero;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (x.row(i).norm() > kZeroRowTol)
            nonzero.push_back(i);
        else
            zero.push_back(i);
    }
    if (static_cast<int>(nonzero.size()) < k)
        throw ValidationError("fewer than k nonzero rows for spherical k-median");

    DenseMatrix xn(nonzero.size(), x.cols());
    for (std::size_t r = 0; r < nonzero.size(); ++r)
        xn.row(r) = x.row(nonzero[r]) / x.row(nonzero[r]).norm();

    ClusterAssignment best = best_of_restarts(
        restarts, seed, [&](std::uint64_t s) { return kmedian_once(xn, k, s, max_iter); });

    ClusterAssignment out;
    out.centers = std::move(best.centers);
    out.objective = best.objective;
    out.converged = best.converged;
    out.zero_rows = zero.size();
    out.labels.assign(x.rows(), 0);
    for (std::size_t r = 0; r < nonzero.size(); ++r) out.labels[nonzero[r]] = best.labels[r];
    rng::Stream zs(rng::mix(seed, 0));
    for (Eigen::Index i : zero) out.labels[i] = static_cast<int>(zs.next_below(k));
    return out;
}

const char* to_string(SvdBackend b) {
    switch (b) {
        case SvdBackend::exact: return "exact";
        case SvdBackend::projection: return "projection";
        case SvdBackend::sampling: return "sampling";
    }
    return "?";
}

const char* to_string(ClusterMethod m) {
    return m == ClusterMethod::kmeans ? "kmeans" : "spherical_kmedian";
}

std::optional<SvdBackend> backend_from_string(std::string_view s) {
    if (s == "exact") return SvdBackend::exact;
    if (s == "projection") return SvdBackend::projection;
    if (s == "sampling") return SvdBackend::sampling;
    return std::nullopt;
}

std::optional<ClusterMethod> method_from_string(std::string_view s) {
    if (s == "kmeans") return ClusterMethod::kmeans;
    if (s == "spherical_kmedian") return ClusterMethod::spherical_kmedian;
    return std::nullopt;
}

CoClusterResult co_cluster(const SparseDirectedGraph& g, int ky, int kz,
                           const CoClusterOptions& opt, std::uint64_t seed) {
    if (ky < 1) throw ValidationError("ky must be at least 1");
    if (ky > kz) throw ValidationError("ky must not exceed kz");
    if (static_cast<NodeId>(kz) > g.n) throw ValidationError("kz must not exceed n");

    CoClusterResult res;
    res.backend = opt.backend;
    res.method = opt.method;

    auto t0 = Clock::now();
    switch (opt.backend) {
        case SvdBackend::exact:
            res.svd = iterative_partial_svd(g, ky, opt.tol, opt.max_iter);
            break;
        case SvdBackend::projection: {
            ProjectionConfig cfg;
            cfg.rank = ky;
            cfg.oversample_r = opt.oversample_r;
            cfg.oversample_s = opt.oversample_s;
            cfg.power_q = opt.power_q;
            cfg.seed = rng::mix(seed, 11);
            res.svd = projection_svd(g, cfg);
            break;
        }
        case SvdBackend::sampling: {
            SamplingConfig cfg;
            cfg.rank = ky;
            cfg.p = opt.sample_p;
            cfg.seed = rng::mix(seed, 22);
            cfg.tol = opt.tol;
            cfg.max_iter = opt.max_iter;
            res.svd = sampling_svd(g, cfg);
            break;
        }
    }
    res.diagnostics.svd_ms = elapsed_ms(t0);
    res.diagnostics.svd_converged = res.svd.converged;

    auto run_side = [&](const DenseMatrix& emb, int k, std::uint64_t s) {
        return opt.method == ClusterMethod::kmeans
                   ? lloyd_kmeans(emb, k, s, opt.cluster_max_iter, opt.cluster_restarts)
                   : spherical_kmedian(emb, k, s, opt.cluster_max_iter, opt.cluster_restarts);
    };

    t0 = Clock::now();
    ClusterAssignment rows = run_side(res.svd.u, ky, rng::mix(seed, 33));
    res.diagnostics.row_cluster_ms = elapsed_ms(t0);
    t0 = Clock::now();
    ClusterAssignment cols = run_side(res.svd.v, kz, rng::mix(seed, 44));
    res.diagnostics.col_cluster_ms = elapsed_ms(t0);

    res.diagnostics.zero_rows_u = rows.zero_rows;
    res.diagnostics.zero_rows_v = cols.zero_rows;
    res.diagnostics.row_objective = rows.objective;
    res.diagnostics.col_objective = cols.objective;
    res.diagnostics.row_converged = rows.converged;
    res.diagnostics.col_converged = cols.converged;
    res.row_labels = std::move(rows.labels);
    res.col_labels = std::move(cols.labels);
    return res;
}

}  // namespace randclust
