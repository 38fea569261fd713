#include "randclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "randclust/errors.hpp"
#include "randclust/rng.hpp"

namespace randclust {

namespace {

constexpr NodeId kDenseGuard = 20000;
constexpr std::uint64_t kPowerStartSeed = 0x73706563746e726dull;

// Minimum-cost assignment on a square cost matrix (Kuhn-Munkres with
// potentials, O(k^3)). Returns the column assigned to each row.
std::vector<int> min_cost_assignment(const DenseMatrix& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j]) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace

double spectral_norm(const DenseMatrix& m, double tol, int max_iter, bool* converged) {
    if (converged) *converged = true;
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    if (!m.allFinite()) throw ValidationError("spectral_norm input must be finite");

    rng::GaussianStream start(kPowerStartSeed);
    Vector v(m.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = start.next();
    double vn = v.norm();
    if (vn == 0.0) return 0.0;
    v /= vn;

    // The estimate converges linearly at rate (sigma_2/sigma_1)^2; stop on
    // the geometric-tail error estimate delta * r / (1 - r), not the raw
    // consecutive change, which undershoots the true error when the rate is
    // close to 1.
    double sigma = 0.0;
    double prev_delta = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        Vector w = m * v;
        double next = w.norm();
        if (next == 0.0) return 0.0;
        v = m.transpose() * w;
        double nv = v.norm();
        if (nv == 0.0) return next;
        v /= nv;
        if (iter > 0) {
            double delta = std::abs(next - sigma);
            if (delta == 0.0) return next;
            if (prev_delta > 0.0 && delta < prev_delta) {
                double ratio = delta / prev_delta;
                double tail = delta * ratio / (1.0 - ratio);
                if (tail <= tol * std::max(next, 1e-300)) return next;
            }
            prev_delta = delta;
        }
        sigma = next;
    }
    if (converged) *converged = false;
    return sigma;
}

double approximation_error(const SvdFactor& factor, const DenseMatrix& p) {
    if (factor.u.rows() != p.rows() || factor.v.rows() != p.cols())
        throw ValidationError("approximation_error: dimension mismatch");
    if (p.rows() > kDenseGuard)
        throw CapacityError("approximation_error: n exceeds dense guard");
    DenseMatrix recon = factor.u * factor.sigma.asDiagonal() * factor.v.transpose();
    recon -= p;
    return spectral_norm(recon);
}

double approximation_error(const SparseDirectedGraph& g, const DenseMatrix& p) {
    if (static_cast<Eigen::Index>(g.n) != p.rows() || p.rows() != p.cols())
        throw ValidationError("approximation_error: dimension mismatch");
    DenseMatrix diff = to_dense(g);  // guard applied here
    diff -= p;
    return spectral_norm(diff);
}

double misclustering_rate(const std::vector<int>& est, const std::vector<int>& truth, int k) {
    if (est.size() != truth.size())
        throw ValidationError("misclustering_rate: label vectors differ in length");
    if (k < 1) throw ValidationError("misclustering_rate: k must be at least 1");
    const std::size_t n = est.size();
    if (n == 0) return 0.0;
    DenseMatrix confusion = DenseMatrix::Zero(k, k);
    for (std::size_t i = 0; i < n; ++i) {
        if (est[i] < 0 || est[i] >= k || truth[i] < 0 || truth[i] >= k)
            throw ValidationError("misclustering_rate: label out of range");
        confusion(est[i], truth[i]) += 1.0;
    }
    std::vector<int> match = min_cost_assignment(-confusion);
    double agree = 0.0;
    for (int a = 0; a < k; ++a) agree += confusion(a, match[a]);
    return (static_cast<double>(n) - agree) / static_cast<double>(n);
}

BoundReport theoretical_bounds(NodeId n, double p, double alpha_n,
                               const PopulationStructure& structure, int ky, int kz,
                               const std::vector<NodeId>& row_sizes,
                               const std::vector<NodeId>& col_sizes) {
    if (!(p > 0.0 && p <= 1.0)) throw ValidationError("p must lie in (0,1]");
    if (static_cast<int>(row_sizes.size()) != ky || static_cast<int>(col_sizes.size()) != kz)
        throw ValidationError("size vectors must match ky and kz");

    const double nd = static_cast<double>(n);
    const double gamma = structure.gamma_min();
    const double tau2 = structure.tau * structure.tau;
    const double delta2 = structure.delta * structure.delta;

    BoundReport r;
    r.delta_term = std::sqrt(nd * alpha_n * alpha_n / p) *
                   (1.0 + std::pow(p, 0.25) * std::max(1.0, std::sqrt(1.0 / p - 1.0)));
    r.phi = std::max({std::sqrt(nd * alpha_n / p), std::sqrt(std::log(nd)) / p, r.delta_term});
    r.sparsity_ok = alpha_n >= std::log(nd) / nd;

    r.rp_row_bound = ky * alpha_n / (tau2 * gamma * gamma);
    r.rp_col_bound = ky * alpha_n / (delta2 * gamma * gamma);
    r.rs_row_bound = ky * r.phi * r.phi / (nd * tau2 * gamma * gamma);
    r.rs_col_bound = ky * r.phi * r.phi / (nd * delta2 * gamma * gamma);

    double sy = 0.0, sz = 0.0;
    for (int k = 0; k < ky; ++k)
        sy += double(row_sizes[k]) * double(row_sizes[k]) * structure.kappa_y(k);
    for (int k = 0; k < kz; ++k)
        sz += double(col_sizes[k]) * double(col_sizes[k]) * structure.kappa_z(k);
    sy = std::sqrt(sy);
    sz = std::sqrt(sz);
    const double angle = std::sqrt(1.0 - structure.eta);

    r.dc_rp_row_bound = sy * std::sqrt(ky * alpha_n) / (gamma * std::sqrt(nd));
    r.dc_rp_col_bound = sz * std::sqrt(ky * alpha_n) / (angle * gamma * std::sqrt(nd));
    r.dc_rs_row_bound = sy * std::sqrt(double(ky)) * r.phi / (gamma * nd);
    r.dc_rs_col_bound = sz * std::sqrt(double(ky)) * r.phi / (angle * gamma * nd);
    return r;
}

}  // namespace randclust
