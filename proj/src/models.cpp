#include "randclust/models.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "randclust/errors.hpp"
#include "randclust/rng.hpp"

namespace randclust {

namespace {

constexpr NodeId kDenseGuard = 20000;
constexpr double kRankRelTol = 1e-10;

std::vector<NodeId> block_starts(const std::vector<NodeId>& sizes) {
    std::vector<NodeId> starts(sizes.size() + 1, 0);
    for (std::size_t k = 0; k < sizes.size(); ++k) starts[k + 1] = starts[k] + sizes[k];
    return starts;
}

void check_sizes(const std::vector<NodeId>& sizes, NodeId n, int k, const char* name) {
    if (static_cast<int>(sizes.size()) != k)
        throw ValidationError(std::string(name) + " must have one entry per cluster");
    NodeId total = 0;
    for (NodeId s : sizes) {
        if (s == 0) throw ValidationError(std::string(name) + " entries must be positive");
        total += s;
    }
    if (total != n) throw ValidationError(std::string(name) + " must sum to n");
}

void check_identifiable(const Vector& theta, const std::vector<NodeId>& sizes, const char* name) {
    auto starts = block_starts(sizes);
    for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
        double mx = 0.0;
        for (NodeId i = starts[k]; i < starts[k + 1]; ++i) {
            if (theta(i) <= 0.0)
                throw ValidationError(std::string(name) + " entries must be positive");
            mx = std::max(mx, theta(i));
        }
        if (std::abs(mx - 1.0) > 1e-12)
            throw ValidationError(std::string(name) + " must attain max 1 in cluster " +
                                  std::to_string(k));
    }
}

// Shared sampler; null theta pointers mean all-ones propensities, and the
// draw sequence is identical either way. Per row i: one substream seeded by
// (seed, i); column blocks visited in ascending order; candidates enumerated
// by geometric gaps at the block's max edge probability, each followed by one
// acceptance draw (thinning by theta_z, diagonal force-rejected).
std::pair<SparseDirectedGraph, MembershipPair> generate_impl(const ScbmSpec& spec,
                                                             const Vector* theta_y,
                                                             const Vector* theta_z,
                                                             std::uint64_t seed) {
    MembershipPair mem = block_memberships(spec);
    auto col_start = block_starts(spec.col_sizes);

    SparseDirectedGraph g;
    g.n = spec.n;
    g.row_offsets.assign(static_cast<std::size_t>(spec.n) + 1, 0);
    for (NodeId i = 0; i < spec.n; ++i) {
        rng::Stream stream(rng::mix(seed, i));
        double ty = theta_y ? (*theta_y)(i) : 1.0;
        int yk = mem.y[i];
        for (int c = 0; c < spec.kz; ++c) {
            double q = ty * spec.b(yk, c);
            if (q <= 0.0) continue;
            NodeId hi = col_start[c + 1];
            NodeId pos = col_start[c];
            while (pos < hi) {
                double u = stream.next_uniform();
                NodeId candidate = pos;
                if (q < 1.0) {
                    double gap = std::floor(std::log1p(-u) / std::log1p(-q));
                    if (!(gap < static_cast<double>(hi - pos))) break;
                    candidate = pos + static_cast<NodeId>(gap);
                }
                double accept = stream.next_uniform();
                double tz = theta_z ? (*theta_z)(candidate) : 1.0;
                if (candidate != i && accept < tz) {
                    g.col_indices.push_back(candidate);
                    g.values.push_back(1.0);
                }
                pos = candidate + 1;
            }
        }
        g.row_offsets[i + 1] = g.col_indices.size();
    }
    return {std::move(g), std::move(mem)};
}

DenseMatrix base_population(const ScbmSpec& spec) {
    if (spec.n > kDenseGuard)
        throw CapacityError("population_matrix: n = " + std::to_string(spec.n) +
                            " exceeds dense guard " + std::to_string(kDenseGuard));
    auto row_start = block_starts(spec.row_sizes);
    auto col_start = block_starts(spec.col_sizes);
    DenseMatrix p(spec.n, spec.n);
    for (int k = 0; k < spec.ky; ++k)
        for (int l = 0; l < spec.kz; ++l)
            p.block(row_start[k], col_start[l], spec.row_sizes[k], spec.col_sizes[l])
                .setConstant(spec.b(k, l));
    return p;
}

PopulationStructure structure_impl(const ScbmSpec& spec, const Vector& theta_y,
                                   const Vector& theta_z, const DenseMatrix& p) {
    const int ky = spec.ky;
    const int kz = spec.kz;
    Eigen::BDCSVD<DenseMatrix> svd(p, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    if (sv(ky - 1) < kRankRelTol * sv(0))
        throw NumericalError("degenerate model: numerical rank of P is below Ky");

    PopulationStructure s;
    s.u_bar = svd.matrixU().leftCols(ky);
    s.v_bar = svd.matrixV().leftCols(ky);
    s.sigma = sv.head(ky);
    s.alpha_n = p.maxCoeff();

    const double inf = std::numeric_limits<double>::infinity();
    s.tau = inf;
    for (int k = 0; k < ky; ++k)
        for (int l = k + 1; l < ky; ++l)
            s.tau = std::min(s.tau, std::sqrt(1.0 / spec.row_sizes[k] + 1.0 / spec.row_sizes[l]));

    double min_sqrt_ny = inf;
    for (NodeId sz : spec.row_sizes) min_sqrt_ny = std::min(min_sqrt_ny, std::sqrt(double(sz)));
    s.delta = inf;
    for (int k = 0; k < kz; ++k)
        for (int l = k + 1; l < kz; ++l) {
            double col_dist = (spec.b.col(k) - spec.b.col(l)).norm();
            s.delta = std::min(s.delta, col_dist * min_sqrt_ny / s.sigma_max());
        }

    auto row_start = block_starts(spec.row_sizes);
    auto col_start = block_starts(spec.col_sizes);
    Vector psi_y(ky), psi_z(kz);
    for (int k = 0; k < ky; ++k)
        psi_y(k) = theta_y.segment(row_start[k], spec.row_sizes[k]).norm();
    for (int k = 0; k < kz; ++k)
        psi_z(k) = theta_z.segment(col_start[k], spec.col_sizes[k]).norm();

    s.kappa_y.resize(ky);
    for (int k = 0; k < ky; ++k) {
        double sum = 0.0;
        for (NodeId i = row_start[k]; i < row_start[k + 1]; ++i) {
            double t = theta_y(i) / psi_y(k);
            sum += 1.0 / (t * t);
        }
        s.kappa_y(k) = sum / (double(spec.row_sizes[k]) * double(spec.row_sizes[k]));
    }

    // Population right-factor directions: row k of V_bar (up to the node's
    // propensity scale) is (Btilde_{*k})^T H Sigma^{-1}, i.e. the k-th row of
    // Btilde's right singular vectors. Writing Btilde = H D M^T gives
    // V_bar = Ztilde M.
    DenseMatrix b_tilde = psi_y.asDiagonal() * spec.b * psi_z.asDiagonal();
    Eigen::JacobiSVD<DenseMatrix> bsvd(b_tilde, Eigen::ComputeThinU | Eigen::ComputeThinV);
    DenseMatrix dirs = bsvd.matrixV();  // kz x ky

    s.kappa_z.resize(kz);
    for (int k = 0; k < kz; ++k) {
        double sum = 0.0;
        for (NodeId i = col_start[k]; i < col_start[k + 1]; ++i) {
            double t = theta_z(i) / psi_z(k);
            sum += 1.0 / (t * t);
        }
        double dir2 = dirs.row(k).squaredNorm();
        s.kappa_z(k) = sum / (double(spec.col_sizes[k]) * double(spec.col_sizes[k]) * dir2);
    }

    s.eta = 0.0;
    for (int k = 0; k < kz; ++k)
        for (int l = k + 1; l < kz; ++l) {
            double c = dirs.row(k).dot(dirs.row(l)) / (dirs.row(k).norm() * dirs.row(l).norm());
            s.eta = std::max(s.eta, c);
        }
    return s;
}

}  // namespace

void ScbmSpec::validate() const {
    if (n == 0) throw ValidationError("n must be positive");
    if (ky < 1) throw ValidationError("ky must be at least 1");
    if (ky > kz) throw ValidationError("ky must not exceed kz");
    if (b.rows() != ky || b.cols() != kz)
        throw ValidationError("b must be a ky x kz matrix");
    for (int k = 0; k < ky; ++k)
        for (int l = 0; l < kz; ++l)
            if (!(b(k, l) >= 0.0 && b(k, l) <= 1.0))
                throw ValidationError("b entries must lie in [0,1]");
    check_sizes(row_sizes, n, ky, "row_sizes");
    check_sizes(col_sizes, n, kz, "col_sizes");
}

void require_full_rank_connectivity(const ScbmSpec& spec) {
    Eigen::JacobiSVD<DenseMatrix> svd(spec.b);
    const Vector& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(spec.ky - 1) < kRankRelTol * sv(0))
        throw ValidationError("rank(b) must equal ky");
}

void DcScbmSpec::validate() const {
    base.validate();
    if (theta_y.size() != static_cast<Eigen::Index>(base.n) ||
        theta_z.size() != static_cast<Eigen::Index>(base.n))
        throw ValidationError("theta_y and theta_z must have length n");
    check_identifiable(theta_y, base.row_sizes, "theta_y");
    check_identifiable(theta_z, base.col_sizes, "theta_z");
    auto row_start = block_starts(base.row_sizes);
    auto col_start = block_starts(base.col_sizes);
    for (int k = 0; k < base.ky; ++k) {
        double ty_max = theta_y.segment(row_start[k], base.row_sizes[k]).maxCoeff();
        for (int l = 0; l < base.kz; ++l) {
            double tz_max = theta_z.segment(col_start[l], base.col_sizes[l]).maxCoeff();
            if (ty_max * tz_max * base.b(k, l) > 1.0 + 1e-12)
                throw ValidationError("edge probability above 1 in block (" + std::to_string(k) +
                                      "," + std::to_string(l) + ")");
        }
    }
}

MembershipPair block_memberships(const ScbmSpec& spec) {
    MembershipPair mem;
    mem.y.reserve(spec.n);
    mem.z.reserve(spec.n);
    for (int k = 0; k < spec.ky; ++k)
        mem.y.insert(mem.y.end(), spec.row_sizes[k], k);
    for (int k = 0; k < spec.kz; ++k)
        mem.z.insert(mem.z.end(), spec.col_sizes[k], k);
    return mem;
}

std::pair<SparseDirectedGraph, MembershipPair> generate_scbm(const ScbmSpec& spec,
                                                             std::uint64_t seed) {
    spec.validate();
    return generate_impl(spec, nullptr, nullptr, seed);
}

std::pair<SparseDirectedGraph, MembershipPair> generate_dc_scbm(const DcScbmSpec& spec,
                                                                std::uint64_t seed) {
    spec.validate();
    return generate_impl(spec.base, &spec.theta_y, &spec.theta_z, seed);
}

DenseMatrix population_matrix(const ScbmSpec& spec) {
    spec.validate();
    return base_population(spec);
}

DenseMatrix population_matrix(const DcScbmSpec& spec) {
    spec.validate();
    DenseMatrix p = base_population(spec.base);
    return spec.theta_y.asDiagonal() * p * spec.theta_z.asDiagonal();
}

PopulationStructure population_structure(const ScbmSpec& spec) {
    DenseMatrix p = population_matrix(spec);
    Vector ones = Vector::Ones(spec.n);
    return structure_impl(spec, ones, ones, p);
}

PopulationStructure population_structure(const DcScbmSpec& spec) {
    DenseMatrix p = population_matrix(spec);
    return structure_impl(spec.base, spec.theta_y, spec.theta_z, p);
}

ScbmSpec four_parameter_spec(NodeId n, int k, double alpha, double lambda) {
    if (k < 1) throw ValidationError("K must be at least 1");
    if (n == 0 || n % static_cast<NodeId>(k) != 0)
        throw ValidationError("K must divide n");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in (0,1]");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("lambda must lie in [0,1]");
    ScbmSpec spec;
    spec.n = n;
    spec.ky = spec.kz = k;
    spec.b = DenseMatrix::Constant(k, k, alpha * (1.0 - lambda));
    spec.b.diagonal().setConstant(alpha);
    spec.row_sizes.assign(k, n / static_cast<NodeId>(k));
    spec.col_sizes = spec.row_sizes;
    spec.validate();
    require_full_rank_connectivity(spec);
    return spec;
}

}  // namespace randclust
