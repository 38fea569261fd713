#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "randclust/errors.hpp"
#include "randclust/metrics.hpp"
#include "randclust/models.hpp"
#include "randclust/randsvd.hpp"
#include "randclust/rng.hpp"

using namespace randclust;

TEST_CASE("spectral norm of simple matrices") {
    CHECK(spectral_norm(DenseMatrix::Identity(5, 5)) == doctest::Approx(1.0).epsilon(1e-9));
    DenseMatrix d = DenseMatrix::Zero(3, 3);
    d.diagonal() << 4.0, -7.0, 2.0;
    CHECK(spectral_norm(d) == doctest::Approx(7.0).epsilon(1e-9));
    CHECK(spectral_norm(DenseMatrix::Zero(4, 4)) == 0.0);
}

TEST_CASE("spectral norm matches the dense SVD oracle") {
    rng::Stream s(4096);
    for (int trial = 0; trial < 5; ++trial) {
        DenseMatrix m(40, 40);
        for (int i = 0; i < 40; ++i)
            for (int j = 0; j < 40; ++j) m(i, j) = 2.0 * s.next_uniform() - 1.0;
        double oracle = oracles::dense_singular_values(m)(0);
        CHECK(spectral_norm(m) == doctest::Approx(oracle).epsilon(1e-8));
        CHECK(spectral_norm(m) ==
              doctest::Approx(spectral_norm(m.transpose())).epsilon(1e-9));
    }
}

TEST_CASE("spectral norm handles rectangular input and flags non-convergence") {
    rng::Stream s(11);
    DenseMatrix m(30, 7);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 7; ++j) m(i, j) = s.next_uniform();
    double oracle = oracles::dense_singular_values(m)(0);
    CHECK(spectral_norm(m) == doctest::Approx(oracle).epsilon(1e-8));

    bool converged = true;
    spectral_norm(m, 1e-16, 2, &converged);
    CHECK_FALSE(converged);
}

TEST_CASE("approximation error vanishes when the surrogate equals the population") {
    auto spec = four_parameter_spec(60, 3, 0.5, 0.5);
    DenseMatrix p = population_matrix(spec);
    CHECK(approximation_error(from_dense(p), p) <= 1e-12);

    SvdFactor exact;
    auto svd = oracles::dense_svd(p);
    exact.u = svd.u.leftCols(3);
    exact.sigma = svd.sigma.head(3);
    exact.v = svd.v.leftCols(3);
    CHECK(approximation_error(exact, p) <= 1e-8);
}

TEST_CASE("raw adjacency error follows the sqrt(n alpha) rate") {
    auto spec = four_parameter_spec(300, 3, 0.2, 0.5);
    DenseMatrix p = population_matrix(spec);
    double budget = 3.0 * std::sqrt(300.0 * 0.2);
    for (int rep = 0; rep < 20; ++rep) {
        auto [g, mem] = generate_scbm(spec, rng::mix(1879, rep));
        CHECK(approximation_error(g, p) <= budget);
    }
}

TEST_CASE("misclustering rate on identical and permuted labels") {
    std::vector<int> truth = {0, 1, 2, 0, 1, 2, 0, 1, 2, 0};
    CHECK(misclustering_rate(truth, truth, 3) == 0.0);
    std::vector<int> shifted(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) shifted[i] = (truth[i] + 1) % 3;
    CHECK(misclustering_rate(shifted, truth, 3) == 0.0);
}

TEST_CASE("one flipped node out of ten costs exactly 0.1") {
    std::vector<int> truth = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    std::vector<int> est = truth;
    est[0] = 1;
    CHECK(misclustering_rate(est, truth, 2) == 0.1);
}

TEST_CASE("constant labels against a balanced truth cost (k-1)/k") {
    for (int k = 2; k <= 5; ++k) {
        int n = 20 * k;
        std::vector<int> truth(n), est(n, 0);
        for (int i = 0; i < n; ++i) truth[i] = i / 20;
        CHECK(misclustering_rate(est, truth, k) == double(k - 1) / double(k));
    }
}

TEST_CASE("assignment-based rate equals the factorial brute force") {
    rng::Stream s(1457);
    for (int trial = 0; trial < 300; ++trial) {
        int k = 1 + int(s.next_below(5));
        int n = k + int(s.next_below(60));
        std::vector<int> est(n), truth(n);
        for (int i = 0; i < n; ++i) {
            est[i] = int(s.next_below(k));
            truth[i] = int(s.next_below(k));
        }
        double fast = misclustering_rate(est, truth, k);
        double slow = oracles::brute_force_misclustering(est, truth, k);
        CHECK(fast == slow);
        CHECK(fast == misclustering_rate(truth, est, k));  // symmetry
        CHECK(fast >= 0.0);
        CHECK(fast <= 1.0);
    }
}

TEST_CASE("misclustering rate validates its inputs") {
    std::vector<int> a = {0, 1}, b = {0, 1, 1};
    CHECK_THROWS_AS(misclustering_rate(a, b, 2), ValidationError);
    std::vector<int> c = {0, 2};
    CHECK_THROWS_AS(misclustering_rate(c, a, 2), ValidationError);
}

TEST_CASE("sampling concentration terms simplify at p=1") {
    auto spec = four_parameter_spec(300, 3, 0.2, 0.5);
    auto st = population_structure(spec);
    auto r = theoretical_bounds(300, 1.0, 0.2, st, 3, 3, spec.row_sizes, spec.col_sizes);
    double n = 300.0, alpha = 0.2;
    CHECK(r.delta_term == doctest::Approx(2.0 * alpha * std::sqrt(n)).epsilon(1e-12));
    double phi_expected =
        std::max({std::sqrt(n * alpha), std::sqrt(std::log(n)), 2.0 * alpha * std::sqrt(n)});
    CHECK(r.phi == doctest::Approx(phi_expected).epsilon(1e-12));
    CHECK(r.phi >= std::sqrt(n * alpha / 1.0));
    CHECK(r.sparsity_ok);
}

TEST_CASE("projection row bound reduces to K^2/(2 n alpha lambda^2) on balanced models") {
    auto spec = four_parameter_spec(1000, 2, 0.1, 0.5);
    auto st = population_structure(spec);
    auto r = theoretical_bounds(1000, 0.7, 0.1, st, 2, 2, spec.row_sizes, spec.col_sizes);
    // tau^2 = 2K/n and gamma = n alpha lambda / K substitute to K^2/(2 n alpha lambda^2).
    double expected = 4.0 / (2.0 * 1000.0 * 0.1 * 0.25);
    CHECK(r.rp_row_bound == doctest::Approx(expected).epsilon(1e-9));
    CHECK(r.rp_col_bound > 0.0);
    CHECK(r.rs_row_bound > 0.0);
    CHECK(r.dc_rp_row_bound > 0.0);
    CHECK(r.dc_rs_col_bound > 0.0);
}

TEST_CASE("the sparsity condition flags alpha below log(n)/n") {
    auto spec = four_parameter_spec(1000, 2, 0.1, 0.5);
    auto st = population_structure(spec);
    auto ok = theoretical_bounds(1000, 1.0, 0.1, st, 2, 2, spec.row_sizes, spec.col_sizes);
    CHECK(ok.sparsity_ok);
    auto thin = theoretical_bounds(1000, 1.0, 0.001, st, 2, 2, spec.row_sizes, spec.col_sizes);
    CHECK_FALSE(thin.sparsity_ok);
}
