#include "randclust/simulate.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>
#include <utility>

#include "randclust/cluster.hpp"
#include "randclust/errors.hpp"
#include "randclust/metrics.hpp"
#include "randclust/randsvd.hpp"
#include "randclust/rng.hpp"

namespace randclust {

namespace {

constexpr NodeId kDenseGuard = 20000;
constexpr int kOversample = 10;
constexpr int kPowerQ = 2;
constexpr double kSampleRate = 0.7;
constexpr double kSvdTol = 1e-8;
constexpr int kSvdMaxIter = 1000;

using Clock = std::chrono::steady_clock;

std::vector<NodeId> balanced_sizes(NodeId n, int k) {
    std::vector<NodeId> sizes(k, n / static_cast<NodeId>(k));
    for (NodeId r = 0; r < n % static_cast<NodeId>(k); ++r) sizes[r]++;
    return sizes;
}

// Two-point propensities (1 w.p. 0.2, 0.2 w.p. 0.8), redrawn until every
// cluster contains a propensity-1 node so the spec stays identifiable.
Vector two_point_propensities(NodeId n, const std::vector<NodeId>& sizes,
                              std::uint64_t seed) {
    for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
        rng::Stream stream(rng::mix(seed, attempt));
        Vector theta(n);
        for (NodeId i = 0; i < n; ++i)
            theta(i) = stream.next_uniform() < 0.2 ? 1.0 : 0.2;
        bool ok = true;
        NodeId start = 0;
        for (NodeId sz : sizes) {
            if (theta.segment(start, sz).maxCoeff() < 1.0) ok = false;
            start += sz;
        }
        if (ok) return theta;
    }
    throw NumericalError("failed to draw identifiable propensities");
}

std::uint64_t replicate_seed(std::uint64_t master, int scenario, NodeId n, int rep) {
    return rng::mix(rng::mix(rng::mix(master, scenario), n), rep);
}

ClusterMethod scenario_method(int scenario) {
    return scenario == 3 ? ClusterMethod::spherical_kmedian : ClusterMethod::kmeans;
}

std::array<SimulationRecord, 3> run_replicate(int scenario, const ModelSpec& model, int rep,
                                              std::uint64_t rep_seed, bool want_err) {
    const ScbmSpec& base = base_spec(model);
    const NodeId n = base.n;
    const int ky = base.ky;
    const int kz = base.kz;
    const ClusterMethod method = scenario_method(scenario);

    SparseDirectedGraph graph;
    MembershipPair truth;
    if (const auto* dc = std::get_if<DcScbmSpec>(&model))
        std::tie(graph, truth) = generate_dc_scbm(*dc, rep_seed);
    else
        std::tie(graph, truth) = generate_scbm(std::get<ScbmSpec>(model), rep_seed);

    std::optional<DenseMatrix> pop;
    if (want_err && n <= kDenseGuard) {
        if (const auto* dc = std::get_if<DcScbmSpec>(&model))
            pop = population_matrix(*dc);
        else
            pop = population_matrix(std::get<ScbmSpec>(model));
    }

    auto cluster_side = [&](const DenseMatrix& emb, int k, std::uint64_t s) {
        return method == ClusterMethod::kmeans ? lloyd_kmeans(emb, k, s)
                                               : spherical_kmedian(emb, k, s);
    };

    static constexpr const char* kMethods[3] = {"original", "projection", "sampling"};
    std::array<SimulationRecord, 3> out;
    for (int m = 0; m < 3; ++m) {
        auto t0 = Clock::now();
        SvdFactor factor;
        SparseDirectedGraph sampled;
        if (m == 0) {
            factor = iterative_partial_svd(graph, ky, kSvdTol, kSvdMaxIter);
        } else if (m == 1) {
            ProjectionConfig cfg;
            cfg.rank = ky;
            cfg.oversample_r = kOversample;
            cfg.oversample_s = kOversample;
            cfg.power_q = kPowerQ;
            cfg.seed = rng::mix(rep_seed, 11);
            factor = projection_svd(graph, cfg);
        } else {
            sampled = sparsify(graph, kSampleRate, rng::mix(rep_seed, 22));
            factor = iterative_partial_svd(sampled, ky, kSvdTol, kSvdMaxIter);
        }
        ClusterAssignment rows = cluster_side(factor.u, ky, rng::mix(rep_seed, 33));
        ClusterAssignment cols = cluster_side(factor.v, kz, rng::mix(rep_seed, 44));
        double wall = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

        SimulationRecord rec;
        rec.scenario = scenario;
        rec.n = n;
        rec.rep = rep;
        rec.method = kMethods[m];
        rec.row_mis = misclustering_rate(rows.labels, truth.y, ky);
        rec.col_mis = misclustering_rate(cols.labels, truth.z, kz);
        if (pop) {
            if (m == 0)
                rec.approx_err = approximation_error(graph, *pop);
            else if (m == 1)
                rec.approx_err = approximation_error(factor, *pop);
            else
                rec.approx_err = approximation_error(sampled, *pop);
        }
        rec.wall_ms = wall;
        rec.seed = rep_seed;
        out[m] = std::move(rec);
    }
    return out;
}

std::string fmt_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

ModelSpec scenario_model(int scenario, NodeId n, std::uint64_t spec_seed) {
    if (n < 6) throw ValidationError("scenario models need n >= 6");
    switch (scenario) {
        case 1: {
            ScbmSpec spec;
            spec.n = n;
            spec.ky = spec.kz = 3;
            spec.b = DenseMatrix::Constant(3, 3, 0.1);
            spec.b.diagonal().setConstant(0.2);
            spec.row_sizes = balanced_sizes(n, 3);
            spec.col_sizes = spec.row_sizes;
            spec.validate();
            return spec;
        }
        case 2: {
            for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
                rng::Stream stream(rng::mix(spec_seed, attempt));
                ScbmSpec spec;
                spec.n = n;
                spec.ky = 2;
                spec.kz = 3;
                spec.b.resize(2, 3);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 3; ++j)
                        spec.b(i, j) = 0.01 + 0.29 * stream.next_uniform();
                spec.row_sizes = balanced_sizes(n, 2);
                spec.col_sizes = balanced_sizes(n, 3);
                spec.validate();
                try {
                    require_full_rank_connectivity(spec);
                } catch (const ValidationError&) {
                    continue;  // rank-deficient draw, take a fresh one
                }
                return spec;
            }
            throw NumericalError("failed to draw a full-rank connectivity matrix");
        }
        case 3: {
            DcScbmSpec spec;
            spec.base.n = n;
            spec.base.ky = 2;
            spec.base.kz = 3;
            spec.base.b.resize(2, 3);
            spec.base.b << 0.2, 0.1, 0.1, 0.1, 0.2, 0.3;
            spec.base.row_sizes = balanced_sizes(n, 2);
            spec.base.col_sizes = balanced_sizes(n, 3);
            spec.theta_y =
                two_point_propensities(n, spec.base.row_sizes, rng::mix(spec_seed, 1));
            spec.theta_z =
                two_point_propensities(n, spec.base.col_sizes, rng::mix(spec_seed, 2));
            spec.validate();
            return spec;
        }
        default:
            throw ValidationError("scenario must be 1, 2, or 3");
    }
}

void write_csv_header(std::ostream& out) {
    out << "scenario,n,rep,method,row_mis,col_mis,approx_err,wall_ms,seed\n";
}

void write_csv_row(std::ostream& out, const SimulationRecord& rec) {
    out << rec.scenario << ',' << rec.n << ',' << rec.rep << ',' << rec.method << ','
        << fmt_real(rec.row_mis) << ',' << fmt_real(rec.col_mis) << ',';
    if (rec.approx_err) out << fmt_real(*rec.approx_err);
    out << ',' << fmt_real(rec.wall_ms) << ',' << rec.seed << '\n';
}

std::vector<SimulationRecord> run_simulation(const SimulationOptions& opt, std::ostream* csv) {
    if (opt.scenario < 1 || opt.scenario > 3)
        throw ValidationError("scenario must be 1, 2, or 3");
    if (opt.reps < 1) throw ValidationError("reps must be at least 1");
    std::vector<NodeId> n_list = opt.n_list;
    if (opt.override_spec) n_list = {base_spec(*opt.override_spec).n};
    if (n_list.empty()) throw ValidationError("n list must not be empty");

    if (csv) {
        write_csv_header(*csv);
        csv->flush();
    }

    const int threads = std::max(1, opt.threads);
    std::vector<SimulationRecord> all;
    for (NodeId n : n_list) {
        std::vector<std::array<SimulationRecord, 3>> results(opt.reps);
        auto worker = [&](int t) {
            for (int rep = t; rep < opt.reps; rep += threads) {
                ModelSpec model =
                    opt.override_spec
                        ? *opt.override_spec
                        : scenario_model(opt.scenario, n,
                                         rng::mix(rng::mix(opt.seed, opt.scenario), rep));
                results[rep] = run_replicate(opt.scenario, model, rep,
                                             replicate_seed(opt.seed, opt.scenario, n, rep),
                                             opt.compute_approx_err);
            }
        };
        if (threads == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(threads);
            for (int t = 1; t < threads; ++t)
                pool.emplace_back([&, t] {
                    try {
                        worker(t);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            try {
                worker(0);
            } catch (...) {
                errors[0] = std::current_exception();
            }
            for (auto& th : pool) th.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }
        for (auto& group : results)
            for (auto& rec : group) {
                if (csv) write_csv_row(*csv, rec);
                all.push_back(std::move(rec));
            }
        if (csv) csv->flush();
    }
    return all;
}

}  // namespace randclust
