// Command-line front end: generate synthetic co-block networks, co-cluster
// edge lists, run the simulation scenarios, and benchmark the SVD backends.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "randclust/cluster.hpp"
#include "randclust/errors.hpp"
#include "randclust/graph.hpp"
#include "randclust/metrics.hpp"
#include "randclust/models.hpp"
#include "randclust/randsvd.hpp"
#include "randclust/rng.hpp"
#include "randclust/simulate.hpp"
#include "randclust/spec_io.hpp"

namespace {

using namespace randclust;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file " + path);
    return out;
}

SparseDirectedGraph read_edges(const std::string& path, bool one_based) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open edge file " + path);
    return from_edge_list(in, std::nullopt, one_based);
}

int cmd_generate(const std::string& spec_path, std::uint64_t seed, const std::string& out_edges,
                 const std::string& out_labels) {
    ModelSpec spec = read_model_spec_file(spec_path);
    SparseDirectedGraph graph;
    MembershipPair mem;
    if (const auto* dc = std::get_if<DcScbmSpec>(&spec))
        std::tie(graph, mem) = generate_dc_scbm(*dc, seed);
    else
        std::tie(graph, mem) = generate_scbm(std::get<ScbmSpec>(spec), seed);

    auto edges = open_output(out_edges);
    to_edge_list(graph, edges);
    auto labels = open_output(out_labels);
    for (NodeId i = 0; i < graph.n; ++i)
        labels << i << '\t' << mem.y[i] << '\t' << mem.z[i] << '\n';
    return 0;
}

int cmd_cocluster(const std::string& edges_path, int ky, int kz, const CoClusterOptions& opt,
                  std::uint64_t seed, const std::string& out_path, bool one_based) {
    SparseDirectedGraph graph = read_edges(edges_path, one_based);
    CoClusterResult res = co_cluster(graph, ky, kz, opt, seed);

    // Timings are deliberately not serialized: output bytes are a pure
    // function of (inputs, seed).
    ordered_json doc;
    doc["row_labels"] = res.row_labels;
    doc["col_labels"] = res.col_labels;
    doc["backend"] = to_string(res.backend);
    ordered_json diag;
    diag["method"] = to_string(res.method);
    diag["n"] = graph.n;
    diag["ky"] = ky;
    diag["kz"] = kz;
    diag["svd_converged"] = res.diagnostics.svd_converged;
    diag["row_objective"] = res.diagnostics.row_objective;
    diag["col_objective"] = res.diagnostics.col_objective;
    diag["zero_rows_u"] = res.diagnostics.zero_rows_u;
    diag["zero_rows_v"] = res.diagnostics.zero_rows_v;
    std::vector<double> sigma(res.svd.sigma.data(), res.svd.sigma.data() + res.svd.sigma.size());
    diag["sigma"] = sigma;
    doc["diagnostics"] = diag;

    auto out = open_output(out_path);
    out << doc.dump(2) << '\n';
    return 0;
}

int cmd_simulate(const SimulationOptions& opt, const std::string& out_path) {
    auto out = open_output(out_path);
    run_simulation(opt, &out);
    return 0;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

int cmd_bench(const std::string& edges_path, int rank, const std::vector<std::string>& backends,
              int reps, const CoClusterOptions& opt, std::uint64_t seed,
              const std::string& out_path, bool one_based) {
    SparseDirectedGraph graph = read_edges(edges_path, one_based);
    auto out = open_output(out_path);
    out << "backend,median_ms,nnz,n,rank\n";

    auto emit = [&](const std::string& name, const std::vector<double>& times) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", median(times));
        out << name << ',' << buf << ',' << graph.nnz() << ',' << graph.n << ',' << rank << '\n';
    };

    for (const std::string& name : backends) {
        auto backend = backend_from_string(name);
        if (!backend) throw ValidationError("unknown backend " + name);
        std::vector<double> total_ms, svd_ms;
        for (int rep = 0; rep < reps; ++rep) {
            auto t0 = Clock::now();
            if (*backend == SvdBackend::exact) {
                iterative_partial_svd(graph, rank, opt.tol, opt.max_iter);
            } else if (*backend == SvdBackend::projection) {
                ProjectionConfig cfg;
                cfg.rank = rank;
                cfg.oversample_r = opt.oversample_r;
                cfg.oversample_s = opt.oversample_s;
                cfg.power_q = opt.power_q;
                cfg.seed = rng::mix(seed, rep);
                projection_svd(graph, cfg);
            } else {
                SparseDirectedGraph sampled = sparsify(graph, opt.sample_p, rng::mix(seed, rep));
                auto t1 = Clock::now();
                iterative_partial_svd(sampled, rank, opt.tol, opt.max_iter);
                svd_ms.push_back(
                    std::chrono::duration<double, std::milli>(Clock::now() - t1).count());
            }
            total_ms.push_back(
                std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
        }
        if (*backend == SvdBackend::sampling) {
            emit("sampling:total", total_ms);
            emit("sampling:svd", svd_ms);
        } else {
            emit(name, total_ms);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized spectral co-clustering for directed networks"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "Worker threads; results do not depend on this");

    // generate
    auto* gen = app.add_subcommand("generate", "Sample a network from a JSON model spec");
    std::string gen_spec, gen_edges, gen_labels;
    std::uint64_t gen_seed = 0;
    gen->add_option("--spec", gen_spec, "Model spec JSON file")->required();
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out-edges", gen_edges, "Output edge list")->required();
    gen->add_option("--out-labels", gen_labels, "Output labels file (node, y, z)")->required();

    // cocluster
    auto* coc = app.add_subcommand("cocluster", "Co-cluster an edge list");
    std::string coc_edges, coc_backend = "exact", coc_method = "kmeans", coc_out;
    int coc_ky = 0, coc_kz = 0;
    std::uint64_t coc_seed = 0;
    bool coc_one_based = false;
    CoClusterOptions coc_opt;
    coc->add_option("--edges", coc_edges, "Edge list file")->required();
    coc->add_option("--ky", coc_ky, "Row cluster count")->required();
    coc->add_option("--kz", coc_kz, "Column cluster count")->required();
    coc->add_option("--backend", coc_backend, "exact | projection | sampling");
    coc->add_option("--method", coc_method, "kmeans | spherical_kmedian");
    coc->add_option("--seed", coc_seed, "RNG seed");
    coc->add_option("--out", coc_out, "Output JSON file")->required();
    coc->add_option("--oversample-r", coc_opt.oversample_r, "Projection oversampling (right)");
    coc->add_option("--oversample-s", coc_opt.oversample_s, "Projection oversampling (left)");
    coc->add_option("--power-q", coc_opt.power_q, "Projection power iterations");
    coc->add_option("--sample-p", coc_opt.sample_p, "Sampling keep-rate in (0,1]");
    coc->add_option("--tol", coc_opt.tol, "Iterative SVD tolerance");
    coc->add_flag("--one-based", coc_one_based, "Edge list ids start at 1");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run a simulation scenario");
    SimulationOptions sim_opt;
    std::string sim_out, sim_override;
    sim->add_option("--scenario", sim_opt.scenario, "1, 2, or 3")->required();
    sim->add_option("--n", sim_opt.n_list, "Comma-separated sizes")->delimiter(',');
    sim->add_option("--reps", sim_opt.reps, "Replicates per size");
    sim->add_option("--seed", sim_opt.seed, "Master seed");
    sim->add_option("--out", sim_out, "Output CSV file")->required();
    sim->add_option("--override-spec", sim_override,
                    "Model spec JSON replacing the scenario model (its n is used)");

    // bench
    auto* ben = app.add_subcommand("bench", "Time the SVD backends on an edge list");
    std::string ben_edges, ben_out;
    std::vector<std::string> ben_backends = {"exact", "projection", "sampling"};
    int ben_rank = 0, ben_reps = 3;
    std::uint64_t ben_seed = 0;
    bool ben_one_based = false;
    CoClusterOptions ben_opt;
    ben->add_option("--edges", ben_edges, "Edge list file")->required();
    ben->add_option("--rank", ben_rank, "Target rank")->required();
    ben->add_option("--backends", ben_backends, "Comma-separated backend list")->delimiter(',');
    ben->add_option("--reps", ben_reps, "Timing repetitions");
    ben->add_option("--seed", ben_seed, "RNG seed");
    ben->add_option("--out", ben_out, "Output CSV file")->required();
    ben->add_option("--oversample-r", ben_opt.oversample_r, "Projection oversampling (right)");
    ben->add_option("--oversample-s", ben_opt.oversample_s, "Projection oversampling (left)");
    ben->add_option("--power-q", ben_opt.power_q, "Projection power iterations");
    ben->add_option("--sample-p", ben_opt.sample_p, "Sampling keep-rate in (0,1]");
    ben->add_option("--tol", ben_opt.tol, "Iterative SVD tolerance");
    ben->add_flag("--one-based", ben_one_based, "Edge list ids start at 1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_spec, gen_seed, gen_edges, gen_labels);
        if (coc->parsed()) {
            auto backend = backend_from_string(coc_backend);
            if (!backend) throw ValidationError("unknown backend " + coc_backend);
            auto method = method_from_string(coc_method);
            if (!method) throw ValidationError("unknown method " + coc_method);
            coc_opt.backend = *backend;
            coc_opt.method = *method;
            return cmd_cocluster(coc_edges, coc_ky, coc_kz, coc_opt, coc_seed, coc_out,
                                 coc_one_based);
        }
        if (sim->parsed()) {
            sim_opt.threads = threads;
            if (!sim_override.empty()) sim_opt.override_spec = read_model_spec_file(sim_override);
            return cmd_simulate(sim_opt, sim_out);
        }
        if (ben->parsed())
            return cmd_bench(ben_edges, ben_rank, ben_backends, ben_reps, ben_opt, ben_seed,
                             ben_out, ben_one_based);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
