#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "randclust/models.hpp"
#include "randclust/spec_io.hpp"

namespace randclust {

struct SimulationRecord {
    int scenario = 0;
    NodeId n = 0;
    int rep = 0;
    std::string method;  // original | projection | sampling
    double row_mis = 0.0;
    double col_mis = 0.0;
    std::optional<double> approx_err;  // absent above the dense guard
    double wall_ms = 0.0;
    std::uint64_t seed = 0;  // per-replicate seed, reproducible individually
};

struct SimulationOptions {
    int scenario = 1;
    std::vector<NodeId> n_list;
    int reps = 1;
    std::uint64_t seed = 0;
    int threads = 1;                 // replicates may run concurrently
    bool compute_approx_err = true;  // population-error column on/off
    std::optional<ModelSpec> override_spec;  // replaces the scenario model
};

/// Scenario models at size n. 1: balanced three-block ScBM with 0.2 on the
/// connectivity diagonal and 0.1 elsewhere. 2: ScBM with ky = 2 < kz = 3 and
/// connectivity entries drawn Uniform(0.01, 0.3) from spec_seed. 3: the
/// degree-corrected model with connectivity rows (0.2, 0.1, 0.1) and
/// (0.1, 0.2, 0.3) and propensities 1 w.p. 0.2, 0.2 w.p. 0.8.
ModelSpec scenario_model(int scenario, NodeId n, std::uint64_t spec_seed);

/// Runs every (n, rep) replicate with the original, projection (r = s = 10,
/// q = 2), and sampling (p = 0.7) backends; scenario 3 clusters with
/// spherical k-median, scenarios 1-2 with k-means. Records are returned in
/// (n, rep, method) order; when csv is given, the header is written up front
/// and rows are flushed as each size finishes. Output is independent of the
/// thread count.
std::vector<SimulationRecord> run_simulation(const SimulationOptions& opt,
                                             std::ostream* csv = nullptr);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const SimulationRecord& rec);

}  // namespace randclust
