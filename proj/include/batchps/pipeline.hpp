#pragma once

#include <string>
#include <vector>

#include "batchps/inversion.hpp"
#include "batchps/oracles.hpp"

namespace batchps {

struct Scenario {
    ModelParams params;
    std::uint64_t seed = 1;

    static Scenario from_file(const std::string& path);
    std::string canonical_json() const;
    std::string hash() const;  // content address for artifact names
};

struct XGrid {
    double start = 0.05, stop = 10.0, step = 0.05;
    std::vector<double> points() const;
    static XGrid parse(const std::string& spec);  // "a:b:step"
};

struct PipelineOutputs {
    std::vector<std::string> files;  // paths written, in write order
};

// model -> spectral -> kernels -> boundary -> transform -> inversion for the
// s-nodes the inversion demands on the x grid; artifacts are CSV/JSON with
// content-addressed names. Deterministic for a fixed scenario and seed.
PipelineOutputs run_pipeline(const Scenario& sc, const std::string& out_dir,
                             const XGrid& grid, int cond_n = 4, int cond_b = 4,
                             unsigned threads = 1);

// ---- acceptance criteria --------------------------------------------------

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double observed = 0.0;  // worst value judged
    double tol = 0.0;
    std::string detail;
    double seconds = 0.0;
};

// The fixed acceptance suite (spectral identities, hypergeometric agreement,
// analyticity residuals, PDE residuals, oracle triangle, analytic-vs-oracle,
// classical limit, simulation concordance, inversion self-test, determinism).
std::vector<CriterionResult> run_acceptance(unsigned threads,
                                            const std::string& scratch_dir);

struct ComparisonReport {
    Scenario scenario;
    std::vector<CriterionResult> criteria;
    // stage diagnostics at the given scenario
    double spectral_worst = 0.0;
    std::vector<double> cnc0_orders;
    double pde_first_order = 0.0, pde_transported = 0.0;
    double grid_vs_ctmc = 0.0;
    bool pass = false;
    std::string to_json() const;
};

ComparisonReport compare(const Scenario& sc, const std::string& scratch_dir,
                         unsigned threads = 1);

}  // namespace batchps
