#pragma once

#include <cstdint>
#include <vector>

#include "batchps/model.hpp"

namespace batchps {

// Truncated integration of the conditional-survival differential system
//   dE_{n,b}/dx = rho sum_m q_m E_{n+m,b} - (1+rho) E_{n,b}
//                 + n/(n+b) E_{n-1,b} + b/(n+b) E_{n,b-1},
// E_{n,b}(0) = 1, E zero for n < 0 or b < 1. Two closures bracket the
// truncation: tail occupancy rows pinned to 0 (lower) and to 1 (upper) --
// survival is nondecreasing in n, so these bound the untruncated solution.
struct OdeSolution {
    std::vector<double> x;
    int n_trunc = 0, b_trunc = 0;
    // [xi][n][b-1]
    std::vector<std::vector<std::vector<double>>> lower, upper;

    double width(int xi, int n, int b) const {
        return upper[xi][n][b - 1] - lower[xi][n][b - 1];
    }
    double mid(int xi, int n, int b) const {
        return 0.5 * (upper[xi][n][b - 1] + lower[xi][n][b - 1]);
    }
};

OdeSolution ode_oracle(double rho, const BatchDistribution& dist,
                       const std::vector<double>& x_grid, int n_trunc,
                       int b_trunc, double rel_tol = 1e-9,
                       double bracket_tol = 1e-3);

struct Bracket {
    double lower = 0.0, upper = 1.0;
    double mid() const { return 0.5 * (lower + upper); }
    double width() const { return upper - lower; }
};

// P(Omega_{n,b} > x) by uniformization at rate 1+rho of the absorbing jump
// chain; Poisson sum truncated at a 1e-12 tail, occupancy truncated at n_ctmc
// with the same bracketing closures as the differential route.
Bracket ctmc_oracle(double rho, const BatchDistribution& dist, int n, int b,
                    double x, int n_ctmc = 400);

struct SimulationOptions {
    std::size_t n_batches = 1000000;
    int replications = 20;
    double warmup_frac = 0.1;
    std::vector<double> x_grid;  // unconditional survival estimates
    int cond_n_cap = 8;          // conditional sample collection range
    int cond_b_cap = 6;
    unsigned threads = 1;
};

struct ConditionalCell {
    std::size_t count = 0;
    double mean = 0.0, mean_se = 0.0;
    std::vector<double> survival, survival_se;  // at x_grid
};

struct SimulationResult {
    std::uint64_t seed = 0;
    int replications = 0;
    std::size_t batches = 0;
    double mean_sojourn = 0.0, mean_se = 0.0;
    std::vector<double> x;
    std::vector<double> survival, survival_se;
    std::vector<double> occupancy, occupancy_se;  // queue length at arrivals
    // [n][b-1] for n <= cond_n_cap, b <= cond_b_cap
    std::vector<std::vector<ConditionalCell>> conditional;
};

// Event-driven processor-sharing simulation: k jobs share the unit-rate
// server, every job's requirement is exp(1), batches arrive Poisson(rho).
// Deterministic for a given seed; replications use independent streams so
// results do not depend on scheduling order.
SimulationResult simulate(double rho, const BatchDistribution& dist,
                          std::uint64_t seed, const SimulationOptions& opt);

struct TransientResult {
    double mean = 0.0, se = 0.0;
    std::size_t count = 0;
    std::vector<double> x, survival, survival_se;
};

// Tagged-batch run: n0 jobs already present, a batch of b0 arrives at time 0,
// background arrivals continue at rate rho (rho = 0 gives an isolated batch).
TransientResult simulate_transient(double rho, const BatchDistribution& dist,
                                   int n0, int b0, std::size_t trials,
                                   std::uint64_t seed,
                                   const std::vector<double>& x_grid = {},
                                   unsigned threads = 1);

}  // namespace batchps
