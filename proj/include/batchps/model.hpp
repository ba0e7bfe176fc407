#pragma once

#include <vector>

#include "batchps/common.hpp"

namespace batchps {

// Scenario parameters. Service rate is normalized to 1 throughout: all times
// are in units of the mean service time.
struct ModelParams {
    double rho = 0.5;   // batch arrival rate
    double q = 0.2;     // geometric batch parameter, q in [0,1)
    int n_max = 200;    // occupancy truncation
    int b_max = 20;     // batch-size truncation
    double tol = 1e-8;  // global relative tolerance

    // offered load rho * E[B] = rho / (1-q)
    double load() const { return rho / (1.0 - q); }
};

// Throws InvalidInput unless all parameter invariants hold, including the
// stability condition rho < 1 - q.
void validate(const ModelParams& params);

// Batch-size law: geometric(q) or an explicit finite pmf q_1..q_m.
struct BatchDistribution {
    enum class Kind { Geometric, Explicit };
    Kind kind = Kind::Geometric;
    double q = 0.0;                // geometric parameter
    std::vector<double> pmf;       // explicit pmf, pmf[0] = P(B=1)

    static BatchDistribution geometric(double q);
    static BatchDistribution explicit_pmf(std::vector<double> probs,
                                          double tol = 1e-12);

    double mean() const;
    // P(B > j), j >= 0
    double tail(int j) const;
};

// P(B = b), b >= 1. Geometric kind: (1-q) q^{b-1}.
double batch_pmf(const BatchDistribution& dist, int b);

struct StationaryOccupancy {
    std::vector<double> pi;  // pi[0..n_max]
    double deficit = 0.0;    // 1 - sum(pi), bounded mass above the truncation
};

// Stationary queue-length distribution seen by an arriving batch (Poisson
// arrivals see time averages). Solved from the level-crossing form of the
// truncated global-balance equations, so it works for any batch law; the
// geometric closed form is only used by tests.
StationaryOccupancy stationary_occupancy(const ModelParams& params,
                                         double tol_mass = 1e-10);
StationaryOccupancy stationary_occupancy(double rho,
                                         const BatchDistribution& dist,
                                         int n_max, double tol_mass = 1e-10);

}  // namespace batchps
