#include <doctest.h>

#include <cmath>

#include "batchps/model.hpp"
#include "batchps/oracles.hpp"

using namespace batchps;

TEST_SUITE("oracles") {

TEST_CASE("differential system starts at 1 and leaves with slope -1 at (0,1)") {
    for (auto dist : {BatchDistribution::geometric(0.2),
                      BatchDistribution::explicit_pmf({0.5, 0.5})}) {
        auto sol = ode_oracle(0.5, dist, {1e-7, 1e-3, 0.5}, 120, 2, 1e-10);
        for (int n = 0; n <= 5; ++n)
            for (int b = 1; b <= 2; ++b) {
                CHECK(sol.lower[0][n][b - 1] == doctest::Approx(1.0).epsilon(1e-6));
                CHECK(sol.upper[0][n][b - 1] == doctest::Approx(1.0).epsilon(1e-6));
            }
        double slope = (sol.mid(1, 0, 1) - 1.0) / 1e-3;
        CHECK(slope == doctest::Approx(-1.0).epsilon(2e-3));
    }
}

TEST_CASE("bracket is ordered, tight at moderate horizons, and monotone in n") {
    auto dist = BatchDistribution::geometric(0.2);
    auto sol = ode_oracle(0.5, dist, {1.0, 5.0}, 400, 3, 1e-10);
    for (std::size_t xi = 0; xi < 2; ++xi)
        for (int n = 0; n <= 400; ++n)
            for (int b = 1; b <= 3; ++b) {
                double lo = sol.lower[xi][n][b - 1], hi = sol.upper[xi][n][b - 1];
                CHECK(lo <= hi + 1e-12);
                CHECK(lo >= -1e-12);
                CHECK(hi <= 1.0 + 1e-12);
            }
    for (int n = 0; n <= 20; ++n)
        for (int b = 1; b <= 3; ++b) CHECK(sol.width(1, n, b) <= 1e-6);
    for (int n = 1; n <= 30; ++n)
        CHECK(sol.mid(0, n, 2) >= sol.mid(0, n - 1, 2) - 1e-9);
}

TEST_CASE("under-truncation is reported") {
    auto dist = BatchDistribution::geometric(0.5);
    CHECK_THROWS_AS(ode_oracle(0.45, dist, {30.0}, 8, 2, 1e-8, 1e-6),
                    ComputeError);
}

TEST_CASE("jump-chain and differential routes agree") {
    auto dist = BatchDistribution::geometric(0.2);
    const std::vector<double> xs = {0.5, 1.0, 2.0};
    auto sol = ode_oracle(0.5, dist, xs, 400, 4, 1e-10);
    for (std::size_t xi = 0; xi < xs.size(); ++xi)
        for (int n = 0; n <= 4; ++n)
            for (int b = 1; b <= 4; ++b) {
                auto br = ctmc_oracle(0.5, dist, n, b, xs[xi], 400);
                CHECK(br.width() <= 1e-7);
                CHECK(std::abs(br.mid() - sol.mid(int(xi), n, b)) <= 1e-6);
            }
}

TEST_CASE("jump-chain oracle at x = 0 and for an explicit batch law") {
    auto dist = BatchDistribution::explicit_pmf({0.6, 0.4});
    auto br0 = ctmc_oracle(0.4, dist, 2, 2, 0.0);
    CHECK(br0.lower == 1.0);
    CHECK(br0.upper == 1.0);
    auto sol = ode_oracle(0.4, dist, {1.5}, 300, 2, 1e-10);
    auto br = ctmc_oracle(0.4, dist, 1, 2, 1.5, 300);
    CHECK(std::abs(br.mid() - sol.mid(0, 1, 2)) <= 1e-6);
}

TEST_CASE("isolated single job is a unit-rate exponential") {
    auto r = simulate_transient(0.0, BatchDistribution::geometric(0.0), 0, 1,
                                100000, 7, {1.0});
    CHECK(std::abs(r.mean - 1.0) <= 3.0 * r.se);
    CHECK(std::abs(r.survival[0] - std::exp(-1.0)) <= 3.0 * r.survival_se[0]);
}

TEST_CASE("tagged-batch simulation matches the jump-chain oracle") {
    auto dist = BatchDistribution::geometric(0.2);
    auto r = simulate_transient(0.5, dist, 2, 3, 60000, 11, {2.0});
    auto br = ctmc_oracle(0.5, dist, 2, 3, 2.0);
    CHECK(std::abs(r.survival[0] - br.mid()) <= 3.0 * r.survival_se[0]);
}

TEST_CASE("stationary simulation recovers the single-job mean sojourn") {
    SimulationOptions opt;
    opt.n_batches = 200000;
    opt.threads = 2;
    auto r = simulate(0.5, BatchDistribution::geometric(0.0), 101, opt);
    CHECK(std::abs(r.mean_sojourn - 2.0) <= 3.0 * r.mean_se);
}

TEST_CASE("occupancy seen by arrivals matches the balance solve") {
    SimulationOptions opt;
    opt.n_batches = 200000;
    opt.threads = 2;
    auto r = simulate(0.5, BatchDistribution::geometric(0.2), 733, opt);
    auto occ = stationary_occupancy(0.5, BatchDistribution::geometric(0.2), 300);
    for (int n = 0; n <= 8; ++n)
        CHECK(std::abs(r.occupancy[n] - occ.pi[n]) <=
              3.0 * r.occupancy_se[n] + 1e-12);
}

TEST_CASE("conditional samples from the stationary run match the oracle") {
    SimulationOptions opt;
    opt.n_batches = 300000;
    opt.x_grid = {1.0};
    opt.threads = 2;
    auto dist = BatchDistribution::geometric(0.2);
    auto r = simulate(0.5, dist, 909, opt);
    const auto& cell = r.conditional[1][0];  // n = 1, b = 1
    REQUIRE(cell.count > 5000);
    auto br = ctmc_oracle(0.5, dist, 1, 1, 1.0);
    CHECK(std::abs(cell.survival[0] - br.mid()) <= 3.0 * cell.survival_se[0]);
}

TEST_CASE("simulation is reproducible and stream-order independent") {
    SimulationOptions o1, o4;
    o1.n_batches = o4.n_batches = 50000;
    o1.x_grid = o4.x_grid = {1.0};
    o1.threads = 1;
    o4.threads = 4;
    auto a = simulate(0.5, BatchDistribution::geometric(0.2), 55, o1);
    auto b = simulate(0.5, BatchDistribution::geometric(0.2), 55, o4);
    CHECK(a.mean_sojourn == b.mean_sojourn);
    CHECK(a.survival[0] == b.survival[0]);
}

}  // TEST_SUITE
