#include <doctest.h>

#include <cmath>

#include "batchps/inversion.hpp"
#include "batchps/oracles.hpp"
#include "support/laplace_oracle.hpp"

using namespace batchps;

namespace {
ModelParams ref() {
    ModelParams p;
    p.rho = 0.5;
    p.q = 0.2;
    return p;
}
}  // namespace

TEST_SUITE("inversion") {

TEST_CASE("weights satisfy the constant-function identity") {
    for (int order : {10, 12, 14}) {
        auto w = stehfest_weights(order);
        double acc = 0.0;
        for (int k = 1; k <= order; ++k) acc += w[k] / k;
        CHECK(acc == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("known transform pairs") {
    CHECK(gs_invert([](double s) { return 1.0 / (s + 1.0); }, 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-7));
    CHECK(gs_invert([](double s) { return 1.0 / s; }, 0.37) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(gs_invert(
              [](double s) { return (1.0 - std::pow(1.0 + s, -2.0)) / s; },
              1.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-7));
}

TEST_CASE("order-agreement error bars cover the truth for smooth inputs") {
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
        auto r = invert([](double s) { return 1.0 / (s + 1.0); }, x);
        CHECK(std::abs(r.value - std::exp(-x)) <= 10.0 * r.err + 1e-9);
    }
}

TEST_CASE("conditional survival endpoints and slope") {
    TransformBuilder::Options opt;
    opt.n_series = 8;
    opt.b_levels = 2;
    TransformFamily family(ref(), 4, 2, opt);
    // survival starts at 1
    auto p0 = conditional_survival(family, 0, 1, 1e-4);
    CHECK(std::abs(p0.raw - 1.0) <= 5e-4);
    // the (0,1) curve leaves x = 0 with slope -1
    double h = 1e-3;
    auto ph = conditional_survival(family, 0, 1, h);
    CHECK((ph.raw - 1.0) / h == doctest::Approx(-1.0).epsilon(1e-2));
}

TEST_CASE("conditional survival against the jump-chain oracle") {
    TransformBuilder::Options opt;
    opt.n_series = 8;
    opt.b_levels = 3;
    TransformFamily family(ref(), 3, 3, opt);
    auto dist = BatchDistribution::geometric(0.2);
    auto br = ctmc_oracle(0.5, dist, 2, 3, 2.0);
    auto pt = conditional_survival(family, 2, 3, 2.0);
    CHECK(br.width() <= 1e-8);
    CHECK(std::abs(pt.raw - br.mid()) <= 1e-4);
}

TEST_CASE("curves are monotone in x, n and b") {
    TransformBuilder::Options opt;
    opt.n_series = 8;
    opt.b_levels = 3;
    TransformFamily family(ref(), 3, 3, opt);
    double prev = 2.0;
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
        double v = conditional_survival(family, 1, 2, x).value;
        CHECK(v <= prev + 1e-9);
        prev = v;
        CHECK(conditional_survival(family, 2, 2, x).raw >= v - 1e-6);
        CHECK(conditional_survival(family, 1, 3, x).raw >= v - 1e-6);
    }
}

TEST_CASE("unconditional curve is a convex mixture with a remainder bracket") {
    TransformBuilder::Options opt;
    opt.n_series = 20;
    opt.b_levels = 8;
    TransformFamily family(ref(), 20, 8, opt);
    auto u = unconditional_survival(family, 1.0);
    CHECK(u.bracket >= 0.0);
    CHECK(u.bracket < 2e-3);
    double lo = conditional_survival(family, 0, 1, 1.0).raw;
    double hi = conditional_survival(family, 20, 8, 1.0).raw;
    CHECK(u.raw >= lo - u.bracket - 1e-6);
    CHECK(u.raw <= hi + u.bracket + 1e-6);
}

TEST_CASE("first moments are monotone in the starting occupancy") {
    TransformBuilder::Options opt;
    opt.n_series = 8;
    opt.b_levels = 2;
    TransformFamily family(ref(), 4, 2, opt);
    CHECK(moment(family, 1, 1, 1) > moment(family, 0, 1, 1));
    CHECK(moment(family, 2, 1, 1) > moment(family, 1, 1, 1));
}

TEST_CASE("first moment agrees with the recursion oracle") {
    auto p = ref();
    TransformBuilder::Options opt;
    opt.n_series = 8;
    opt.b_levels = 2;
    TransformFamily family(p, 2, 2, opt);
    // same extrapolation nodes on the oracle values isolates the pipeline
    std::vector<double> nodes = {0.2, 0.1, 0.05, 0.025};
    std::vector<double> fvals;
    for (double s : nodes) {
        auto g = testsupport::solve_transforms(
            p.rho, BatchDistribution::geometric(p.q), s, 2500, 2);
        fvals.push_back(g.value(0, 2));
    }
    double oracle_mean = extrapolate_to_zero(nodes, fvals);
    CHECK(moment(family, 0, 2, 1) ==
          doctest::Approx(oracle_mean).epsilon(1e-4));
}

TEST_CASE("second moment dominates the squared mean") {
    TransformBuilder::Options opt;
    opt.n_series = 8;
    opt.b_levels = 2;
    TransformFamily family(ref(), 2, 2, opt);
    double m1 = moment(family, 0, 2, 1);
    double m2 = moment(family, 0, 2, 2);
    CHECK(m2 > m1 * m1);
    CHECK_THROWS_AS(moment(family, 0, 1, 3), InvalidInput);
}

TEST_CASE("inversion round-trip recovers held-out transform values") {
    TransformBuilder::Options opt;
    opt.n_series = 8;
    opt.b_levels = 1;
    TransformFamily family(ref(), 2, 1, opt);
    // dense curve, then numerical re-transform at held-out s
    std::vector<double> xs, ys;
    for (double x = 0.02; x <= 50.0; x += 0.02) {
        xs.push_back(x);
        ys.push_back(conditional_survival(family, 0, 1, x).value);
    }
    for (double s : {0.5, 1.0, 2.0}) {
        double acc = 0.0, prev_x = 0.0, prev_y = 1.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            acc += 0.5 * (prev_y * std::exp(-s * prev_x) +
                          ys[i] * std::exp(-s * xs[i])) *
                   (xs[i] - prev_x);
            prev_x = xs[i];
            prev_y = ys[i];
        }
        CHECK(acc == doctest::Approx(family.value(s, 0, 1)).epsilon(1e-3));
    }
}

}  // TEST_SUITE
