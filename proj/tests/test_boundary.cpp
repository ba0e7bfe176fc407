#include <doctest.h>

#include <cmath>

#include "batchps/boundary.hpp"
#include "support/laplace_oracle.hpp"

using namespace batchps;

namespace {
ModelParams ref() {
    ModelParams p;
    p.rho = 0.5;
    p.q = 0.2;
    return p;
}
BoundaryCoefficients solve_at(const ModelParams& p, double s, int B) {
    auto sd = spectral_data(p, s);
    auto table = build_moment_table(sd, B);
    return solve_triangular(p, table);
}
}  // namespace

TEST_SUITE("boundary") {

TEST_CASE("order-1 row reduces to the closed-form ratio") {
    auto p = ref();
    auto sd = spectral_data(p, 1.0);
    auto table = build_moment_table(sd, 4);
    auto bc = solve_triangular(p, table);
    double expected = table.k[0] /
                      ((1.0 + 1.0 + p.rho) * table.m[0][0] - table.m[0][1]);
    CHECK(bc.e[0] == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("frozen boundary coefficients at the reference point") {
    auto bc = solve_at(ref(), 1.0, 6);
    // 30-digit triangular solve, independently confirmed by the truncated
    // transform recursion
    CHECK(bc.e[0] == doctest::Approx(0.703346965669156).epsilon(1e-9));
    CHECK(bc.e[1] == doctest::Approx(1.006715265429509).epsilon(1e-8));
    CHECK(bc.e[2] == doctest::Approx(1.141823847610964).epsilon(1e-8));
}

TEST_CASE("coefficients match the geometric mixture of the transform grid") {
    auto p = ref();
    auto bc = solve_at(p, 1.0, 5);
    auto oracle = testsupport::solve_transforms(
        p.rho, BatchDistribution::geometric(p.q), 1.0, 1200, 5);
    for (int b = 1; b <= 5; ++b)
        CHECK(bc.e[b - 1] ==
              doctest::Approx(oracle.geometric_mix(b, p.q)).epsilon(1e-7));
}

TEST_CASE("single-job limit recovers the empty-to-occupied transform column") {
    ModelParams p;
    p.rho = 0.5;
    p.q = 0.0;
    for (double s : {0.5, 1.0}) {
        auto bc = solve_at(p, s, 3);
        auto oracle = testsupport::solve_transforms(
            p.rho, BatchDistribution::geometric(0.0), s, 1500, 1);
        // with q = 0 the mixture collapses to the n = 0 entry
        CHECK(bc.e[0] == doctest::Approx(oracle.value(0, 1)).epsilon(1e-6));
    }
}

TEST_CASE("transform-of-survival bounds hold on the well-conditioned range") {
    auto p = ref();
    for (double s : {0.4, 1.0, 3.0}) {
        auto bc = solve_at(p, s, 20);
        for (int b = 1; b <= 20; ++b) {
            double slack = 10.0 * bc.e_err[b - 1] + 1e-12;
            CHECK(bc.e[b - 1] > -slack);
            CHECK(s * bc.e[b - 1] * (1.0 - p.q) < 1.0 + s * slack * (1.0 - p.q));
            if (bc.e_err[b - 1] < 1e-7) {
                CHECK(bc.e[b - 1] > 0.0);
                CHECK(s * bc.e[b - 1] * (1.0 - p.q) < 1.0);
            }
        }
        // soft diagnostic: stochastically larger batches wait longer
        for (int b = 1; b < 20; ++b)
            if (bc.e_err[b] < 1e-7)
                CHECK(bc.e[b] >= bc.e[b - 1] - 1e-9);
    }
}

TEST_CASE("conditioning estimates grow with the level and stay honest") {
    auto p = ref();
    auto sd = spectral_data(p, 1.0);
    auto bc = solve_triangular(p, build_moment_table(sd, 20, 1e-11));
    // 50-digit references: e_10 and e_20 of the same system
    CHECK(std::abs(bc.e[9] - 1.24964895515) <= 10.0 * bc.e_err[9] + 1e-9);
    CHECK(std::abs(bc.e[19] - 1.24999990959) <= 10.0 * bc.e_err[19] + 1e-9);
    CHECK(bc.e_err[19] > bc.e_err[9]);
    CHECK(bc.e_err[4] < 1e-7);
}

TEST_CASE("solution is stable under quadrature tolerance tightening") {
    auto p = ref();
    auto sd = spectral_data(p, 1.0);
    auto bc1 = solve_triangular(p, build_moment_table(sd, 12, 1e-9));
    auto bc2 = solve_triangular(p, build_moment_table(sd, 12, 1e-12));
    for (int b = 1; b <= 12; ++b) {
        double tol = std::max(1e-9, 30.0 * (bc1.e_err[b - 1] + bc2.e_err[b - 1]));
        CHECK(std::abs(bc1.e[b - 1] - bc2.e[b - 1]) <= tol);
    }
}

TEST_CASE("series evaluation and truncation guard") {
    auto bc = solve_at(ref(), 1.0, 20);
    CHECK(std::abs(boundary_series(bc, 0.0)) == 0.0);
    // agrees with a plain reference summation of the same coefficients
    Complex v(0.1, 0.0);
    double expect = 0.0, fact = 1.0, pw = 1.0;
    for (int b = 1; b <= 20; ++b) {
        fact *= b;
        pw *= 0.1;
        expect += bc.e[b - 1] * pw / fact;
    }
    CHECK(boundary_series(bc, v).real() ==
          doctest::Approx(expect).epsilon(1e-14));
    // term-wise derivative matches a centered difference
    double h = 1e-6;
    double fd = (boundary_series(bc, Complex(0.5 + h, 0.0)).real() -
                 boundary_series(bc, Complex(0.5 - h, 0.0)).real()) /
                (2.0 * h);
    CHECK(boundary_series_dv(bc, Complex(0.5, 0.0)).real() ==
          doctest::Approx(fd).epsilon(1e-8));
    CHECK_THROWS_AS(boundary_series(bc, Complex(80.0, 0.0)), ComputeError);
}

TEST_CASE("series truncation is converged at B_max = 20 for small arguments") {
    auto bc20 = solve_at(ref(), 1.0, 20);
    auto bc40 = solve_at(ref(), 1.0, 40);
    for (double v : {0.1, 0.5, 2.0}) {
        Complex a = boundary_series(bc20, Complex(v, 0.0));
        Complex b = boundary_series(bc40, Complex(v, 0.0));
        // the b > 20 coefficients carry conditioning noise of order
        // 4^b * quad_tol, but their v^b/b! weights keep the drift tiny
        CHECK(std::abs(a - b) <= 1e-9 * std::abs(b));
    }
}

TEST_CASE("L vanishes on the v = 0 line and is affine in u beyond the rational part") {
    auto bc = solve_at(ref(), 1.0, 20);
    CHECK(std::abs(eval_L(bc, Complex(0.3, 0.0), 0.0)) == 0.0);
    // L - rational = (u+v)E + v(v-D)E' is affine in u at fixed v
    Complex v(0.3, 0.0);
    auto rest = [&](double u) {
        Complex omu = 1.0 - u, omv = 1.0 - v;
        Complex rational = v * (1.0 - u * v) / (omu * omu * omv * omv);
        return eval_L(bc, Complex(u, 0.0), v) - rational;
    };
    Complex r1 = rest(0.1), r2 = rest(0.2), r3 = rest(0.3);
    CHECK(std::abs((r3 - r2) - (r2 - r1)) < 1e-13);
}

TEST_CASE("analyticity-condition residuals vanish after the solve") {
    auto p = ref();
    auto bc = solve_at(p, 1.0, 12);
    auto res = cnc0_residual(p, bc);
    for (double r : res) CHECK(r <= 1e-8);
}

TEST_CASE("perturbing the first coefficient breaks the first-order residual linearly") {
    auto p = ref();
    auto bc = solve_at(p, 1.0, 6);
    auto clean = cnc0_residual(p, bc);
    CHECK(clean[0] <= 1e-10);

    auto bumped1 = bc;
    bumped1.e[0] *= 1.01;
    double r1 = cnc0_residual(p, bumped1)[0];
    CHECK(r1 > 1e-4);

    auto bumped2 = bc;
    bumped2.e[0] *= 1.02;
    double r2 = cnc0_residual(p, bumped2)[0];
    CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.15));
}

}  // TEST_SUITE
