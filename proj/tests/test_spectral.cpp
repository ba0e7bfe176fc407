#include <doctest.h>

#include <cmath>
#include <random>

#include "batchps/spectral.hpp"

using namespace batchps;

namespace {
ModelParams ref() {
    ModelParams p;
    p.rho = 0.5;
    p.q = 0.2;
    return p;
}
double urand(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * ((double(eng() >> 11) + 0.5) * 0x1.0p-53);
}
}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("characteristic polynomial identities") {
    auto p = ref();
    for (double s : {0.3, 1.0, 5.0, 40.0})
        CHECK(char_poly(p, s, p.q) ==
              doctest::Approx(p.rho * (1.0 - p.q)).epsilon(1e-13));
    CHECK(char_poly(p, 1.0, 0.0) == doctest::Approx(0.9).epsilon(1e-15));
    auto sd = spectral_data(p, 1.0);
    CHECK(std::abs(char_poly(p, 1.0, Complex(sd.u_minus, 0.0))) < 1e-13);
    CHECK(std::abs(char_poly(p, 1.0, Complex(sd.u_plus, 0.0))) < 1e-12);
    CHECK_THROWS_AS(char_poly(p, 0.0, 0.5), InvalidInput);
}

TEST_CASE("spectral data at the reference point") {
    auto sd = spectral_data(ref(), 1.0);
    CHECK(sd.delta == doctest::Approx(3.69).epsilon(1e-15));
    CHECK(sd.u_minus == doctest::Approx(0.389531364385073).epsilon(1e-12));
    CHECK(sd.u_plus == doctest::Approx(2.310468635614927).epsilon(1e-12));
    CHECK(sd.c_plus == doctest::Approx(-0.098666087239657).epsilon(1e-10));
    CHECK(sd.c_minus == doctest::Approx(1.098666087239657).epsilon(1e-10));
}

TEST_CASE("root bracketing and exponent identities over random s") {
    std::mt19937_64 eng(12345);
    auto p = ref();
    for (int i = 0; i < 1000; ++i) {
        double s = urand(eng, 1e-6, 50.0);
        auto sd = spectral_data(p, s);
        CHECK(sd.u_minus > p.q);
        CHECK(sd.u_minus < 1.0);
        CHECK(sd.u_plus > 1.0);
        CHECK(std::abs(sd.c_plus + sd.c_minus - 1.0) < 1e-14);
        CHECK(sd.c_plus < 0.0);
        CHECK(sd.c_minus > 1.0);
    }
}

TEST_CASE("stable root formulation survives large s") {
    auto p = ref();
    for (double s : {1e3, 1e6, 1e9}) {
        auto sd = spectral_data(p, s);
        CHECK(sd.u_minus > p.q);
        CHECK(sd.u_minus < 1.0);
        // product identity holds to full precision
        CHECK(sd.u_minus * sd.u_plus ==
              doctest::Approx(s * p.q + p.rho + p.q).epsilon(1e-14));
    }
}

TEST_CASE("kernel endpoint values and the frozen reference") {
    auto sd = spectral_data(ref(), 1.0);
    CHECK(std::abs(kernel(sd, Complex(0.15, 0.0), Complex(0.15, 0.0)) - 1.0) <
          1e-14);
    CHECK(std::abs(kernel(sd, Complex(0.1, 0.0), Complex(sd.u_minus, 0.0))) <
          1e-12);
    // independently computed with 30-digit arithmetic
    CHECK(kernel(sd, 0.0, Complex(0.2, 0.0)).real() ==
          doctest::Approx(1.028802561699853).epsilon(1e-12));
}

TEST_CASE("kernel range on the real path") {
    auto sd = spectral_data(ref(), 1.0);
    // from u0 >= q the kernel decreases through [0,1]; from u0 < q it peaks
    // at zeta = q with a value slightly above 1, bounded by R(s,u0;q)
    double peak = kernel(sd, 0.0, Complex(sd.q, 0.0)).real();
    CHECK(peak > 1.0);
    for (int i = 1; i < 40; ++i) {
        double z = sd.u_minus * i / 40.0;
        double v = kernel(sd, 0.0, Complex(z, 0.0)).real();
        CHECK(v >= 0.0);
        CHECK(v <= peak * (1.0 + 1e-13));
    }
    double u0 = 0.25;  // above q
    for (int i = 0; i < 20; ++i) {
        double z = u0 + (sd.u_minus - u0) * i / 20.0;
        double v = kernel(sd, Complex(u0, 0.0), Complex(z, 0.0)).real();
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-13);
    }
}

TEST_CASE("parameterized kernel agrees with the direct form") {
    std::mt19937_64 eng(99);
    for (double s : {0.37, 1.0, 6.5}) {
        auto sd = spectral_data(ref(), s);
        CHECK(kernel_param(sd, 0.1, 0.0) == doctest::Approx(1.0));
        CHECK(kernel_param(sd, 0.1, 1.0) == 0.0);
        for (int i = 0; i < 100; ++i) {
            double u = urand(eng, 0.0, 0.95 * sd.u_minus);
            double t = urand(eng, 0.0, 0.999);
            double zeta = u + t * (sd.u_minus - u);
            double direct = kernel(sd, Complex(u, 0.0), Complex(zeta, 0.0)).real();
            CHECK(kernel_param(sd, u, t) ==
                  doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("derivative identity against central differences") {
    std::mt19937_64 eng(7);
    auto p = ref();
    for (int i = 0; i < 200; ++i) {
        double s = urand(eng, 0.05, 30.0);
        auto sd = spectral_data(p, s);
        double um = sd.u_minus;
        double u0 = urand(eng, 0.0, 0.7 * um);
        double u;
        do {
            u = urand(eng, 0.08 * um, 0.9 * um);
        } while (std::abs(u - p.q) < 0.05 * um || std::abs(u - u0) < 0.02 * um);
        double h = 1e-5 * um;
        double fd = (kernel(sd, u0, Complex(u + h, 0.0)).real() -
                     kernel(sd, u0, Complex(u - h, 0.0)).real()) /
                    (2.0 * h);
        double an = kernel_deriv(sd, u0, Complex(u, 0.0)).real();
        CHECK(std::abs(fd - an) <= 1e-6 * std::max(std::abs(an), 1e-12));
    }
}

TEST_CASE("kernel composition") {
    std::mt19937_64 eng(31);
    auto p = ref();
    for (int i = 0; i < 300; ++i) {
        double s = urand(eng, 0.05, 40.0);
        auto sd = spectral_data(p, s);
        double z = urand(eng, 0.02 * sd.u_minus, 0.8 * sd.u_minus);
        double zeta = urand(eng, z + 0.02 * sd.u_minus, 0.97 * sd.u_minus);
        double lhs = kernel(sd, 0.0, Complex(z, 0.0)).real() *
                     kernel(sd, Complex(z, 0.0), Complex(zeta, 0.0)).real();
        double rhs = kernel(sd, 0.0, Complex(zeta, 0.0)).real();
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("kernel has its unique stationary point at q") {
    auto sd = spectral_data(ref(), 1.0);
    double left = kernel_deriv(sd, 0.0, Complex(sd.q - 0.05, 0.0)).real();
    double right = kernel_deriv(sd, 0.0, Complex(sd.q + 0.05, 0.0)).real();
    CHECK(left > 0.0);
    CHECK(right < 0.0);
    CHECK(std::abs(kernel_deriv(sd, 0.0, Complex(sd.q, 0.0)).real()) < 1e-14);
}

TEST_CASE("cut violation is detected") {
    auto sd = spectral_data(ref(), 1.0);
    // a point on the cut: beyond U^- along the direction away from u0
    Complex u0(0.2, 0.0);
    Complex zeta = sd.u_minus + 0.1 * (sd.u_minus - u0);
    CHECK_THROWS_AS(kernel(sd, u0, zeta), ComputeError);
}

TEST_CASE("s must be strictly positive") {
    CHECK_THROWS_AS(spectral_data(ref(), 0.0), InvalidInput);
    CHECK_THROWS_AS(spectral_data(ref(), -1.0), InvalidInput);
}

}  // TEST_SUITE
