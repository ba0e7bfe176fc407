#pragma once

#include <vector>

#include "batchps/spectral.hpp"

namespace batchps {

// Definite integrals feeding the triangular system:
//   M_{b,l}(s) = int_0^{U^-} z^l R(s,0;z)^b dz
//   K_b(s)     = int_0^{U^-} [(b-1)(1-z)^b + 1] R(s,0;z)^b / (1-z)^2 dz
// The integrand vanishes like (U^- - z)^{b (c_minus - 1)} at the upper end;
// the quadrature flattens that with a terminal-panel substitution.
struct MomentTable {
    double s = 0.0;
    int b_max = 0;
    // m[b-1][l], 0 <= l <= b
    std::vector<std::vector<double>> m;
    std::vector<double> k;         // k[b-1]
    std::vector<double> quad_err;  // worst estimated abs error per level b
};

double moment_integral(const SpectralData& sd, int b, int l,
                       double rel_tol = 1e-11);
double rhs_integral(const SpectralData& sd, int b, double rel_tol = 1e-11);

// Same integrals by the independent graded Gauss-Legendre route; used by the
// fresh-quadrature residual checks only.
double moment_integral_fresh(const SpectralData& sd, int b, int l);
double rhs_integral_fresh(const SpectralData& sd, int b);

// Closed-form route for M_{b,l}(s) through the Gauss hypergeometric function:
// with z = U^-/U^+,
//   M_{b,l} = (U^-)^{l+1} B(l+1, b(c_minus-1)+1)
//             * 2F1(b(1-c_plus), l+1; l+2+b(c_minus-1); z).
// Derived from the Euler integral representation by scaling the variable to
// [0,1]; must agree with moment_integral to ~1e-8 relative.
double hypergeometric_check(const SpectralData& sd, int b, int l);

MomentTable build_moment_table(const SpectralData& sd, int b_max,
                               double rel_tol = 1e-11, unsigned threads = 1);

}  // namespace batchps
