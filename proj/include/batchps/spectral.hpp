#pragma once

#include "batchps/common.hpp"
#include "batchps/model.hpp"

namespace batchps {

// Per-s spectral bundle: discriminant, the root pair of the characteristic
// quadratic, and the exponent pair driving the kernel. For stable parameters
// and s > 0 the roots satisfy q < u_minus < 1 < u_plus and the exponents
// c_plus < 0 < 1 < c_minus with c_plus + c_minus = 1.
struct SpectralData {
    double s;
    double rho, q;  // scenario echo, needed by the kernel helpers
    double delta;
    double u_minus, u_plus;
    double c_plus, c_minus;
};

// P(s,u) = u^2 - (s+1+rho+q) u + s q + rho + q
Complex char_poly(const ModelParams& params, double s, Complex u);
double char_poly(const ModelParams& params, double s, double u);
Complex char_poly(const SpectralData& sd, Complex u);

// Roots computed with the product/larger-root formulation: the naive
// difference loses digits once s dominates, since u_minus -> q from above.
SpectralData spectral_data(const ModelParams& params, double s);

// Characteristic kernel
//   R(s,u0;z) = ((z-U^-)/(u0-U^-))^{c_minus-1} ((z-U^+)/(u0-U^+))^{c_plus-1}
// with principal-branch powers. Throws ComputeError if either ratio lands on
// the negative real axis (cut violation).
Complex kernel(const SpectralData& sd, Complex u0, Complex zeta);

// Kernel along the straight segment z = u + t (U^- - u), in the parameterized
// form R(s,u;t) = (1-t)^{c_minus-1} (1 - t (U^--u)/(U^+-u))^{c_plus-1}.
// Real-u overload is the spec'd kernel_param.
double kernel_param(const SpectralData& sd, double u, double t);

// R(s,u; z_u(t))^p for complex u and arbitrary real power p (p = b for the
// level-b integrals). The first ratio equals 1-t exactly on the segment, so
// only the second one needs a branch check.
Complex kernel_pow(const SpectralData& sd, Complex u, double t, double p);
double kernel_pow(const SpectralData& sd, double u, double t, double p);

// d/du R(s,u0;u) = R(s,u0;u) (q-u) / ((u-U^-)(u-U^+))
Complex kernel_deriv(const SpectralData& sd, Complex u0, Complex u);

}  // namespace batchps
