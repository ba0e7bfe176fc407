#include "batchps/spectral.hpp"

#include <cmath>

namespace batchps {

namespace {

// principal-branch power with a guard against the cut along the negative
// real axis
Complex checked_pow(Complex ratio, double expo, const char* what) {
    double mag = std::abs(ratio);
    if (ratio.real() < 0.0 && std::abs(ratio.imag()) <= 1e-13 * mag)
        throw ComputeError(std::string("kernel cut violation: ") + what +
                           " ratio on the negative real axis");
    if (mag == 0.0) {
        if (expo > 0.0) return 0.0;
        throw ComputeError("kernel ratio vanished with nonpositive exponent");
    }
    return std::pow(ratio, Complex(expo, 0.0));
}

}  // namespace

Complex char_poly(const ModelParams& params, double s, Complex u) {
    if (!(s > 0.0)) throw InvalidInput("transform variable s must be positive");
    return u * u - (s + 1.0 + params.rho + params.q) * u +
           (s * params.q + params.rho + params.q);
}

double char_poly(const ModelParams& params, double s, double u) {
    if (!(s > 0.0)) throw InvalidInput("transform variable s must be positive");
    return (u - (s + 1.0 + params.rho + params.q)) * u +
           (s * params.q + params.rho + params.q);
}

Complex char_poly(const SpectralData& sd, Complex u) {
    return (u - sd.u_minus) * (u - sd.u_plus);
}

SpectralData spectral_data(const ModelParams& params, double s) {
    validate(params);
    if (!(s > 0.0)) throw InvalidInput("transform variable s must be positive");
    const double rho = params.rho, q = params.q;
    SpectralData sd;
    sd.s = s;
    sd.rho = rho;
    sd.q = q;
    sd.delta = s * s + 2.0 * (1.0 + rho - q) * s +
               (1.0 - rho - q) * (1.0 - rho - q);
    const double sum = s + 1.0 + rho + q;          // u_minus + u_plus
    const double prod = s * q + rho + q;           // u_minus * u_plus
    sd.u_plus = 0.5 * (sum + std::sqrt(sd.delta));
    sd.u_minus = prod / sd.u_plus;
    const double span = sd.u_plus - sd.u_minus;
    sd.c_plus = -(sd.u_minus - q) / span;
    sd.c_minus = (sd.u_plus - q) / span;
    return sd;
}

Complex kernel(const SpectralData& sd, Complex u0, Complex zeta) {
    Complex r1 = (zeta - sd.u_minus) / (u0 - sd.u_minus);
    Complex r2 = (zeta - sd.u_plus) / (u0 - sd.u_plus);
    return checked_pow(r1, sd.c_minus - 1.0, "lower-root") *
           checked_pow(r2, sd.c_plus - 1.0, "upper-root");
}

double kernel_param(const SpectralData& sd, double u, double t) {
    double w = (sd.u_minus - u) / (sd.u_plus - u);
    return std::pow(1.0 - t, sd.c_minus - 1.0) *
           std::pow(1.0 - t * w, sd.c_plus - 1.0);
}

Complex kernel_pow(const SpectralData& sd, Complex u, double t, double p) {
    Complex w = (sd.u_minus - u) / (sd.u_plus - u);
    Complex r2 = 1.0 - t * w;
    return std::pow(1.0 - t, p * (sd.c_minus - 1.0)) *
           checked_pow(r2, p * (sd.c_plus - 1.0), "upper-root");
}

double kernel_pow(const SpectralData& sd, double u, double t, double p) {
    double w = (sd.u_minus - u) / (sd.u_plus - u);
    return std::pow(1.0 - t, p * (sd.c_minus - 1.0)) *
           std::pow(1.0 - t * w, p * (sd.c_plus - 1.0));
}

Complex kernel_deriv(const SpectralData& sd, Complex u0, Complex u) {
    return kernel(sd, u0, u) * (sd.q - u) /
           ((u - sd.u_minus) * (u - sd.u_plus));
}

}  // namespace batchps
