#include "batchps/boundary.hpp"

#include <cmath>

namespace batchps {

BoundaryCoefficients solve_triangular(const ModelParams& params,
                                      const MomentTable& table) {
    validate(params);
    const int B = table.b_max;
    const double D = table.s + 1.0 + params.rho;
    BoundaryCoefficients bc;
    bc.s = table.s;
    bc.rho = params.rho;
    bc.q = params.q;
    bc.e.resize(B);

    auto Q = [&](int b, int l) {
        double m_l = table.m[b - 1][l];
        double m_lm1 = l >= 1 ? table.m[b - 1][l - 1] : 0.0;
        return (l + 1.0 - b) * m_l - l * D * m_lm1;
    };

    bc.e_err.resize(B);
    const double bound = 1.0 / (table.s * (1.0 - params.q));
    for (int b = 1; b <= B; ++b) {
        double rhs = table.k[b - 1];
        double scale = std::abs(rhs);
        double carried = 0.0;  // propagated error from earlier coefficients
        for (int l = 1; l < b; ++l) {
            double coef = binomial(b, l) * Q(b, l);
            double term = ((l % 2) ? -1.0 : 1.0) * coef * bc.e[l - 1];
            rhs -= term;
            scale = std::max(scale, std::abs(term));
            carried += std::abs(coef) * bc.e_err[l - 1];
        }
        double diag = ((b % 2) ? -1.0 : 1.0) * Q(b, b);
        double diag_parts = std::abs(table.m[b - 1][b]) +
                            b * D * std::abs(table.m[b - 1][b - 1]);
        if (std::abs(diag) <= 1e-13 * diag_parts)
            throw ComputeError("triangular solve: near-singular diagonal at b=" +
                               std::to_string(b));
        bc.e[b - 1] = rhs / diag;
        // quadrature inaccuracy and roundoff, both amplified by row/diagonal
        bc.e_err[b - 1] =
            (scale * (3e-11 + 100.0 * 2.3e-16) * b + carried) / std::abs(diag);
        double slack = 10.0 * bc.e_err[b - 1] + 1e-12;
        if (!(bc.e[b - 1] > -slack) || !(bc.e[b - 1] < bound + slack))
            throw ComputeError("boundary coefficient out of range at b=" +
                               std::to_string(b) + ": " +
                               std::to_string(bc.e[b - 1]));
    }
    bc.series_coeff = bc.e;
    return bc;
}

namespace {

constexpr double kTailTol = 1e-8;

// sum c_b v^b (b >= 1) or its derivative; also reports the abs-series scale
// and a geometric tail estimate so the caller can verify the truncation is
// still trustworthy at this argument.
struct SeriesEval {
    Complex value;
    double abs_scale;
    double tail;
};

SeriesEval series(const std::vector<double>& c, Complex v, bool derivative) {
    const int B = int(c.size());
    Complex acc = 0.0;
    double scale = 0.0;
    double av = std::abs(v);
    if (av >= 0.97)
        throw ComputeError("boundary series argument too close to the "
                           "radius of convergence");
    double pw = 1.0;
    Complex vp = 1.0;
    double last = 0.0;
    for (int b = 1; b <= B; ++b) {
        double coef = derivative ? c[b - 1] * b : c[b - 1];
        if (!derivative) {
            vp *= v;
            pw *= av;
        }
        acc += coef * vp;
        last = std::abs(coef) * pw;
        scale += last;
        if (derivative) {
            vp *= v;
            pw *= av;
        }
    }
    double tail = last * av / (1.0 - av);
    return {acc, scale, tail};
}

void check_tail(const SeriesEval& ev, const char* what) {
    if (ev.tail > kTailTol * (ev.abs_scale + 1e-300))
        throw ComputeError(std::string("boundary series truncation unreliable (") +
                           what + "): raise B_max or reduce |v|");
}

}  // namespace

Complex boundary_series(const BoundaryCoefficients& bc, Complex v) {
    auto ev = series(bc.series_coeff, v, false);
    check_tail(ev, "value");
    return ev.value;
}

Complex boundary_series_dv(const BoundaryCoefficients& bc, Complex v) {
    auto ev = series(bc.series_coeff, v, true);
    check_tail(ev, "derivative");
    return ev.value;
}

Complex eval_L(const BoundaryCoefficients& bc, Complex u, Complex v) {
    Complex omu = 1.0 - u, omv = 1.0 - v;
    Complex rational = v * (1.0 - u * v) / (omu * omu * omv * omv);
    Complex es = boundary_series(bc, v);
    Complex des = boundary_series_dv(bc, v);
    double D = bc.s + 1.0 + bc.rho;
    return rational + (u + v) * es + v * (v - D) * des;
}

std::vector<double> cnc0_residual(const ModelParams& params,
                                  const BoundaryCoefficients& bc) {
    validate(params);
    const int B = bc.b_max();
    SpectralData sd = spectral_data(params, bc.s);
    const double D = bc.s + 1.0 + params.rho;

    // fresh integrals, same triangular algebra as the solve
    std::vector<std::vector<double>> m(B);
    std::vector<double> k(B);
    for (int b = 1; b <= B; ++b) {
        m[b - 1].resize(b + 1);
        for (int l = 0; l <= b; ++l) m[b - 1][l] = moment_integral_fresh(sd, b, l);
        k[b - 1] = rhs_integral_fresh(sd, b);
    }

    std::vector<double> res(B);
    for (int b = 1; b <= B; ++b) {
        double acc = -k[b - 1];
        double scale = std::abs(k[b - 1]);
        for (int l = 1; l <= b; ++l) {
            double Q = (l + 1.0 - b) * m[b - 1][l] - l * D * m[b - 1][l - 1];
            double term = ((l % 2) ? -1.0 : 1.0) * binomial(b, l) * Q * bc.e[l - 1];
            acc += term;
            scale = std::max(scale, std::abs(term));
        }
        res[b - 1] = std::abs(acc) / std::max(scale, 1e-300);
    }
    return res;
}

}  // namespace batchps
