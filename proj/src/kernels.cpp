#include "batchps/kernels.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_hyperg.h>

#include <cmath>

#include "batchps/parallel.hpp"
#include "batchps/quadrature.hpp"

namespace batchps {

namespace {

double endpoint_exponent(const SpectralData& sd, int b) {
    return b * (sd.c_minus - 1.0);
}

}  // namespace

double moment_integral(const SpectralData& sd, int b, int l, double rel_tol) {
    if (b < 1 || l < 0) throw InvalidInput("moment_integral requires b>=1, l>=0");
    const double um = sd.u_minus;
    auto g = [&](double t) {
        double z = um * t;
        return std::pow(z, l) * kernel_pow(sd, 0.0, t, double(b)) * um;
    };
    auto r = integrate01_endpoint<double>(g, endpoint_exponent(sd, b), rel_tol);
    if (!r.converged)
        throw ComputeError("moment_integral quadrature did not converge; achieved err " +
                           std::to_string(r.err));
    return r.value;
}

double rhs_integral(const SpectralData& sd, int b, double rel_tol) {
    if (b < 1) throw InvalidInput("rhs_integral requires b >= 1");
    const double um = sd.u_minus;
    auto g = [&](double t) {
        double z = um * t;
        double omz = 1.0 - z;
        double poly = (b - 1) * std::pow(omz, b) + 1.0;
        return poly * kernel_pow(sd, 0.0, t, double(b)) / (omz * omz) * um;
    };
    auto r = integrate01_endpoint<double>(g, endpoint_exponent(sd, b), rel_tol);
    if (!r.converged)
        throw ComputeError("rhs_integral quadrature did not converge; achieved err " +
                           std::to_string(r.err));
    return r.value;
}

double moment_integral_fresh(const SpectralData& sd, int b, int l) {
    const double um = sd.u_minus;
    auto g = [&](double t) {
        double z = um * t;
        return std::pow(z, l) * kernel_pow(sd, 0.0, t, double(b)) * um;
    };
    return integrate01_graded_gl<double>(g, endpoint_exponent(sd, b));
}

double rhs_integral_fresh(const SpectralData& sd, int b) {
    const double um = sd.u_minus;
    auto g = [&](double t) {
        double z = um * t;
        double omz = 1.0 - z;
        double poly = (b - 1) * std::pow(omz, b) + 1.0;
        return poly * kernel_pow(sd, 0.0, t, double(b)) / (omz * omz) * um;
    };
    return integrate01_graded_gl<double>(g, endpoint_exponent(sd, b));
}

double hypergeometric_check(const SpectralData& sd, int b, int l) {
    const double beta_b = endpoint_exponent(sd, b);
    const double a = b * (1.0 - sd.c_plus);
    const double bb = l + 1.0;
    const double c = l + 2.0 + beta_b;
    const double z = sd.u_minus / sd.u_plus;
    if (!(z < 1.0)) throw ComputeError("hypergeometric argument must satisfy z < 1");
    gsl_sf_result res;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    int status = gsl_sf_hyperg_2F1_e(a, bb, c, z, &res);
    gsl_set_error_handler(old);
    if (status != 0)
        throw ComputeError(std::string("hypergeometric evaluation failed: ") +
                           gsl_strerror(status));
    double beta_fn = std::exp(std::lgamma(bb) + std::lgamma(beta_b + 1.0) -
                              std::lgamma(bb + beta_b + 1.0));
    return std::pow(sd.u_minus, l + 1.0) * beta_fn * res.val;
}

MomentTable build_moment_table(const SpectralData& sd, int b_max,
                               double rel_tol, unsigned threads) {
    if (b_max < 1) throw InvalidInput("b_max must be >= 1");
    MomentTable table;
    table.s = sd.s;
    table.b_max = b_max;
    table.m.resize(b_max);
    table.k.resize(b_max);
    table.quad_err.assign(b_max, 0.0);
    for (int b = 1; b <= b_max; ++b) table.m[b - 1].resize(b + 1);

    struct Job {
        int b, l;  // l == -1 denotes K_b
    };
    std::vector<Job> jobs;
    for (int b = 1; b <= b_max; ++b) {
        jobs.push_back({b, -1});
        for (int l = 0; l <= b; ++l) jobs.push_back({b, l});
    }
    std::vector<double> errs(jobs.size(), 0.0);
    parallel_for(jobs.size(), threads, [&](std::size_t i) {
        const Job& j = jobs[i];
        const double um = sd.u_minus;
        double beta = endpoint_exponent(sd, j.b);
        if (j.l < 0) {
            auto g = [&](double t) {
                double z = um * t;
                double omz = 1.0 - z;
                double poly = (j.b - 1) * std::pow(omz, j.b) + 1.0;
                return poly * kernel_pow(sd, 0.0, t, double(j.b)) / (omz * omz) * um;
            };
            auto r = integrate01_endpoint<double>(g, beta, rel_tol);
            table.k[j.b - 1] = r.value;
            errs[i] = r.err;
        } else {
            auto g = [&](double t) {
                double z = um * t;
                return std::pow(z, j.l) * kernel_pow(sd, 0.0, t, double(j.b)) * um;
            };
            auto r = integrate01_endpoint<double>(g, beta, rel_tol);
            table.m[j.b - 1][j.l] = r.value;
            errs[i] = r.err;
        }
    });
    for (std::size_t i = 0; i < jobs.size(); ++i)
        table.quad_err[jobs[i].b - 1] = std::max(table.quad_err[jobs[i].b - 1], errs[i]);
    return table;
}

}  // namespace batchps
