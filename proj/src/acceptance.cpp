#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "batchps/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace batchps {

namespace {

ModelParams reference_params() {
    ModelParams p;
    p.rho = 0.5;
    p.q = 0.2;
    return p;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

double runif(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * ((double(eng() >> 11) + 0.5) * 0x1.0p-53);
}

// worst violation across the spectral identity battery for one (params, s)
struct SpectralWorst {
    double bracket = 0.0;     // how far outside q < U^- < 1 < U^+ (0 = strict)
    double c_sum = 0.0;       // |C^+ + C^- - 1|
    double p_at_q = 0.0;      // |P(s,q) - rho(1-q)|
    double composition = 0.0;
    double deriv_rel = 0.0;

    void merge(const SpectralWorst& o) {
        bracket = std::max(bracket, o.bracket);
        c_sum = std::max(c_sum, o.c_sum);
        p_at_q = std::max(p_at_q, o.p_at_q);
        composition = std::max(composition, o.composition);
        deriv_rel = std::max(deriv_rel, o.deriv_rel);
    }
};

SpectralWorst spectral_battery(const ModelParams& p, double s,
                               std::mt19937_64& eng) {
    SpectralWorst w;
    auto sd = spectral_data(p, s);
    w.bracket = std::max(
        {p.q - sd.u_minus, sd.u_minus - 1.0, 1.0 - sd.u_plus, 0.0});
    w.c_sum = std::abs(sd.c_plus + sd.c_minus - 1.0);
    w.p_at_q = std::abs(char_poly(p, s, p.q) - p.rho * (1.0 - p.q));

    double um = sd.u_minus;
    double z = runif(eng, 0.02 * um, 0.85 * um);
    double zeta = runif(eng, z + 0.05 * um, 0.97 * um);
    if (zeta > 0.98 * um) zeta = 0.98 * um;
    double lhs = kernel(sd, 0.0, Complex(z, 0.0)).real() *
                 kernel(sd, Complex(z, 0.0), Complex(zeta, 0.0)).real();
    double rhs = kernel(sd, 0.0, Complex(zeta, 0.0)).real();
    w.composition = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));

    // derivative identity against a central difference; skip the immediate
    // neighborhood of the stationary point u = q where the relative measure
    // degenerates
    double u0 = runif(eng, 0.0, 0.7 * um);
    double u;
    do {
        u = runif(eng, 0.08 * um, 0.9 * um);
    } while (std::abs(u - p.q) < 0.05 * um || std::abs(u - u0) < 0.02 * um);
    double h = 1e-5 * um;
    double g1 = kernel(sd, u0, Complex(u + h, 0.0)).real();
    double g2 = kernel(sd, u0, Complex(u - h, 0.0)).real();
    double fd = (g1 - g2) / (2.0 * h);
    double an = kernel_deriv(sd, u0, Complex(u, 0.0)).real();
    w.deriv_rel = std::abs(fd - an) / std::max(std::abs(an), 1e-12);
    return w;
}

CriterionResult criterion_spectral() {
    Timer t;
    CriterionResult r{1, "spectral identity suite", false, 0.0, 1e-12, "", 0.0};
    std::mt19937_64 eng(20240811);
    SpectralWorst w;
    auto sweep = [&](const ModelParams& p, int count) {
        for (int i = 0; i < count; ++i) {
            double s = runif(eng, 1e-6, 50.0);
            w.merge(spectral_battery(p, s, eng));
        }
    };
    sweep(reference_params(), 1000);
    for (int k = 0; k < 10; ++k) {
        ModelParams p;
        p.q = runif(eng, 0.0, 0.85);
        p.rho = runif(eng, 0.05, 0.95) * (1.0 - p.q);
        sweep(p, 1000);
    }
    double alg = std::max({w.bracket, w.c_sum, w.p_at_q, w.composition});
    r.observed = alg;
    r.pass = alg <= 1e-12 && w.deriv_rel <= 1e-6;
    std::ostringstream os;
    os << "identities " << alg << " (tol 1e-12), derivative-vs-FD rel "
       << w.deriv_rel << " (tol 1e-6)";
    r.detail = os.str();
    r.seconds = t.elapsed();
    return r;
}

CriterionResult criterion_hypergeometric() {
    Timer t;
    CriterionResult r{2, "hypergeometric cross-check", false, 0.0, 1e-8, "", 0.0};
    auto p = reference_params();
    double worst = 0.0;
    for (double s : {0.5, 1.0, 5.0}) {
        auto sd = spectral_data(p, s);
        for (int b = 1; b <= 10; ++b)
            for (int l = 0; l <= b; ++l) {
                double quad = moment_integral(sd, b, l);
                double hyp = hypergeometric_check(sd, b, l);
                worst = std::max(worst, std::abs(quad - hyp) / std::abs(hyp));
            }
    }
    r.observed = worst;
    r.pass = worst <= r.tol;
    r.detail = "max rel diff quadrature vs hypergeometric = " + std::to_string(worst);
    r.seconds = t.elapsed();
    return r;
}

CriterionResult criterion_cnc0(unsigned threads) {
    Timer t;
    CriterionResult r{3, "analyticity-condition residual", false, 0.0, 1e-8, "", 0.0};
    auto p = reference_params();
    double worst = 0.0;
    for (double s : {0.5, 1.0, 2.0}) {
        auto sd = spectral_data(p, s);
        auto table = build_moment_table(sd, 20, 1e-11, threads);
        auto bc = solve_triangular(p, table);
        auto res = cnc0_residual(p, bc);
        for (double v : res) worst = std::max(worst, v);
    }
    r.observed = worst;
    r.pass = worst <= r.tol;
    r.detail = "max order residual (fresh quadrature, B_max=20) = " +
               std::to_string(worst);
    r.seconds = t.elapsed();
    return r;
}

CriterionResult criterion_pde(unsigned threads) {
    Timer t;
    CriterionResult r{4, "characteristic-solution PDE residual", false, 0.0, 1e-5,
                      "", 0.0};
    TransformBuilder::Options opt;
    opt.threads = threads;
    TransformBuilder tb(reference_params(), 1.0, opt);
    auto res = tb.pde_residual(25, 1e-3);
    r.observed = std::max(res.first_order, res.transported);
    r.pass = r.observed <= r.tol;
    std::ostringstream os;
    os << "first-order " << res.first_order << ", transported " << res.transported;
    r.detail = os.str();
    r.seconds = t.elapsed();
    return r;
}

const std::vector<double> kOracleX = {0.25, 0.5, 1.0, 2.0, 4.0};

CriterionResult criterion_oracle_triangle() {
    Timer t;
    CriterionResult r{5, "oracle triangle (differential vs jump-chain)", false,
                      0.0, 1e-6, "", 0.0};
    auto p = reference_params();
    auto dist = BatchDistribution::geometric(p.q);
    auto ode = ode_oracle(p.rho, dist, kOracleX, 400, 4, 1e-10);
    double worst = 0.0, worst_width = 0.0;
    for (std::size_t xi = 0; xi < kOracleX.size(); ++xi)
        for (int n = 0; n <= 4; ++n)
            for (int b = 1; b <= 4; ++b) {
                auto br = ctmc_oracle(p.rho, dist, n, b, kOracleX[xi], 400);
                double wd = std::max(ode.width(int(xi), n, b), br.width());
                worst_width = std::max(worst_width, wd);
                if (wd <= 1e-6)
                    worst = std::max(worst,
                                     std::abs(ode.mid(int(xi), n, b) - br.mid()));
            }
    r.observed = worst;
    r.pass = worst <= r.tol;
    std::ostringstream os;
    os << "max |difference| = " << worst << ", max bracket width = " << worst_width;
    r.detail = os.str();
    r.seconds = t.elapsed();
    return r;
}

CriterionResult criterion_analytic_vs_oracle(unsigned threads) {
    Timer t;
    CriterionResult r{6, "analytic pipeline vs jump-chain oracle", false, 0.0,
                      1e-4, "", 0.0};
    auto p = reference_params();
    auto dist = BatchDistribution::geometric(p.q);
    TransformBuilder::Options opt;
    opt.threads = threads;
    opt.n_series = 8;
    opt.b_levels = 4;
    TransformFamily family(p, 4, 4, opt);
    double worst = 0.0;
    for (double x : kOracleX)
        for (int n = 0; n <= 4; ++n)
            for (int b = 1; b <= 4; ++b) {
                double analytic = conditional_survival(family, n, b, x).raw;
                double oracle = ctmc_oracle(p.rho, dist, n, b, x, 400).mid();
                worst = std::max(worst, std::abs(analytic - oracle));
            }
    r.observed = worst;
    r.pass = worst <= r.tol;
    r.detail = "max |analytic - oracle| over n<=4, b<=4, x in {0.25..4} = " +
               std::to_string(worst);
    r.seconds = t.elapsed();
    return r;
}

CriterionResult criterion_classical_limit(unsigned threads) {
    Timer t;
    CriterionResult r{7, "classical single-job limit (q=0)", false, 0.0, 0.02,
                      "", 0.0};
    ModelParams p;
    p.rho = 0.5;
    p.q = 0.0;
    TransformBuilder::Options opt;
    opt.threads = threads;
    opt.n_series = 40;
    opt.b_levels = 1;
    TransformFamily family(p, 40, 1, opt);
    double mean = unconditional_moment1(family);

    SimulationOptions so;
    so.n_batches = 1000000;
    so.threads = threads;
    auto sim = simulate(p.rho, BatchDistribution::geometric(0.0), 424242, so);

    double analytic_err = std::abs(mean - 2.0);
    double sim_err = std::abs(sim.mean_sojourn - 2.0);
    r.observed = analytic_err;
    r.pass = analytic_err <= 0.02 && sim_err <= 3.0 * sim.mean_se;
    std::ostringstream os;
    os << "analytic mean " << mean << " (|err| " << analytic_err
       << ", tol 0.02); simulated mean " << sim.mean_sojourn << " +- "
       << sim.mean_se << " (|err| " << sim_err << ", tol 3 s.e.)";
    r.detail = os.str();
    r.seconds = t.elapsed();
    return r;
}

CriterionResult criterion_sim_concordance(unsigned threads) {
    Timer t;
    CriterionResult r{8, "simulation concordance (unconditional)", false, 0.0,
                      3.0, "", 0.0};
    auto p = reference_params();
    const std::vector<double> xs = {0.5, 1.0, 2.0, 4.0};
    TransformBuilder::Options opt;
    opt.threads = threads;
    opt.n_series = 25;
    opt.b_levels = 12;
    TransformFamily family(p, 25, 12, opt);

    SimulationOptions so;
    so.n_batches = 1000000;
    so.x_grid = xs;
    so.threads = threads;
    auto sim = simulate(p.rho, BatchDistribution::geometric(p.q), 20250810, so);

    double worst_sigma = 0.0;
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        auto a = unconditional_survival(family, xs[i]);
        double denom = std::max(sim.survival_se[i], 1e-12);
        double sigma = std::abs(a.raw - sim.survival[i]) / denom;
        worst_sigma = std::max(worst_sigma, sigma);
        os << "x=" << xs[i] << ": analytic " << a.raw << " sim " << sim.survival[i]
           << " (se " << sim.survival_se[i] << ", " << sigma << " s.e.); ";
    }
    r.observed = worst_sigma;
    r.pass = worst_sigma <= 3.0;
    r.detail = os.str();
    r.seconds = t.elapsed();
    return r;
}

CriterionResult criterion_inversion_selftest() {
    Timer t;
    CriterionResult r{9, "inversion self-test", false, 0.0, 1e-6, "", 0.0};
    double e1 = std::abs(gs_invert([](double s) { return 1.0 / (s + 1.0); }, 1.0) -
                         std::exp(-1.0));
    double e2 = std::abs(gs_invert([](double s) { return 1.0 / s; }, 0.7) - 1.0);
    double e3 = std::abs(
        gs_invert([](double s) { return (1.0 - std::pow(1.0 + s, -2.0)) / s; },
                  1.0) -
        2.0 * std::exp(-1.0));
    r.observed = std::max({e1, e2, e3});
    r.pass = r.observed <= r.tol;
    std::ostringstream os;
    os << "exp " << e1 << ", constant " << e2 << ", Erlang-2 " << e3;
    r.detail = os.str();
    r.seconds = t.elapsed();
    return r;
}

CriterionResult criterion_determinism(unsigned threads,
                                      const std::string& scratch) {
    Timer t;
    CriterionResult r{10, "determinism (byte-identical reruns)", false, 0.0, 0.0,
                      "", 0.0};
    Scenario sc;
    sc.params = reference_params();
    sc.seed = 1;
    XGrid grid{0.5, 4.0, 0.5};
    auto read_all = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream os;
        os << f.rdbuf();
        return os.str();
    };
    fs::path d1 = fs::path(scratch) / "determinism_run1";
    fs::path d2 = fs::path(scratch) / "determinism_run2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    auto o1 = run_pipeline(sc, d1.string(), grid, 2, 2, threads);
    auto o2 = run_pipeline(sc, d2.string(), grid, 2, 2, threads);
    bool same = o1.files.size() == o2.files.size();
    std::size_t mismatches = 0;
    if (same)
        for (std::size_t i = 0; i < o1.files.size(); ++i)
            if (read_all(o1.files[i]) != read_all(o2.files[i])) ++mismatches;
    r.pass = same && mismatches == 0;
    r.observed = double(mismatches);
    r.detail = std::to_string(o1.files.size()) + " artifacts, " +
               std::to_string(mismatches) + " byte mismatches";
    r.seconds = t.elapsed();
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(unsigned threads,
                                            const std::string& scratch_dir) {
    std::vector<CriterionResult> out;
    out.push_back(criterion_spectral());
    out.push_back(criterion_hypergeometric());
    out.push_back(criterion_cnc0(threads));
    out.push_back(criterion_pde(threads));
    out.push_back(criterion_oracle_triangle());
    out.push_back(criterion_analytic_vs_oracle(threads));
    out.push_back(criterion_classical_limit(threads));
    out.push_back(criterion_sim_concordance(threads));
    out.push_back(criterion_inversion_selftest());
    out.push_back(criterion_determinism(threads, scratch_dir));
    return out;
}

ComparisonReport compare(const Scenario& sc, const std::string& scratch_dir,
                         unsigned threads) {
    validate(sc.params);
    ComparisonReport rep;
    rep.scenario = sc;

    // stage diagnostics at the given scenario
    {
        std::mt19937_64 eng(7);
        SpectralWorst w;
        for (int i = 0; i < 200; ++i) {
            double s = runif(eng, 1e-4, 50.0);
            w.merge(spectral_battery(sc.params, s, eng));
        }
        rep.spectral_worst =
            std::max({w.bracket, w.c_sum, w.p_at_q, w.composition, w.deriv_rel});
    }
    {
        auto sd = spectral_data(sc.params, 1.0);
        auto table = build_moment_table(sd, 20, 1e-11, threads);
        auto bc = solve_triangular(sc.params, table);
        rep.cnc0_orders = cnc0_residual(sc.params, bc);
    }
    {
        TransformBuilder::Options opt;
        opt.threads = threads;
        TransformBuilder tb(sc.params, 1.0, opt);
        auto res = tb.pde_residual(25, 1e-3);
        rep.pde_first_order = res.first_order;
        rep.pde_transported = res.transported;
    }
    {
        TransformBuilder::Options opt;
        opt.threads = threads;
        opt.n_series = 8;
        opt.b_levels = 3;
        TransformFamily family(sc.params, 3, 3, opt);
        auto dist = BatchDistribution::geometric(sc.params.q);
        double worst = 0.0;
        for (double x : {0.5, 1.0, 2.0})
            for (int n = 0; n <= 3; ++n)
                for (int b = 1; b <= 3; ++b)
                    worst = std::max(
                        worst, std::abs(conditional_survival(family, n, b, x).raw -
                                        ctmc_oracle(sc.params.rho, dist, n, b, x).mid()));
        rep.grid_vs_ctmc = worst;
    }

    rep.criteria = run_acceptance(threads, scratch_dir);
    rep.pass = true;
    for (const auto& c : rep.criteria) rep.pass = rep.pass && c.pass;
    return rep;
}

std::string ComparisonReport::to_json() const {
    json j;
    j["scenario"] = json::parse(scenario.canonical_json());
    j["stage"] = {{"spectral_worst", spectral_worst},
                  {"cnc0_orders", cnc0_orders},
                  {"pde_first_order", pde_first_order},
                  {"pde_transported", pde_transported},
                  {"grid_vs_ctmc", grid_vs_ctmc}};
    j["criteria"] = json::array();
    for (const auto& c : criteria) {
        j["criteria"].push_back({{"id", c.id},
                                 {"name", c.name},
                                 {"pass", c.pass},
                                 {"observed", c.observed},
                                 {"tol", c.tol},
                                 {"detail", c.detail},
                                 {"seconds", c.seconds}});
    }
    j["pass"] = pass;
    return j.dump(2);
}

}  // namespace batchps
