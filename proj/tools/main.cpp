#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "batchps/parallel.hpp"
#include "batchps/pipeline.hpp"

using namespace batchps;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct GlobalOpts {
    std::string scenario_path;
    double rho = -1.0, q = -1.0, tol = -1.0;
    int n_max = -1, b_max = -1;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    unsigned threads = 0;

    Scenario resolve() const {
        Scenario sc;
        if (!scenario_path.empty()) sc = Scenario::from_file(scenario_path);
        if (rho >= 0.0) sc.params.rho = rho;
        if (q >= 0.0) sc.params.q = q;
        if (n_max >= 0) sc.params.n_max = n_max;
        if (b_max >= 0) sc.params.b_max = b_max;
        if (tol >= 0.0) sc.params.tol = tol;
        sc.seed = seed;
        validate(sc.params);
        return sc;
    }
    unsigned n_threads() const {
        return threads == 0 ? default_threads() : threads;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "batchps: batch sojourn-time distribution in the M^[X]/M/1 "
        "processor-sharing queue (analytic transform pipeline + oracles)"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--scenario", g.scenario_path, "scenario JSON file");
    app.add_option("--rho", g.rho, "batch arrival rate");
    app.add_option("--q", g.q, "geometric batch parameter in [0,1)");
    app.add_option("--n-max", g.n_max, "occupancy truncation");
    app.add_option("--b-max", g.b_max, "batch-size truncation");
    app.add_option("--tol", g.tol, "relative tolerance");
    app.add_option("--out-dir", g.out_dir, "artifact directory");
    app.add_option("--seed", g.seed, "random seed (echoed into artifacts)");
    app.add_option("--threads", g.threads, "worker threads (0 = auto)");

    double s_node = 1.0;
    int bmax = 20, nmax = 10, cn = 0, cb = 1;
    std::string xgrid_spec = "0.05:10:0.05";
    int ntrunc = 400, btrunc = 4;
    std::uint64_t batches = 1000000;

    auto* c_spectral = app.add_subcommand("spectral", "per-s spectral record (JSON)");
    c_spectral->add_option("--s", s_node, "transform variable")->required();

    auto* c_kernels = app.add_subcommand("kernels", "moment table (CSV)");
    c_kernels->add_option("--s", s_node, "transform variable")->required();
    c_kernels->add_option("--bmax", bmax, "table order");

    auto* c_boundary = app.add_subcommand("boundary", "boundary coefficients (JSON)");
    c_boundary->add_option("--s", s_node, "transform variable")->required();
    c_boundary->add_option("--bmax", bmax, "series truncation");

    auto* c_transform = app.add_subcommand("transform", "conditional transform grid (CSV)");
    c_transform->add_option("--s", s_node, "transform variable")->required();
    c_transform->add_option("--nmax", nmax, "occupancy range");
    c_transform->add_option("--bmax", bmax, "batch range");

    auto* c_invert = app.add_subcommand("invert", "conditional survival curve (CSV)");
    c_invert->add_option("--n", cn, "occupancy at arrival")->required();
    c_invert->add_option("--b", cb, "batch size")->required();
    c_invert->add_option("--xgrid", xgrid_spec, "x grid a:b:step");

    auto* c_uncond = app.add_subcommand("unconditional", "stationary batch survival curve (CSV)");
    c_uncond->add_option("--xgrid", xgrid_spec, "x grid a:b:step");

    auto* c_oracle = app.add_subcommand("oracle", "ground-truth computations");
    c_oracle->require_subcommand(1);
    auto* c_ode = c_oracle->add_subcommand("ode", "bracketed differential-system solve (CSV)");
    c_ode->add_option("--ntrunc", ntrunc, "occupancy truncation");
    c_ode->add_option("--btrunc", btrunc, "batch truncation");
    c_ode->add_option("--xgrid", xgrid_spec, "x grid a:b:step");
    auto* c_ctmc = c_oracle->add_subcommand("ctmc", "uniformization brackets (CSV)");
    c_ctmc->add_option("--n", cn, "occupancy at arrival");
    c_ctmc->add_option("--b", cb, "batch size");
    c_ctmc->add_option("--ntrunc", ntrunc, "occupancy truncation");
    c_ctmc->add_option("--xgrid", xgrid_spec, "x grid a:b:step");
    auto* c_sim = c_oracle->add_subcommand("sim", "event-driven simulation (CSV)");
    c_sim->add_option("--batches", batches, "total batches");
    c_sim->add_option("--xgrid", xgrid_spec, "x grid a:b:step");

    auto* c_pipeline = app.add_subcommand("pipeline", "run all stages, write artifacts");
    c_pipeline->add_option("--xgrid", xgrid_spec, "x grid a:b:step");

    auto* c_compare = app.add_subcommand("compare",
                                         "stage diagnostics + acceptance criteria");

    CLI11_PARSE(app, argc, argv);

    try {
        const unsigned threads = g.n_threads();
        if (c_spectral->parsed()) {
            auto sc = g.resolve();
            auto sd = spectral_data(sc.params, s_node);
            json j{{"s", sd.s},           {"delta", sd.delta},
                   {"u_minus", sd.u_minus}, {"u_plus", sd.u_plus},
                   {"c_plus", sd.c_plus},   {"c_minus", sd.c_minus}};
            std::cout << j.dump(2) << "\n";
        } else if (c_kernels->parsed()) {
            auto sc = g.resolve();
            auto sd = spectral_data(sc.params, s_node);
            auto table = build_moment_table(sd, bmax, 1e-11, threads);
            std::cout << "b,l,M,K,err\n";
            for (int b = 1; b <= bmax; ++b)
                for (int l = 0; l <= b; ++l)
                    std::cout << b << "," << l << "," << fmt(table.m[b - 1][l])
                              << "," << fmt(table.k[b - 1]) << ","
                              << fmt(table.quad_err[b - 1]) << "\n";
        } else if (c_boundary->parsed()) {
            auto sc = g.resolve();
            auto sd = spectral_data(sc.params, s_node);
            auto table = build_moment_table(sd, bmax, 1e-11, threads);
            auto bc = solve_triangular(sc.params, table);
            bc.residual = cnc0_residual(sc.params, bc);
            json j{{"s", s_node}, {"e", bc.e}, {"residual", bc.residual}};
            std::cout << j.dump(2) << "\n";
        } else if (c_transform->parsed()) {
            auto sc = g.resolve();
            TransformBuilder::Options opt;
            opt.threads = threads;
            opt.n_series = std::max(nmax, 8);
            opt.b_levels = bmax;
            TransformBuilder tb(sc.params, s_node, opt);
            auto ct = tb.conditional_transform(nmax, bmax);
            std::cout << "n,b,value\n";
            for (int n = 0; n <= nmax; ++n)
                for (int b = 1; b <= bmax; ++b)
                    std::cout << n << "," << b << "," << fmt(ct.grid[n][b - 1]) << "\n";
        } else if (c_invert->parsed()) {
            auto sc = g.resolve();
            auto grid = XGrid::parse(xgrid_spec);
            TransformBuilder::Options opt;
            opt.threads = threads;
            opt.n_series = std::max(cn, 8);
            opt.b_levels = std::max(cb, 1);
            TransformFamily family(sc.params, std::max(cn, 1), std::max(cb, 1), opt);
            std::cout << "x,survival,raw,err\n";
            for (double x : grid.points()) {
                auto p = conditional_survival(family, cn, cb, x);
                std::cout << fmt(x) << "," << fmt(p.value) << "," << fmt(p.raw)
                          << "," << fmt(p.err) << "\n";
            }
        } else if (c_uncond->parsed()) {
            auto sc = g.resolve();
            auto grid = XGrid::parse(xgrid_spec);
            TransformBuilder::Options opt;
            opt.threads = threads;
            opt.n_series = 25;
            opt.b_levels = 12;
            TransformFamily family(sc.params, 25, 12, opt);
            std::cout << "x,survival,raw,err,bracket\n";
            for (double x : grid.points()) {
                auto p = unconditional_survival(family, x);
                std::cout << fmt(x) << "," << fmt(p.value) << "," << fmt(p.raw)
                          << "," << fmt(p.err) << "," << fmt(p.bracket) << "\n";
            }
        } else if (c_ode->parsed()) {
            auto sc = g.resolve();
            auto grid = XGrid::parse(xgrid_spec);
            auto xs = grid.points();
            auto sol = ode_oracle(sc.params.rho,
                                  BatchDistribution::geometric(sc.params.q), xs,
                                  ntrunc, btrunc);
            std::cout << "n,b,x,lower,upper\n";
            for (std::size_t xi = 0; xi < xs.size(); ++xi)
                for (int n = 0; n <= std::min(ntrunc, 10); ++n)
                    for (int b = 1; b <= btrunc; ++b)
                        std::cout << n << "," << b << "," << fmt(xs[xi]) << ","
                                  << fmt(sol.lower[xi][n][b - 1]) << ","
                                  << fmt(sol.upper[xi][n][b - 1]) << "\n";
        } else if (c_ctmc->parsed()) {
            auto sc = g.resolve();
            auto grid = XGrid::parse(xgrid_spec);
            std::cout << "n,b,x,lower,upper\n";
            for (double x : grid.points()) {
                auto br = ctmc_oracle(sc.params.rho,
                                      BatchDistribution::geometric(sc.params.q),
                                      cn, cb, x, ntrunc);
                std::cout << cn << "," << cb << "," << fmt(x) << ","
                          << fmt(br.lower) << "," << fmt(br.upper) << "\n";
            }
        } else if (c_sim->parsed()) {
            auto sc = g.resolve();
            auto grid = XGrid::parse(xgrid_spec);
            SimulationOptions so;
            so.n_batches = batches;
            so.x_grid = grid.points();
            so.threads = threads;
            auto sim = simulate(sc.params.rho,
                                BatchDistribution::geometric(sc.params.q),
                                sc.seed, so);
            std::cout << "x,estimate,stderr\n";
            for (std::size_t i = 0; i < sim.x.size(); ++i)
                std::cout << fmt(sim.x[i]) << "," << fmt(sim.survival[i]) << ","
                          << fmt(sim.survival_se[i]) << "\n";
            std::cout << "# seed," << sim.seed << "\n";
            std::cout << "# batches," << sim.batches << "\n";
            std::cout << "# mean," << fmt(sim.mean_sojourn) << "," << fmt(sim.mean_se)
                      << "\n";
        } else if (c_pipeline->parsed()) {
            auto sc = g.resolve();
            auto grid = XGrid::parse(xgrid_spec);
            auto outs = run_pipeline(sc, g.out_dir, grid, 4, 4, threads);
            for (const auto& f : outs.files) std::cout << f << "\n";
        } else if (c_compare->parsed()) {
            auto sc = g.resolve();
            auto rep = compare(sc, g.out_dir, threads);
            for (const auto& c : rep.criteria)
                std::printf("criterion %02d [%s] %s: %s [%.1fs]\n", c.id,
                            c.pass ? "PASS" : "FAIL", c.name.c_str(),
                            c.detail.c_str(), c.seconds);
            std::filesystem::create_directories(g.out_dir);
            auto path = std::filesystem::path(g.out_dir) /
                        ("report_" + sc.hash() + ".json");
            std::ofstream f(path);
            f << rep.to_json() << "\n";
            std::cout << (rep.pass ? "ALL CRITERIA PASS" : "CRITERIA FAILED")
                      << " (report: " << path.string() << ")\n";
            return rep.pass ? 0 : 1;
        }
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
