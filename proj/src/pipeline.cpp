#include "batchps/pipeline.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace batchps {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Scenario Scenario::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InvalidInput(std::string("scenario parse error: ") + e.what());
    }
    Scenario sc;
    if (j.contains("rho")) sc.params.rho = j["rho"].get<double>();
    if (j.contains("q")) sc.params.q = j["q"].get<double>();
    if (j.contains("n_max")) sc.params.n_max = j["n_max"].get<int>();
    if (j.contains("b_max")) sc.params.b_max = j["b_max"].get<int>();
    if (j.contains("tol")) sc.params.tol = j["tol"].get<double>();
    if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();
    return sc;
}

std::string Scenario::canonical_json() const {
    std::string s = "{\"rho\":" + fmt(params.rho) + ",\"q\":" + fmt(params.q) +
                    ",\"n_max\":" + std::to_string(params.n_max) +
                    ",\"b_max\":" + std::to_string(params.b_max) +
                    ",\"tol\":" + fmt(params.tol) +
                    ",\"seed\":" + std::to_string(seed) + "}";
    return s;
}

std::string Scenario::hash() const { return hex64(fnv1a64(canonical_json())); }

std::vector<double> XGrid::points() const {
    std::vector<double> xs;
    for (int i = 0;; ++i) {
        double x = start + i * step;
        if (x > stop + 1e-12) break;
        xs.push_back(x);
    }
    return xs;
}

XGrid XGrid::parse(const std::string& spec) {
    XGrid g;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &g.start, &g.stop, &g.step) != 3)
        throw InvalidInput("bad x-grid spec (want a:b:step): " + spec);
    if (!(g.start > 0.0) || !(g.step > 0.0) || !(g.stop >= g.start))
        throw InvalidInput("x-grid must satisfy 0 < a <= b, step > 0");
    return g;
}

PipelineOutputs run_pipeline(const Scenario& sc, const std::string& out_dir,
                             const XGrid& grid, int cond_n, int cond_b,
                             unsigned threads) {
    validate(sc.params);
    fs::create_directories(out_dir);
    const std::string h = sc.hash();
    PipelineOutputs outs;
    auto path = [&](const std::string& stem, const std::string& ext) {
        return (fs::path(out_dir) / (stem + "_" + h + "." + ext)).string();
    };
    auto open = [&](const std::string& p) {
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) throw ComputeError("cannot write artifact: " + p);
        outs.files.push_back(p);
        return f;
    };

    {
        auto f = open(path("scenario", "json"));
        f << sc.canonical_json() << "\n";
    }

    auto occ = stationary_occupancy(sc.params);
    {
        auto f = open(path("occupancy", "csv"));
        f << "n,pi\n";
        for (std::size_t n = 0; n < occ.pi.size(); ++n)
            f << n << "," << fmt(occ.pi[n]) << "\n";
        f << "# deficit," << fmt(occ.deficit) << "\n";
    }

    const auto xs = grid.points();
    std::set<double> s_nodes;
    for (double x : xs)
        for (int k = 1; k <= 14; ++k) s_nodes.insert(k * M_LN2 / x);

    {
        auto f = open(path("spectral", "csv"));
        f << "s,delta,u_minus,u_plus,c_plus,c_minus\n";
        for (double s : s_nodes) {
            auto sd = spectral_data(sc.params, s);
            f << fmt(s) << "," << fmt(sd.delta) << "," << fmt(sd.u_minus) << ","
              << fmt(sd.u_plus) << "," << fmt(sd.c_plus) << "," << fmt(sd.c_minus)
              << "\n";
        }
    }

    {
        // boundary coefficients at the reference node s = 1
        auto sd = spectral_data(sc.params, 1.0);
        auto table = build_moment_table(sd, 20, 1e-11, threads);
        auto bc = solve_triangular(sc.params, table);
        bc.residual = cnc0_residual(sc.params, bc);
        json j;
        j["s"] = 1.0;
        j["e"] = bc.e;
        j["residual"] = bc.residual;
        auto f = open(path("boundary_s1", "json"));
        f << j.dump(2) << "\n";
    }

    TransformBuilder::Options opt;
    opt.threads = threads;
    opt.n_series = std::max(25, cond_n);
    opt.b_levels = std::max(12, cond_b);
    TransformFamily family(sc.params, opt.n_series, opt.b_levels, opt);

    {
        auto f = open(path("survival_conditional", "csv"));
        f << "n,b,x,survival,raw,err\n";
        for (int n = 0; n <= cond_n; ++n)
            for (int b = 1; b <= cond_b; ++b)
                for (double x : xs) {
                    auto p = conditional_survival(family, n, b, x);
                    f << n << "," << b << "," << fmt(x) << "," << fmt(p.value)
                      << "," << fmt(p.raw) << "," << fmt(p.err) << "\n";
                }
    }
    {
        auto f = open(path("survival_unconditional", "csv"));
        f << "x,survival,raw,err,bracket\n";
        for (double x : xs) {
            auto p = unconditional_survival(family, x);
            f << fmt(x) << "," << fmt(p.value) << "," << fmt(p.raw) << ","
              << fmt(p.err) << "," << fmt(p.bracket) << "\n";
        }
    }
    return outs;
}

}  // namespace batchps
