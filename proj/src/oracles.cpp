#include "batchps/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "batchps/parallel.hpp"

namespace batchps {

namespace {

// ---- differential-system right-hand side --------------------------------

struct OdeSystem {
    double rho;
    const BatchDistribution* dist;
    int N, B;
    double closure;  // 0 (lower) or 1 (upper) for rows above N

    // y indexed y[b-1]*(N+1) + n
    void rhs(const std::vector<double>& y, std::vector<double>& dy) const {
        const bool geo = dist->kind == BatchDistribution::Kind::Geometric;
        const double q = dist->q;
        std::vector<double> S(N + 1);
        for (int b = 1; b <= B; ++b) {
            const double* Eb = y.data() + std::size_t(b - 1) * (N + 1);
            const double* Ebm1 =
                b >= 2 ? y.data() + std::size_t(b - 2) * (N + 1) : nullptr;
            double* out = dy.data() + std::size_t(b - 1) * (N + 1);
            if (geo) {
                // S_n = sum_m q_m E_{n+m}; backward recursion with the closure
                // value standing in for every row above N
                double s_next = closure;
                for (int n = N; n >= 0; --n) {
                    double e_next = n + 1 <= N ? Eb[n + 1] : closure;
                    S[n] = (1.0 - q) * e_next + q * s_next;
                    s_next = S[n];
                }
            } else {
                const auto& pmf = dist->pmf;
                for (int n = 0; n <= N; ++n) {
                    double acc = 0.0;
                    for (std::size_t m = 1; m <= pmf.size(); ++m) {
                        double e = n + int(m) <= N ? Eb[n + m] : closure;
                        acc += pmf[m - 1] * e;
                    }
                    S[n] = acc;
                }
            }
            for (int n = 0; n <= N; ++n) {
                double v = rho * S[n] - (1.0 + rho) * Eb[n];
                double nb = double(n + b);
                if (n >= 1) v += (n / nb) * Eb[n - 1];
                if (b >= 2) v += (b / nb) * Ebm1[n];
                else v += 0.0;  // E_{n,0} = 0
                out[n] = v;
            }
        }
    }
};

// Dormand-Prince 5(4) with step-size control, stopping exactly on grid points.
void integrate_dp(const OdeSystem& sys, std::vector<double>& y,
                  const std::vector<double>& x_grid, double rel_tol,
                  std::vector<std::vector<double>>& snapshots) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const std::size_t dim = y.size();
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim),
        k7(dim), tmp(dim), y5(dim);
    double x = 0.0, hstep = 0.01;
    const double abs_tol = 1e-12;
    (void)c2; (void)c3; (void)c4; (void)c5;
    sys.rhs(y, k1);
    for (double target : x_grid) {
        while (x < target) {
            double h = std::min(hstep, target - x);
            bool accept = false;
            while (!accept) {
                for (std::size_t i = 0; i < dim; ++i)
                    tmp[i] = y[i] + h * a21 * k1[i];
                sys.rhs(tmp, k2);
                for (std::size_t i = 0; i < dim; ++i)
                    tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
                sys.rhs(tmp, k3);
                for (std::size_t i = 0; i < dim; ++i)
                    tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
                sys.rhs(tmp, k4);
                for (std::size_t i = 0; i < dim; ++i)
                    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                         a54 * k4[i]);
                sys.rhs(tmp, k5);
                for (std::size_t i = 0; i < dim; ++i)
                    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                         a64 * k4[i] + a65 * k5[i]);
                sys.rhs(tmp, k6);
                for (std::size_t i = 0; i < dim; ++i)
                    y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                        b5 * k5[i] + b6 * k6[i]);
                sys.rhs(y5, k7);
                double err = 0.0;
                for (std::size_t i = 0; i < dim; ++i) {
                    double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                    e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                    double sc = abs_tol + rel_tol * std::abs(y5[i]);
                    err = std::max(err, std::abs(e) / sc);
                }
                if (err <= 1.0) {
                    accept = true;
                    x += h;
                    y.swap(y5);
                    k1.swap(k7);  // FSAL
                }
                double factor = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                hstep = h * std::clamp(factor, 0.2, 5.0);
                if (!accept) h = std::min(hstep, target - x);
                if (h < 1e-12)
                    throw ComputeError("differential oracle: step size underflow");
            }
        }
        snapshots.push_back(y);
    }
}

}  // namespace

OdeSolution ode_oracle(double rho, const BatchDistribution& dist,
                       const std::vector<double>& x_grid, int n_trunc,
                       int b_trunc, double rel_tol, double bracket_tol) {
    if (n_trunc < 1 || b_trunc < 1) throw InvalidInput("bad truncation");
    for (std::size_t i = 1; i < x_grid.size(); ++i)
        if (x_grid[i] <= x_grid[i - 1])
            throw InvalidInput("x grid must be strictly increasing");
    OdeSolution sol;
    sol.x = x_grid;
    sol.n_trunc = n_trunc;
    sol.b_trunc = b_trunc;

    const std::size_t dim = std::size_t(n_trunc + 1) * b_trunc;
    for (double closure : {0.0, 1.0}) {
        OdeSystem sys{rho, &dist, n_trunc, b_trunc, closure};
        std::vector<double> y(dim, 1.0);
        std::vector<std::vector<double>> snaps;
        integrate_dp(sys, y, x_grid, rel_tol, snaps);
        auto& dst = closure == 0.0 ? sol.lower : sol.upper;
        dst.resize(x_grid.size());
        for (std::size_t xi = 0; xi < x_grid.size(); ++xi) {
            dst[xi].assign(n_trunc + 1, std::vector<double>(b_trunc));
            for (int b = 1; b <= b_trunc; ++b)
                for (int n = 0; n <= n_trunc; ++n)
                    dst[xi][n][b - 1] = snaps[xi][std::size_t(b - 1) * (n_trunc + 1) + n];
        }
    }
    double worst = 0.0;
    std::size_t last = x_grid.size() - 1;
    for (int b = 1; b <= b_trunc; ++b)
        worst = std::max(worst, sol.width(int(last), 0, b));
    if (worst > bracket_tol)
        throw ComputeError("differential oracle bracket too wide (" +
                           std::to_string(worst) + "); raise n_trunc");
    return sol;
}

Bracket ctmc_oracle(double rho, const BatchDistribution& dist, int n, int b,
                    double x, int n_ctmc) {
    if (n < 0 || b < 1) throw InvalidInput("ctmc_oracle requires n >= 0, b >= 1");
    if (!(x >= 0.0)) throw InvalidInput("x must be nonnegative");
    if (n > n_ctmc) throw InvalidInput("start state beyond truncation");
    if (x == 0.0) return {1.0, 1.0};

    const double lam = 1.0 + rho;
    const double lx = lam * x;
    // Poisson weights to a 1e-12 tail
    std::vector<double> pois;
    {
        double p = std::exp(-lx), cum = p;
        pois.push_back(p);
        int k = 0;
        while (cum < 1.0 - 1e-12 && k < 20000) {
            ++k;
            p *= lx / k;
            pois.push_back(p);
            cum += p;
        }
    }
    const int k_max = int(pois.size()) - 1;

    Bracket out;
    for (int pass = 0; pass < 2; ++pass) {
        const bool lower = pass == 0;
        // state[b-1][n]; overflow mass is absorbed (lower) or parked alive
        // forever (upper)
        std::vector<std::vector<double>> v(b, std::vector<double>(n_ctmc + 1, 0.0));
        v[b - 1][n] = 1.0;
        double limbo = 0.0;  // alive mass beyond the truncation (upper only)
        double survival = pois[0] * 1.0;
        double transient = 1.0;
        const double q = dist.q;
        std::vector<std::vector<double>> nv(b, std::vector<double>(n_ctmc + 1));
        for (int k = 1; k <= k_max; ++k) {
            for (auto& row : nv) std::fill(row.begin(), row.end(), 0.0);
            double overflow = 0.0;
            for (int bb = 1; bb <= b; ++bb) {
                const auto& cur = v[bb - 1];
                // departures
                for (int m = 0; m <= n_ctmc; ++m) {
                    double mass = cur[m];
                    if (mass == 0.0) continue;
                    double nb = double(m + bb);
                    double p_tag = (1.0 / lam) * (bb / nb);
                    double p_other = (1.0 / lam) * (m / nb);
                    if (bb >= 2) nv[bb - 2][m] += mass * p_tag;
                    // bb == 1: tagged batch finishes -> absorbed
                    if (m >= 1) nv[bb - 1][m - 1] += mass * p_other;
                }
                // arrivals shift n upward
                if (dist.kind == BatchDistribution::Kind::Geometric) {
                    double run = 0.0;  // sum_{j<m} cur[j] q^{m-1-j}
                    for (int m = 1; m <= n_ctmc; ++m) {
                        run = run * q + cur[m - 1];
                        nv[bb - 1][m] += (rho / lam) * (1.0 - q) * run;
                    }
                    // overflow beyond n_ctmc: remaining geometric tail
                    double tail = 0.0;
                    for (int j = 0; j <= n_ctmc; ++j)
                        tail += cur[j] * std::pow(q, n_ctmc - j);
                    overflow += (rho / lam) * tail * 1.0;  // P(B > n_ctmc - j) = q^{...}
                } else {
                    const auto& pmf = dist.pmf;
                    for (int j = 0; j <= n_ctmc; ++j) {
                        double mass = cur[j];
                        if (mass == 0.0) continue;
                        for (std::size_t m = 1; m <= pmf.size(); ++m) {
                            if (j + int(m) <= n_ctmc)
                                nv[bb - 1][j + m] += mass * (rho / lam) * pmf[m - 1];
                            else
                                overflow += mass * (rho / lam) * pmf[m - 1];
                        }
                    }
                }
            }
            v.swap(nv);
            if (!lower) limbo += overflow;
            transient = limbo;
            for (const auto& row : v)
                for (double m : row) transient += m;
            survival += pois[k] * transient;
        }
        // Poisson tail: alive mass can only shrink, so the truncated sum is a
        // lower bound; adding the full tail mass bounds from above.
        double tail_mass = 1.0;
        for (double p : pois) tail_mass -= p;
        if (lower)
            out.lower = survival;
        else
            out.upper = std::min(1.0, survival + std::max(0.0, tail_mass));
    }
    return out;
}

namespace {

// ---- event-driven processor-sharing simulation ---------------------------

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32),
                          std::uint32_t(stream), std::uint32_t(stream >> 32),
                          0x9e3779b9u};
        eng = std::mt19937_64(seq);
    }
    double uniform() {  // in (0,1)
        return (double(eng() >> 11) + 0.5) * 0x1.0p-53;
    }
    double exponential(double rate) { return -std::log(uniform()) / rate; }
};

int sample_batch(const BatchDistribution& dist, Rng& rng) {
    if (dist.kind == BatchDistribution::Kind::Geometric) {
        if (dist.q == 0.0) return 1;
        double u = rng.uniform();
        return 1 + int(std::floor(std::log(u) / std::log(dist.q)));
    }
    double u = rng.uniform(), cum = 0.0;
    for (std::size_t i = 0; i < dist.pmf.size(); ++i) {
        cum += dist.pmf[i];
        if (u <= cum) return int(i + 1);
    }
    return int(dist.pmf.size());
}

struct BatchRec {
    double arrival = 0.0;
    int remaining = 0;
    int n_at_arrival = 0;
    int size = 0;
    bool tracked = false;
};

struct RepStats {
    double sum_sojourn = 0.0;
    std::size_t n_sojourn = 0;
    std::vector<double> exceed;             // counts > x per grid point
    std::vector<double> occ_counts;         // occupancy at arrival histogram
    std::size_t occ_total = 0;
    // [n][b-1]: count, sum, exceed-per-x
    struct Cell {
        std::size_t count = 0;
        double sum = 0.0;
        std::vector<double> exceed;
    };
    std::vector<std::vector<Cell>> cond;
};

void run_replication(double rho, const BatchDistribution& dist,
                     std::uint64_t seed, std::uint64_t rep,
                     std::size_t n_batches, double warmup_frac,
                     const std::vector<double>& xg, int n_cap, int b_cap,
                     int occ_cap, RepStats& st) {
    Rng rng(seed, rep);
    st.exceed.assign(xg.size(), 0.0);
    st.occ_counts.assign(occ_cap + 1, 0.0);
    st.cond.assign(n_cap + 1, std::vector<RepStats::Cell>(b_cap));
    for (auto& row : st.cond)
        for (auto& c : row) c.exceed.assign(xg.size(), 0.0);

    const std::size_t warmup = std::size_t(warmup_frac * double(n_batches));
    std::vector<BatchRec> batches;
    batches.reserve(n_batches + 16);
    std::vector<std::uint32_t> jobs;  // batch index per job in service
    jobs.reserve(1024);
    double t = 0.0;
    std::size_t arrived = 0, open_tracked = 0;

    auto record = [&](const BatchRec& b, double sojourn) {
        st.sum_sojourn += sojourn;
        ++st.n_sojourn;
        for (std::size_t i = 0; i < xg.size(); ++i)
            if (sojourn > xg[i]) st.exceed[i] += 1.0;
        if (b.n_at_arrival <= n_cap && b.size <= b_cap) {
            auto& c = st.cond[b.n_at_arrival][b.size - 1];
            ++c.count;
            c.sum += sojourn;
            for (std::size_t i = 0; i < xg.size(); ++i)
                if (sojourn > xg[i]) c.exceed[i] += 1.0;
        }
    };

    while (arrived < n_batches || open_tracked > 0) {
        const std::size_t k = jobs.size();
        double total_rate = rho + (k > 0 ? 1.0 : 0.0);
        if (total_rate == 0.0) break;
        t += rng.exponential(total_rate);
        bool arrival = rng.uniform() * total_rate < rho;
        if (arrival) {
            int bsz = sample_batch(dist, rng);
            BatchRec rec;
            rec.arrival = t;
            rec.remaining = bsz;
            rec.n_at_arrival = int(k);
            rec.size = bsz;
            rec.tracked = arrived < n_batches && arrived >= warmup;
            bool counted = arrived < n_batches;
            ++arrived;
            if (rec.tracked) {
                ++open_tracked;
                if (int(k) <= occ_cap) st.occ_counts[k] += 1.0;
                st.occ_total += 1;
            }
            (void)counted;
            batches.push_back(rec);
            std::uint32_t id = std::uint32_t(batches.size() - 1);
            for (int i = 0; i < bsz; ++i) jobs.push_back(id);
        } else if (k > 0) {
            std::size_t idx = std::size_t(rng.uniform() * double(k));
            if (idx >= k) idx = k - 1;
            std::uint32_t id = jobs[idx];
            jobs[idx] = jobs.back();
            jobs.pop_back();
            BatchRec& rec = batches[id];
            if (--rec.remaining == 0) {
                if (rec.tracked) {
                    record(rec, t - rec.arrival);
                    --open_tracked;
                }
            }
        }
    }
}

void combine(const std::vector<double>& per_rep_means, double& mean, double& se) {
    const std::size_t R = per_rep_means.size();
    mean = 0.0;
    for (double v : per_rep_means) mean += v;
    mean /= double(R);
    double var = 0.0;
    for (double v : per_rep_means) var += (v - mean) * (v - mean);
    se = R > 1 ? std::sqrt(var / double(R - 1) / double(R)) : 0.0;
}

}  // namespace

SimulationResult simulate(double rho, const BatchDistribution& dist,
                          std::uint64_t seed, const SimulationOptions& opt) {
    if (!(rho > 0.0)) throw InvalidInput("simulate requires rho > 0");
    if (!(rho * dist.mean() < 1.0)) throw InvalidInput("unstable parameters");
    const int R = opt.replications;
    if (R < 2) throw InvalidInput("need at least 2 replications");
    const std::size_t per_rep = opt.n_batches / std::size_t(R);
    const int occ_cap = 40;

    std::vector<RepStats> stats(R);
    parallel_for(std::size_t(R), opt.threads, [&](std::size_t r) {
        run_replication(rho, dist, seed, r, per_rep, opt.warmup_frac, opt.x_grid,
                        opt.cond_n_cap, opt.cond_b_cap, occ_cap, stats[r]);
    });

    SimulationResult out;
    out.seed = seed;
    out.replications = R;
    out.batches = per_rep * std::size_t(R);
    out.x = opt.x_grid;

    std::vector<double> means(R);
    for (int r = 0; r < R; ++r)
        means[r] = stats[r].sum_sojourn / std::max<std::size_t>(1, stats[r].n_sojourn);
    combine(means, out.mean_sojourn, out.mean_se);

    out.survival.resize(opt.x_grid.size());
    out.survival_se.resize(opt.x_grid.size());
    for (std::size_t i = 0; i < opt.x_grid.size(); ++i) {
        for (int r = 0; r < R; ++r)
            means[r] = stats[r].exceed[i] / std::max<std::size_t>(1, stats[r].n_sojourn);
        combine(means, out.survival[i], out.survival_se[i]);
    }

    out.occupancy.resize(occ_cap + 1);
    out.occupancy_se.resize(occ_cap + 1);
    for (int n = 0; n <= occ_cap; ++n) {
        for (int r = 0; r < R; ++r)
            means[r] = stats[r].occ_counts[n] / std::max<std::size_t>(1, stats[r].occ_total);
        combine(means, out.occupancy[n], out.occupancy_se[n]);
    }

    out.conditional.assign(opt.cond_n_cap + 1,
                           std::vector<ConditionalCell>(opt.cond_b_cap));
    for (int n = 0; n <= opt.cond_n_cap; ++n) {
        for (int b = 1; b <= opt.cond_b_cap; ++b) {
            ConditionalCell& cell = out.conditional[n][b - 1];
            for (int r = 0; r < R; ++r) cell.count += stats[r].cond[n][b - 1].count;
            if (cell.count == 0) continue;
            for (int r = 0; r < R; ++r) {
                auto& c = stats[r].cond[n][b - 1];
                means[r] = c.count ? c.sum / double(c.count) : 0.0;
            }
            combine(means, cell.mean, cell.mean_se);
            cell.survival.resize(opt.x_grid.size());
            cell.survival_se.resize(opt.x_grid.size());
            for (std::size_t i = 0; i < opt.x_grid.size(); ++i) {
                for (int r = 0; r < R; ++r) {
                    auto& c = stats[r].cond[n][b - 1];
                    means[r] = c.count ? c.exceed[i] / double(c.count) : 0.0;
                }
                combine(means, cell.survival[i], cell.survival_se[i]);
            }
        }
    }
    return out;
}

TransientResult simulate_transient(double rho, const BatchDistribution& dist,
                                   int n0, int b0, std::size_t trials,
                                   std::uint64_t seed,
                                   const std::vector<double>& x_grid,
                                   unsigned threads) {
    if (n0 < 0 || b0 < 1) throw InvalidInput("bad transient start state");
    if (rho > 0.0 && !(rho * dist.mean() < 1.0))
        throw InvalidInput("unstable parameters");
    const int R = 20;
    const std::size_t per_rep = std::max<std::size_t>(1, trials / R);

    struct Stat {
        double sum = 0.0;
        std::vector<double> exceed;
    };
    std::vector<Stat> stats(R);
    parallel_for(std::size_t(R), threads, [&](std::size_t r) {
        Rng rng(seed, 0x7000000 + r);
        Stat& st = stats[r];
        st.exceed.assign(x_grid.size(), 0.0);
        for (std::size_t trial = 0; trial < per_rep; ++trial) {
            // jobs: tagged flag per job
            std::vector<char> jobs(n0 + b0, 0);
            for (int i = 0; i < b0; ++i) jobs[n0 + i] = 1;
            int tagged_left = b0;
            double t = 0.0;
            while (tagged_left > 0) {
                std::size_t k = jobs.size();
                double rate = rho + (k > 0 ? 1.0 : 0.0);
                t += rng.exponential(rate);
                bool arrival = rng.uniform() * rate < rho;
                if (arrival) {
                    int bsz = sample_batch(dist, rng);
                    jobs.insert(jobs.end(), bsz, 0);
                } else {
                    std::size_t idx = std::size_t(rng.uniform() * double(k));
                    if (idx >= k) idx = k - 1;
                    if (jobs[idx]) --tagged_left;
                    jobs[idx] = jobs.back();
                    jobs.pop_back();
                }
            }
            st.sum += t;
            for (std::size_t i = 0; i < x_grid.size(); ++i)
                if (t > x_grid[i]) st.exceed[i] += 1.0;
        }
    });

    TransientResult out;
    out.count = per_rep * R;
    out.x = x_grid;
    std::vector<double> means(R);
    for (int r = 0; r < R; ++r) means[r] = stats[r].sum / double(per_rep);
    combine(means, out.mean, out.se);
    out.survival.resize(x_grid.size());
    out.survival_se.resize(x_grid.size());
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        for (int r = 0; r < R; ++r) means[r] = stats[r].exceed[i] / double(per_rep);
        combine(means, out.survival[i], out.survival_se[i]);
    }
    return out;
}

}  // namespace batchps
