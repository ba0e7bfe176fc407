#include "batchps/model.hpp"

#include <cmath>
#include <numeric>

namespace batchps {

void validate(const ModelParams& params) {
    if (!(params.q >= 0.0) || params.q >= 1.0)
        throw InvalidInput("q must lie in [0,1), got " + std::to_string(params.q));
    if (!(params.rho > 0.0))
        throw InvalidInput("rho must be positive, got " + std::to_string(params.rho));
    if (!(params.rho < 1.0 - params.q))
        throw InvalidInput("unstable: stability requires rho < 1 - q (rho=" +
                           std::to_string(params.rho) + ", 1-q=" +
                           std::to_string(1.0 - params.q) + ")");
    if (params.n_max < 1) throw InvalidInput("n_max must be >= 1");
    if (params.b_max < 1) throw InvalidInput("b_max must be >= 1");
    if (!(params.tol > 0.0)) throw InvalidInput("tol must be positive");
}

BatchDistribution BatchDistribution::geometric(double q) {
    if (!(q >= 0.0) || q >= 1.0) throw InvalidInput("geometric parameter must be in [0,1)");
    BatchDistribution d;
    d.kind = Kind::Geometric;
    d.q = q;
    return d;
}

BatchDistribution BatchDistribution::explicit_pmf(std::vector<double> probs,
                                                  double tol) {
    if (probs.empty()) throw InvalidInput("explicit batch pmf is empty");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw InvalidInput("batch pmf entries must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol)
        throw InvalidInput("batch pmf must sum to 1, got " + std::to_string(sum));
    BatchDistribution d;
    d.kind = Kind::Explicit;
    d.pmf = std::move(probs);
    return d;
}

double BatchDistribution::mean() const {
    if (kind == Kind::Geometric) return 1.0 / (1.0 - q);
    double m = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) m += double(i + 1) * pmf[i];
    return m;
}

double BatchDistribution::tail(int j) const {
    if (j <= 0) return 1.0;
    if (kind == Kind::Geometric) return std::pow(q, j);
    double t = 0.0;
    for (std::size_t i = j; i < pmf.size(); ++i) t += pmf[i];
    return t;
}

double batch_pmf(const BatchDistribution& dist, int b) {
    if (b < 1) throw InvalidInput("batch size must be >= 1");
    if (dist.kind == BatchDistribution::Kind::Geometric)
        return (1.0 - dist.q) * std::pow(dist.q, b - 1);
    return b <= int(dist.pmf.size()) ? dist.pmf[b - 1] : 0.0;
}

StationaryOccupancy stationary_occupancy(double rho,
                                         const BatchDistribution& dist,
                                         int n_max, double tol_mass) {
    if (n_max < 1) throw InvalidInput("n_max must be >= 1");
    double load = rho * dist.mean();
    if (!(load < 1.0)) throw InvalidInput("unstable: offered load >= 1");

    // Balance across the cut {0..n} | {n+1..}: the up-flow is
    // rho * sum_{k<=n} pi_k P(B > n-k), the down-flow pi_{n+1}. Summing the
    // global balance equations over 0..n gives exactly this form, and it is
    // forward-solvable without truncation bias inside the computed range.
    std::vector<double> u(n_max + 1);
    u[0] = 1.0;
    bool geometric = dist.kind == BatchDistribution::Kind::Geometric;
    double geo_acc = 0.0;  // running sum_{k<=n} u_k q^{n-k}
    for (int n = 0; n < n_max; ++n) {
        double flow;
        if (geometric) {
            geo_acc = geo_acc * dist.q + u[n];
            flow = geo_acc;
        } else {
            flow = 0.0;
            for (int k = 0; k <= n; ++k) flow += u[k] * dist.tail(n - k);
        }
        u[n + 1] = rho * flow;
    }

    double partial = std::accumulate(u.begin(), u.end(), 0.0);
    // geometric-ratio tail bound: u_{n+1}/u_n approaches a constant < 1
    double ratio = u[n_max] > 0 && u[n_max - 1] > 0 ? u[n_max] / u[n_max - 1] : 0.0;
    if (ratio >= 1.0)
        throw ComputeError("occupancy recursion not contracting; raise n_max");
    double tail_bound = u[n_max] * ratio / (1.0 - ratio);
    double total = partial + tail_bound;

    StationaryOccupancy occ;
    occ.pi.resize(n_max + 1);
    for (int n = 0; n <= n_max; ++n) occ.pi[n] = u[n] / total;
    occ.deficit = tail_bound / total;
    if (occ.deficit > tol_mass)
        throw ComputeError("occupancy truncation insufficient: deficit " +
                           std::to_string(occ.deficit) + " exceeds " +
                           std::to_string(tol_mass));
    return occ;
}

StationaryOccupancy stationary_occupancy(const ModelParams& params,
                                         double tol_mass) {
    validate(params);
    return stationary_occupancy(params.rho, BatchDistribution::geometric(params.q),
                                params.n_max, tol_mass);
}

}  // namespace batchps
