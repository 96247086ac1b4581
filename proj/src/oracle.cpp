#include "tising/oracle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>

#include "tising/landscape.hpp"
#include "tising/mple.hpp"
#include "tising/parallel.hpp"
#include "tising/stats.hpp"

namespace tising::oracle {

namespace {

constexpr int kEnumGuard = 22;
constexpr double kInf = std::numeric_limits<double>::infinity();

double ipow(double base, int exp) {
    double r = 1.0, b = base;
    for (int e = exp; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
    }
    return r;
}

// per-edge vertex bitmasks for O(popcount) Hamiltonian evaluation over the
// configuration index (bit i set <=> spin i is +1)
struct EnumContext {
    int n = 0;
    int p = 0;
    bool curie_weiss = false;
    double fact_p = 1.0;
    std::vector<std::uint32_t> masks;
    std::vector<double> weights;

    explicit EnumContext(const InteractionTensor& t) : n(t.n()), p(t.order()) {
        if (n > kEnumGuard) throw std::invalid_argument("enumeration guard: N > 22");
        if (t.storage() == TensorStorage::CurieWeissDense) {
            curie_weiss = true;
            return;
        }
        fact_p = t.factorial(p);
        masks.reserve(t.edge_count());
        weights = t.edge_weights();
        for (std::size_t e = 0; e < t.edge_count(); ++e) {
            const int* v = t.edge_vertices(e);
            std::uint32_t m = 0;
            for (int k = 0; k < p; ++k) m |= (1u << v[k]);
            masks.push_back(m);
        }
    }

    double hamiltonian(std::uint32_t idx) const {
        if (curie_weiss) {
            int plus = std::popcount(idx);
            double xbar = static_cast<double>(2 * plus - n) / n;
            return n * ipow(xbar, p);
        }
        double h = 0.0;
        for (std::size_t e = 0; e < masks.size(); ++e) {
            int minus = p - std::popcount(idx & masks[e]);
            h += (minus & 1) ? -weights[e] : weights[e];
        }
        return fact_p * h;
    }
};

double log_weight_total(const EnumContext& ctx, double beta) {
    const std::int64_t total = std::int64_t{1} << ctx.n;
    auto range_lse = std::function<double(std::int64_t, std::int64_t)>(
        [&](std::int64_t lo, std::int64_t hi) {
            stats::LogSumExp lse;
            for (std::int64_t i = lo; i < hi; ++i)
                lse.add(beta * ctx.hamiltonian(static_cast<std::uint32_t>(i)));
            return lse.value();
        });
    auto fold = std::function<double(const double&, const double&)>(
        [](const double& a, const double& b) { return stats::logsumexp_pair(a, b); });
    return ranged_reduce<double>(total, 64, range_lse, fold);
}

}  // namespace

void ExactDistribution::normalize() {
    stats::LogSumExp lse;
    for (double w : log_weights) lse.add(w);
    double z = lse.value();
    for (double& w : log_weights) w -= z;
    normalized = true;
}

double ExactDistribution::prob(std::size_t i) const {
    if (!normalized) throw std::logic_error("ExactDistribution: call normalize() first");
    return std::exp(log_weights[i]);
}

double ExactDistribution::mean() const {
    if (!normalized) throw std::logic_error("ExactDistribution: call normalize() first");
    double m = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) m += support[i] * prob(i);
    return m;
}

double ExactDistribution::mass_where(const std::function<bool(double)>& pred) const {
    if (!normalized) throw std::logic_error("ExactDistribution: call normalize() first");
    double m = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i)
        if (pred(support[i])) m += prob(i);
    return m;
}

double exact_log_partition(const InteractionTensor& tensor, double beta) {
    EnumContext ctx(tensor);
    return log_weight_total(ctx, beta) - tensor.n() * std::log(2.0);
}

double exact_mean_hamiltonian(const InteractionTensor& tensor, double beta) {
    EnumContext ctx(tensor);
    const double logz = log_weight_total(ctx, beta);
    const std::int64_t total = std::int64_t{1} << ctx.n;
    auto range_sum = std::function<double(std::int64_t, std::int64_t)>(
        [&](std::int64_t lo, std::int64_t hi) {
            double s = 0.0;
            for (std::int64_t i = lo; i < hi; ++i) {
                double h = ctx.hamiltonian(static_cast<std::uint32_t>(i));
                s += h * std::exp(beta * h - logz);
            }
            return s;
        });
    auto fold = std::function<double(const double&, const double&)>(
        [](const double& a, const double& b) { return a + b; });
    return ranged_reduce<double>(total, 64, range_sum, fold);
}

ExactDistribution exact_magnetization_pmf(int p, long long n, double beta) {
    if (p < 2) throw std::invalid_argument("exact_magnetization_pmf: p must be >= 2");
    if (n < 1 || n > 1000000) throw std::invalid_argument("exact_magnetization_pmf: n guard");
    ExactDistribution d;
    d.support.reserve(static_cast<std::size_t>(n) + 1);
    d.log_weights.reserve(static_cast<std::size_t>(n) + 1);
    for (long long k = 0; k <= n; ++k) {
        double xbar = static_cast<double>(2 * k - n) / static_cast<double>(n);
        d.support.push_back(xbar);
        d.log_weights.push_back(stats::log_choose(n, k) +
                                beta * static_cast<double>(n) * ipow(xbar, p));
    }
    d.normalize();
    return d;
}

namespace {

ExactDistribution aggregate_atoms(std::vector<std::pair<double, double>> atoms, double atom_tol) {
    // atoms: (value, log-weight); +inf values collapse into one atom
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    ExactDistribution d;
    for (const auto& [v, lw] : atoms) {
        bool merge = !d.support.empty() &&
                     ((std::isinf(v) && std::isinf(d.support.back())) ||
                      (std::fabs(v - d.support.back()) <= atom_tol));
        if (merge) {
            d.log_weights.back() = stats::logsumexp_pair(d.log_weights.back(), lw);
        } else {
            d.support.push_back(v);
            d.log_weights.push_back(lw);
        }
    }
    d.normalize();
    return d;
}

}  // namespace

ExactDistribution exact_mple_distribution(const InteractionTensor& tensor, double beta,
                                          double atom_tol) {
    if (tensor.storage() == TensorStorage::CurieWeissDense) {
        auto pmf = exact_magnetization_pmf(tensor.order(), tensor.n(), beta);
        std::vector<std::pair<double, double>> atoms;
        atoms.reserve(pmf.support.size());
        for (std::size_t i = 0; i < pmf.support.size(); ++i)
            atoms.emplace_back(phi_p(pmf.support[i], tensor.order()), pmf.log_weights[i]);
        return aggregate_atoms(std::move(atoms), atom_tol);
    }
    if (tensor.n() > 18)
        throw std::invalid_argument("exact_mple_distribution: general tensors guarded at N <= 18");
    EnumContext ctx(tensor);
    const std::int64_t total = std::int64_t{1} << ctx.n;
    std::vector<std::pair<double, double>> atoms(static_cast<std::size_t>(total));
    parallel_for(total, [&](std::int64_t i) {
        auto idx = static_cast<std::uint32_t>(i);
        std::vector<int8_t> spins(static_cast<std::size_t>(ctx.n));
        for (int b = 0; b < ctx.n; ++b) spins[static_cast<std::size_t>(b)] = (idx >> b) & 1u ? 1 : -1;
        SpinConfig x(std::move(spins));
        atoms[static_cast<std::size_t>(i)] = {mple(tensor, x).beta_hat, beta * ctx.hamiltonian(idx)};
    });
    return aggregate_atoms(std::move(atoms), atom_tol);
}

double kl_divergence(const InteractionTensor& tensor, double beta1, double beta2) {
    if (beta1 < 0.0 || beta2 < 0.0) throw std::invalid_argument("kl_divergence: betas must be >= 0");
    double f1 = exact_log_partition(tensor, beta1);
    double f2 = exact_log_partition(tensor, beta2);
    double eh1 = exact_mean_hamiltonian(tensor, beta1);
    return f2 - f1 - (beta2 - beta1) * eh1;
}

AveragedHsbmResult averaged_hsbm_log_partition(int p, int n, const std::vector<double>& lambda,
                                               const BlockProbTensor& Theta, double beta) {
    if (Theta.p() != p) throw std::invalid_argument("averaged_hsbm: Theta arity != p");
    if (static_cast<int>(lambda.size()) != Theta.k())
        throw std::invalid_argument("averaged_hsbm: |lambda| != K");
    const int k = Theta.k();
    if (k > 4) throw std::invalid_argument("averaged_hsbm: K > 4 rejected (lattice guard)");
    auto bs = BlockStructure::from_proportions(n, lambda);

    double lattice = 1.0;
    for (int j = 0; j < k; ++j) lattice *= bs.block_sizes[static_cast<std::size_t>(j)] + 1;
    if (lattice > 1e8) throw std::invalid_argument("averaged_hsbm: block lattice exceeds the 1e8 guard");

    // collapsed Hamiltonian terms: multiplicity * theta * prod_j S_j^{count_j}
    struct Term {
        double coef;
        std::array<int, 4> counts;
    };
    std::vector<Term> terms;
    double fact_p = 1.0;
    for (int i = 2; i <= p; ++i) fact_p *= i;
    double theta_max = 0.0;
    for (const auto& [labels, theta] : Theta.entries()) {
        theta_max = std::max(theta_max, theta);
        Term term{fact_p, {0, 0, 0, 0}};
        for (int l : labels) term.counts[static_cast<std::size_t>(l)]++;
        for (int j = 0; j < k; ++j)
            for (int i = 2; i <= term.counts[static_cast<std::size_t>(j)]; ++i) term.coef /= i;
        term.coef *= theta;
        if (term.coef != 0.0) terms.push_back(term);
    }

    const double scale = beta * std::pow(static_cast<double>(n), 1.0 - p);
    std::vector<int> kk(static_cast<std::size_t>(k), 0);  // +1 counts per block
    std::vector<double> s(static_cast<std::size_t>(k));
    stats::LogSumExp lse;
    while (true) {
        double lw = 0.0;
        for (int j = 0; j < k; ++j) {
            int bsize = bs.block_sizes[static_cast<std::size_t>(j)];
            lw += stats::log_choose(bsize, kk[static_cast<std::size_t>(j)]);
            s[static_cast<std::size_t>(j)] = static_cast<double>(2 * kk[static_cast<std::size_t>(j)] - bsize);
        }
        double h = 0.0;
        for (const auto& term : terms) {
            double v = term.coef;
            for (int j = 0; j < k; ++j) {
                int c = term.counts[static_cast<std::size_t>(j)];
                if (c) v *= ipow(s[static_cast<std::size_t>(j)], c);
            }
            h += v;
        }
        lse.add(lw + scale * h);

        int j = k - 1;
        while (j >= 0 && kk[static_cast<std::size_t>(j)] == bs.block_sizes[static_cast<std::size_t>(j)]) --j;
        if (j < 0) break;
        ++kk[static_cast<std::size_t>(j)];
        for (int l = j + 1; l < k; ++l) kk[static_cast<std::size_t>(l)] = 0;
    }

    AveragedHsbmResult res;
    res.log_partition = lse.value() - n * std::log(2.0);
    // tuples with a repeated vertex are absent from the true averaged tensor
    double n_pow = ipow(static_cast<double>(n), p);
    double falling = 1.0;
    for (int i = 0; i < p; ++i) falling *= static_cast<double>(n - i);
    res.diag_correction_bound =
        std::fabs(beta) * std::pow(static_cast<double>(n), 1.0 - p) * (n_pow - falling) * theta_max;
    return res;
}

double meanfield_lower_bound(int p, int n, const std::vector<double>& lambda,
                             const BlockProbTensor& Theta, double beta) {
    if (Theta.p() != p) throw std::invalid_argument("meanfield_lower_bound: Theta arity != p");
    auto sp = landscape::sup_phi_hsbm(beta, lambda, Theta);
    return static_cast<double>(n) * sp.value;
}

}  // namespace tising::oracle
