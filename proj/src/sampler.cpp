#include "tising/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tising/parallel.hpp"
#include "tising/stats.hpp"

namespace tising {

namespace {

double ipow(double base, int exp) {
    double r = 1.0, b = base;
    for (int e = exp; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
    }
    return r;
}

SpinConfig random_config(int n, Rng& rng) {
    std::vector<int8_t> spins(static_cast<std::size_t>(n));
    for (auto& s : spins) s = rng.bernoulli(0.5) ? 1 : -1;
    return SpinConfig(std::move(spins));
}

}  // namespace

ChainState::ChainState(const InteractionTensor& tensor, double beta, std::uint64_t seed,
                       std::uint64_t stream)
    : tensor_(tensor), beta_(beta), x_(SpinConfig::all_plus(tensor.n())), rng_(seed, stream) {
    if (beta < 0.0) throw std::invalid_argument("ChainState: beta must be >= 0");
    x_ = random_config(tensor.n(), rng_);
    if (tensor_.storage() == TensorStorage::CurieWeissDense) {
        spin_sum_ = x_.spin_sum();
    } else {
        fields_ = tensor_.all_local_fields(x_);
    }
}

double ChainState::local_field_cached(int i) const {
    return fields_[static_cast<std::size_t>(i)];
}

void ChainState::apply_flip(int i) {
    x_.flip(i);
    if (tensor_.storage() == TensorStorage::CurieWeissDense) {
        spin_sum_ += 2 * x_[i];
        return;
    }
    const int p = tensor_.order();
    const double fpm1 = tensor_.factorial(p - 1);
    for (std::size_t e : tensor_.incident_edges(i)) {
        const int* v = tensor_.edge_vertices(e);
        int sign = 1;
        for (int k = 0; k < p; ++k) sign *= x_[v[k]];
        double base = 2.0 * fpm1 * tensor_.edge_weights()[e] * sign;
        for (int k = 0; k < p; ++k) {
            if (v[k] == i) continue;
            fields_[static_cast<std::size_t>(v[k])] += base * x_[v[k]];
        }
    }
}

void ChainState::update_site(int i) {
    double prob_plus;
    if (tensor_.storage() == TensorStorage::CurieWeissDense) {
        // exact conditional from the closed-form Hamiltonian N xbar^p
        // (the dense tensor keeps diagonal tuples, so m_i depends on x_i)
        const int n = tensor_.n();
        const int p = tensor_.order();
        double rest = static_cast<double>(spin_sum_ - x_[i]);
        double h_plus = n * ipow((rest + 1.0) / n, p);
        double h_minus = n * ipow((rest - 1.0) / n, p);
        prob_plus = 1.0 / (1.0 + std::exp(-beta_ * (h_plus - h_minus)));
    } else {
        double m = local_field_cached(i);
        if (!std::isfinite(m))
            throw std::runtime_error("glauber_sweep: non-finite local field (tensor corruption?)");
        prob_plus = 1.0 / (1.0 + std::exp(-2.0 * tensor_.order() * beta_ * m));
    }
    int8_t next = rng_.uniform() < prob_plus ? int8_t{1} : int8_t{-1};
    if (next != x_[i]) apply_flip(i);
}

void ChainState::glauber_sweep() {
    rng_.permutation(static_cast<std::size_t>(tensor_.n()), order_);
    for (std::uint32_t i : order_) update_site(static_cast<int>(i));
    ++sweep_count_;
    if (refresh_interval_ > 0 && sweep_count_ % refresh_interval_ == 0) refresh_cached_fields();
}

void ChainState::run_sweeps(long long count) {
    for (long long s = 0; s < count; ++s) glauber_sweep();
}

double ChainState::refresh_cached_fields() {
    if (tensor_.storage() == TensorStorage::CurieWeissDense) {
        spin_sum_ = x_.spin_sum();
        return 0.0;
    }
    auto exact = tensor_.all_local_fields(x_);
    double drift = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        double scale = std::max(1.0, std::fabs(exact[i]));
        drift = std::max(drift, std::fabs(exact[i] - fields_[i]) / scale);
    }
    fields_ = std::move(exact);
    return drift;
}

std::vector<SpinConfig> sample_glauber(const InteractionTensor& tensor, double beta,
                                       const SampleSchedule& schedule) {
    if (schedule.burn_in_sweeps < 0 || schedule.thin_sweeps < 1 || schedule.n_samples < 0)
        throw std::invalid_argument("sample_glauber: invalid schedule");
    ChainState chain(tensor, beta, schedule.seed, schedule.chain_stream);
    chain.run_sweeps(schedule.burn_in_sweeps);
    std::vector<SpinConfig> out;
    out.reserve(static_cast<std::size_t>(schedule.n_samples));
    for (long long s = 0; s < schedule.n_samples; ++s) {
        chain.run_sweeps(schedule.thin_sweeps);
        out.push_back(chain.config());
    }
    return out;
}

std::vector<long long> exact_cw_sample_levels(int p, int n, double beta, long long count,
                                              std::uint64_t seed) {
    if (n < 1 || n > 10000000) throw std::invalid_argument("exact_cw_sample: n guard (<= 1e7)");
    if (p < 2) throw std::invalid_argument("exact_cw_sample: p must be >= 2");
    // level pmf over the number of +1 spins, in the log domain
    std::vector<double> logw(static_cast<std::size_t>(n) + 1);
    stats::LogSumExp lse;
    for (long long k = 0; k <= n; ++k) {
        double xbar = static_cast<double>(2 * k - n) / n;
        logw[static_cast<std::size_t>(k)] =
            stats::log_choose(n, k) + beta * static_cast<double>(n) * ipow(xbar, p);
        lse.add(logw[static_cast<std::size_t>(k)]);
    }
    double z = lse.value();
    std::vector<double> cdf(logw.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < logw.size(); ++k) {
        acc += std::exp(logw[k] - z);
        cdf[k] = acc;
    }
    cdf.back() = 1.0;

    std::vector<long long> levels(static_cast<std::size_t>(count));
    parallel_for(count, [&](std::int64_t i) {
        Rng rng(mix64(seed, 0xC37A01ULL), static_cast<std::uint64_t>(i));
        double u = rng.uniform();
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        levels[static_cast<std::size_t>(i)] = static_cast<long long>(it - cdf.begin());
    });
    return levels;
}

std::vector<SpinConfig> exact_cw_sample(int p, int n, double beta, long long count,
                                        std::uint64_t seed) {
    auto levels = exact_cw_sample_levels(p, n, beta, count, seed);
    std::vector<SpinConfig> out(static_cast<std::size_t>(count));
    parallel_for(count, [&](std::int64_t i) {
        Rng rng(mix64(seed, 0xC37A02ULL), static_cast<std::uint64_t>(i));
        long long k = levels[static_cast<std::size_t>(i)];
        std::vector<std::uint32_t> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0u);
        std::vector<int8_t> spins(static_cast<std::size_t>(n), int8_t{-1});
        for (long long j = 0; j < k; ++j) {  // partial Fisher-Yates
            auto r = static_cast<std::size_t>(j + static_cast<long long>(rng.uniform_int(
                                                      static_cast<std::uint64_t>(n - j))));
            std::swap(idx[static_cast<std::size_t>(j)], idx[r]);
            spins[idx[static_cast<std::size_t>(j)]] = 1;
        }
        out[static_cast<std::size_t>(i)] = SpinConfig(std::move(spins));
    });
    return out;
}

std::vector<SpinConfig> exact_enumeration_sample(const InteractionTensor& tensor, double beta,
                                                 long long count, std::uint64_t seed) {
    const int n = tensor.n();
    if (n > 20) throw std::invalid_argument("exact_enumeration_sample: N guard (<= 20)");
    const std::int64_t total = std::int64_t{1} << n;
    std::vector<double> logw(static_cast<std::size_t>(total));
    std::vector<int8_t> spins(static_cast<std::size_t>(n));
    stats::LogSumExp lse;
    for (std::int64_t idx = 0; idx < total; ++idx) {
        for (int b = 0; b < n; ++b)
            spins[static_cast<std::size_t>(b)] = (idx >> b) & 1 ? int8_t{1} : int8_t{-1};
        SpinConfig x(spins);
        logw[static_cast<std::size_t>(idx)] = beta * tensor.hamiltonian(x);
        lse.add(logw[static_cast<std::size_t>(idx)]);
    }
    double z = lse.value();
    std::vector<double> cdf(logw.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < logw.size(); ++i) {
        acc += std::exp(logw[i] - z);
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    std::vector<SpinConfig> out(static_cast<std::size_t>(count));
    parallel_for(count, [&](std::int64_t i) {
        Rng rng(mix64(seed, 0xC37A03ULL), static_cast<std::uint64_t>(i));
        double u = rng.uniform();
        auto idx = static_cast<std::uint64_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        std::vector<int8_t> sp(static_cast<std::size_t>(n));
        for (int b = 0; b < n; ++b) sp[static_cast<std::size_t>(b)] = (idx >> b) & 1 ? 1 : -1;
        out[static_cast<std::size_t>(i)] = SpinConfig(std::move(sp));
    });
    return out;
}

std::vector<SpinConfig> sample(const ModelSpec& model, double beta, const SampleSchedule& schedule,
                               bool force_exact_enum) {
    auto generated = generate(model);
    return sample(generated.tensor, beta, schedule, force_exact_enum);
}

std::vector<SpinConfig> sample(const InteractionTensor& tensor, double beta,
                               const SampleSchedule& schedule, bool force_exact_enum) {
    if (tensor.storage() == TensorStorage::CurieWeissDense) {
        return exact_cw_sample(tensor.order(), tensor.n(), beta, schedule.n_samples,
                               mix64(schedule.seed, schedule.chain_stream));
    }
    if (force_exact_enum) {
        return exact_enumeration_sample(tensor, beta, schedule.n_samples,
                                        mix64(schedule.seed, schedule.chain_stream));
    }
    return sample_glauber(tensor, beta, schedule);
}

}  // namespace tising
