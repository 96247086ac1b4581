#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tising/model_zoo.hpp"
#include "tising/rng.hpp"
#include "tising/tensor.hpp"

namespace tising {

// One Glauber (heat-bath) chain. The tensor is shared read-only; each chain
// owns its configuration, cached local fields and RNG stream.
class ChainState {
public:
    ChainState(const InteractionTensor& tensor, double beta, std::uint64_t seed,
               std::uint64_t stream = 0);

    const SpinConfig& config() const { return x_; }
    long long sweep_count() const { return sweep_count_; }
    double beta() const { return beta_; }

    // N single-site heat-bath updates in uniformly random order; site i is set
    // to +1 with probability e^{p beta m_i} / (e^{p beta m_i} + e^{-p beta m_i}).
    void glauber_sweep();
    void run_sweeps(long long count);

    // recompute cached fields exactly; returns the largest relative drift seen
    double refresh_cached_fields();

    // refresh cadence in sweeps (default 1000)
    void set_refresh_interval(long long r) { refresh_interval_ = r; }

private:
    void update_site(int i);
    double local_field_cached(int i) const;
    void apply_flip(int i);

    const InteractionTensor& tensor_;
    double beta_;
    SpinConfig x_;
    std::vector<double> fields_;  // sparse path
    long long spin_sum_ = 0;      // Curie-Weiss path
    long long sweep_count_ = 0;
    long long refresh_interval_ = 1000;
    Rng rng_;
    std::vector<std::uint32_t> order_;
};

struct SampleSchedule {
    long long n_samples = 1;
    long long burn_in_sweeps = 200;  // 200 N site-updates
    long long thin_sweeps = 1;       // N site-updates between samples
    std::uint64_t seed = 0;
    std::uint64_t chain_stream = 0;
};

// Glauber sampling harness: burn-in, then n_samples configurations thinned by
// thin_sweeps. Deterministic in (seed, chain_stream).
std::vector<SpinConfig> sample_glauber(const InteractionTensor& tensor, double beta,
                                       const SampleSchedule& schedule);

// Exact Curie-Weiss sampler: draws the magnetization level k with probability
// proportional to C(n,k) exp(beta n (2k/n-1)^p) (log domain), then assigns a
// uniformly random k-subset of sites to +1. Guard n <= 1e7.
std::vector<SpinConfig> exact_cw_sample(int p, int n, double beta, long long count,
                                        std::uint64_t seed);
// magnetization levels only (cheap path when configurations are not needed)
std::vector<long long> exact_cw_sample_levels(int p, int n, double beta, long long count,
                                              std::uint64_t seed);

// Exact sampler by full enumeration, N <= 20.
std::vector<SpinConfig> exact_enumeration_sample(const InteractionTensor& tensor, double beta,
                                                 long long count, std::uint64_t seed);

// Routing harness: Curie-Weiss tensors use the exact sampler; small systems
// may force exact enumeration; otherwise Glauber with the given schedule.
std::vector<SpinConfig> sample(const InteractionTensor& tensor, double beta,
                               const SampleSchedule& schedule, bool force_exact_enum = false);
std::vector<SpinConfig> sample(const ModelSpec& model, double beta, const SampleSchedule& schedule,
                               bool force_exact_enum = false);

}  // namespace tising
