#include <cmath>
#include <map>

#include "doctest.h"
#include "test_support.hpp"
#include "tising/landscape.hpp"
#include "tising/model_zoo.hpp"
#include "tising/oracle.hpp"
#include "tising/sampler.hpp"
#include "tising/stats.hpp"

using namespace tising;

TEST_CASE("glauber at beta=0 gives iid uniform spins") {
    Rng rng(3, 3);
    auto t = testsupport::random_sparse(2, 10, rng);
    ChainState chain(t, 0.0, 12345);
    chain.run_sweeps(100);
    double acc = 0.0;
    const long long sweeps = 10000;
    for (long long s = 0; s < sweeps; ++s) {
        chain.glauber_sweep();
        acc += chain.config().mean();
    }
    // per-sweep xbar values are iid with sd 1/sqrt(10) at infinite temperature
    double sd = 1.0 / std::sqrt(10.0 * static_cast<double>(sweeps));
    CHECK(std::fabs(acc / static_cast<double>(sweeps)) <= 3.0 * sd);
}

TEST_CASE("two coupled sites align at large beta") {
    auto t = InteractionTensor::from_edges(2, 10, {{{0, 1}, 1.0}});
    ChainState chain(t, 5.0, 777);
    chain.run_sweeps(200);
    long long agree = 0;
    const long long sweeps = 20000;
    for (long long s = 0; s < sweeps; ++s) {
        chain.glauber_sweep();
        if (chain.config()[0] == chain.config()[1]) ++agree;
    }
    // exact agreement probability is 1/(1+e^{-4 beta}) ~ 1 - 2e-9
    CHECK(static_cast<double>(agree) / static_cast<double>(sweeps) >= 0.99);
}

TEST_CASE("glauber magnetization pmf matches exact enumeration, N=12 p=3 complete") {
    const int n = 12;
    auto t = erdos_renyi(3, n, 1.0, 0);

    // exact pmf of xbar: H depends only on the number of +1 spins here
    std::vector<double> level_logw(static_cast<std::size_t>(n) + 1);
    stats::LogSumExp z;
    const double beta = 0.4;
    for (int k = 0; k <= n; ++k) {
        std::vector<int8_t> s(static_cast<std::size_t>(n), int8_t{-1});
        for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = 1;
        double h = t.hamiltonian(SpinConfig(s));
        level_logw[static_cast<std::size_t>(k)] = stats::log_choose(n, k) + beta * h;
        z.add(level_logw[static_cast<std::size_t>(k)]);
    }

    ChainState chain(t, beta, 2025);
    chain.run_sweeps(2000);
    std::vector<long long> counts(static_cast<std::size_t>(n) + 1, 0);
    const long long sweeps = 200000;
    for (long long s = 0; s < sweeps; ++s) {
        chain.glauber_sweep();
        auto k = static_cast<std::size_t>((chain.config().spin_sum() + n) / 2);
        counts[k]++;
    }
    double tv = 0.0;
    for (int k = 0; k <= n; ++k) {
        double exact = std::exp(level_logw[static_cast<std::size_t>(k)] - z.value());
        double emp = static_cast<double>(counts[static_cast<std::size_t>(k)]) /
                     static_cast<double>(sweeps);
        tv += std::fabs(exact - emp);
    }
    CHECK(tv / 2.0 <= 0.02);
}

TEST_CASE("glauber on the dense Curie-Weiss tensor matches the exact pmf") {
    // the dense tensor keeps diagonal tuples, so the chain uses the exact
    // closed-form conditional from the running spin sum
    const int n = 12;
    const double beta = 0.4;
    auto t = curie_weiss(2, n);
    auto exact = oracle::exact_magnetization_pmf(2, n, beta);
    ChainState chain(t, beta, 515);
    chain.run_sweeps(2000);
    std::vector<long long> counts(static_cast<std::size_t>(n) + 1, 0);
    const long long sweeps = 200000;
    for (long long s = 0; s < sweeps; ++s) {
        chain.glauber_sweep();
        counts[static_cast<std::size_t>((chain.config().spin_sum() + n) / 2)]++;
    }
    double tv = 0.0;
    for (int k = 0; k <= n; ++k) {
        double emp = static_cast<double>(counts[static_cast<std::size_t>(k)]) /
                     static_cast<double>(sweeps);
        tv += std::fabs(emp - exact.prob(static_cast<std::size_t>(k)));
    }
    CHECK(tv / 2.0 <= 0.02);
}

TEST_CASE("cached fields track the exact local fields") {
    Rng rng(9, 9);
    auto t = testsupport::random_sparse(3, 14, rng);
    ChainState chain(t, 0.7, 31337);
    chain.set_refresh_interval(1 << 30);  // no refresh during the run
    chain.run_sweeps(2000);
    CHECK(chain.refresh_cached_fields() <= 1e-9);
}

TEST_CASE("sampling harness is deterministic in (seed, schedule)") {
    Rng rng(4, 4);
    auto t = testsupport::random_sparse(2, 12, rng);
    SampleSchedule sched{5, 50, 2, 909, 1};
    auto a = sample_glauber(t, 0.5, sched);
    auto b = sample_glauber(t, 0.5, sched);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].spins() == b[i].spins());

    auto c = exact_cw_sample(2, 100, 0.7, 4, 11);
    auto d = exact_cw_sample(2, 100, 0.7, 4, 11);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i].spins() == d[i].spins());
}

TEST_CASE("exact Curie-Weiss sampler") {
    SUBCASE("beta=0 reduces to fair coin flips") {
        const int n = 400;
        auto levels = exact_cw_sample_levels(2, n, 0.0, 4000, 21);
        double mean = 0.0, m2 = 0.0;
        for (long long k : levels) {
            double xb = static_cast<double>(2 * k - n) / n;
            mean += xb;
            m2 += xb * xb;
        }
        mean /= static_cast<double>(levels.size());
        m2 /= static_cast<double>(levels.size());
        // xbar has mean 0 and variance 1/n under the coin-flip measure
        CHECK(std::fabs(mean) <= 3.0 * std::sqrt(1.0 / (n * 4000.0)));
        CHECK(m2 - mean * mean == doctest::Approx(1.0 / n).epsilon(0.15));
    }
    SUBCASE("p=2 beta=0.25: high temperature, mean stays at zero") {
        const int n = 500;
        const long long reps = 2000;
        auto pmf = oracle::exact_magnetization_pmf(2, n, 0.25);
        double var = 0.0;
        for (std::size_t i = 0; i < pmf.support.size(); ++i)
            var += pmf.prob(i) * pmf.support[i] * pmf.support[i];
        auto levels = exact_cw_sample_levels(2, n, 0.25, reps, 77);
        double mean = 0.0;
        for (long long k : levels) mean += static_cast<double>(2 * k - n) / n;
        mean /= static_cast<double>(reps);
        CHECK(std::fabs(mean) <= 3.0 * std::sqrt(var / static_cast<double>(reps)));
    }
    SUBCASE("p=2 beta=1: |xbar| concentrates at the positive maximizer") {
        const int n = 1000;
        double mstar = *landscape::m_star(1.0, 2);
        auto levels = exact_cw_sample_levels(2, n, 1.0, 500, 33);
        double acc = 0.0;
        for (long long k : levels) acc += std::fabs(static_cast<double>(2 * k - n) / n);
        CHECK(acc / 500.0 == doctest::Approx(mstar).epsilon(0.01));
    }
    SUBCASE("p=3 beta=0.8: mass above m*/2 matches the exact pmf") {
        const int n = 2000;
        const double beta = 0.8;
        double mstar = *landscape::m_star(beta, 3);
        auto pmf = oracle::exact_magnetization_pmf(3, n, beta);
        double want = pmf.mass_where([&](double xb) { return xb > mstar / 2; });
        auto levels = exact_cw_sample_levels(3, n, beta, 4000, 44);
        long long hits = 0;
        for (long long k : levels)
            if (static_cast<double>(2 * k - n) / n > mstar / 2) ++hits;
        double freq = static_cast<double>(hits) / 4000.0;
        double sigma = std::sqrt(want * (1 - want) / 4000.0);
        CHECK(std::fabs(freq - want) <= std::max(3.0 * sigma, 1e-3));
    }
    SUBCASE("configurations carry the sampled magnetization") {
        auto configs = exact_cw_sample(3, 50, 0.5, 20, 5);
        for (const auto& x : configs) CHECK(x.n() == 50);
    }
}

TEST_CASE("exact enumeration sampler reproduces P_beta (chi-square)") {
    const int n = 10;
    Rng rng(6, 6);
    auto t = testsupport::random_sparse(2, n, rng);
    const double beta = 0.3;

    // exact probabilities per configuration index
    std::vector<double> logw(1u << n);
    stats::LogSumExp z;
    for (std::uint32_t idx = 0; idx < (1u << n); ++idx) {
        std::vector<int8_t> s(static_cast<std::size_t>(n));
        for (int b = 0; b < n; ++b) s[static_cast<std::size_t>(b)] = (idx >> b) & 1 ? 1 : -1;
        logw[idx] = beta * t.hamiltonian(SpinConfig(s));
        z.add(logw[idx]);
    }

    const long long draws = 100000;
    auto samples = exact_enumeration_sample(t, beta, draws, 98765);
    std::vector<long long> counts(1u << n, 0);
    for (const auto& x : samples) {
        std::uint32_t idx = 0;
        for (int b = 0; b < n; ++b)
            if (x[b] > 0) idx |= (1u << b);
        counts[idx]++;
    }
    double chi2 = 0.0;
    for (std::uint32_t idx = 0; idx < (1u << n); ++idx) {
        double expected = static_cast<double>(draws) * std::exp(logw[idx] - z.value());
        double diff = static_cast<double>(counts[idx]) - expected;
        chi2 += diff * diff / expected;
    }
    double p_value = stats::chi_square_p_value(chi2, (1 << n) - 1);
    CHECK(p_value > 0.01);
}

TEST_CASE("sample() routing") {
    auto cw = curie_weiss(2, 60);
    SampleSchedule sched{3, 10, 1, 42, 0};
    auto a = sample(cw, 0.7, sched);
    CHECK(a.size() == 3);
    CHECK(a[0].n() == 60);

    Rng rng(7, 7);
    auto sparse = testsupport::random_sparse(2, 10, rng);
    auto b = sample(sparse, 0.3, sched, /*force_exact_enum=*/true);
    CHECK(b.size() == 3);
    CHECK_THROWS(sample_glauber(sparse, 0.3, SampleSchedule{1, -1, 1, 0, 0}));
    CHECK_THROWS(sample_glauber(sparse, 0.3, SampleSchedule{1, 0, 0, 0, 0}));
}
