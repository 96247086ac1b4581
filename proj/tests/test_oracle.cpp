#include <cmath>

#include "doctest.h"
#include "test_support.hpp"
#include "tising/landscape.hpp"
#include "tising/model_zoo.hpp"
#include "tising/mple.hpp"
#include "tising/oracle.hpp"
#include "tising/stats.hpp"

using namespace tising;
namespace orc = tising::oracle;

TEST_CASE("exact log partition") {
    SUBCASE("beta = 0 normalizes to zero") {
        Rng rng(12, 0);
        auto t = testsupport::random_sparse(2, 8, rng);
        CHECK(orc::exact_log_partition(t, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("N = 1: no valid off-diagonal edge") {
        auto t = InteractionTensor::from_edges(2, 1, {});
        CHECK(orc::exact_log_partition(t, 2.0) == doctest::Approx(0.0).epsilon(1e-13));
    }
    SUBCASE("Curie-Weiss p=2 N=12: enumeration equals the magnetization collapse") {
        auto t = curie_weiss(2, 12);
        double f_enum = orc::exact_log_partition(t, 1.0);
        // independent route: sum over magnetization levels
        stats::LogSumExp lse;
        for (int k = 0; k <= 12; ++k) {
            double xb = (2.0 * k - 12.0) / 12.0;
            lse.add(stats::log_choose(12, k) + 1.0 * 12.0 * xb * xb);
        }
        double f_levels = lse.value() - 12.0 * std::log(2.0);
        CHECK(f_enum == doctest::Approx(f_levels).epsilon(1e-10));
    }
    SUBCASE("guard at N > 22") {
        auto t = curie_weiss(2, 23);
        CHECK_THROWS(orc::exact_log_partition(t, 1.0));
    }
    SUBCASE("derivative identity: F' = E[H] matches a finite difference") {
        Rng rng(13, 1);
        auto t = testsupport::random_sparse(3, 10, rng);
        double beta = 0.6, h = 1e-4;
        double fd = (orc::exact_log_partition(t, beta + h) - orc::exact_log_partition(t, beta - h)) /
                    (2.0 * h);
        CHECK(fd == doctest::Approx(orc::exact_mean_hamiltonian(t, beta)).epsilon(1e-6));
    }
    SUBCASE("nondecreasing in beta when positive H is achievable") {
        auto t = curie_weiss(2, 10);
        double prev = orc::exact_log_partition(t, 0.0);
        for (double b : {0.2, 0.5, 1.0, 2.0}) {
            double cur = orc::exact_log_partition(t, b);
            CHECK(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("exact magnetization pmf") {
    SUBCASE("beta = 0 is the binomial pushforward") {
        auto d = orc::exact_magnetization_pmf(3, 10, 0.0);
        for (int k = 0; k <= 10; ++k) {
            double want = std::exp(stats::log_choose(10, k) - 10.0 * std::log(2.0));
            CHECK(d.prob(static_cast<std::size_t>(k)) == doctest::Approx(want).epsilon(1e-12));
        }
    }
    SUBCASE("even p gives a symmetric pmf") {
        auto d = orc::exact_magnetization_pmf(4, 15, 0.7);
        for (std::size_t i = 0; i < d.support.size(); ++i) {
            CHECK(d.prob(i) == doctest::Approx(d.prob(d.support.size() - 1 - i)).epsilon(1e-12));
        }
    }
    SUBCASE("N=14 p=3: equals the full 2^14 enumeration pushforward") {
        const int n = 14;
        const double beta = 0.5;
        auto d = orc::exact_magnetization_pmf(3, n, beta);
        auto t = curie_weiss(3, n);
        // enumeration pushforward onto magnetization levels
        std::vector<stats::LogSumExp> levels(static_cast<std::size_t>(n) + 1);
        for (std::uint32_t idx = 0; idx < (1u << n); ++idx) {
            std::vector<int8_t> s(static_cast<std::size_t>(n));
            int plus = 0;
            for (int b = 0; b < n; ++b) {
                s[static_cast<std::size_t>(b)] = (idx >> b) & 1 ? 1 : -1;
                plus += (idx >> b) & 1;
            }
            levels[static_cast<std::size_t>(plus)].add(beta * t.hamiltonian(SpinConfig(s)));
        }
        stats::LogSumExp z;
        for (auto& lse : levels) z.add(lse.value());
        for (int k = 0; k <= n; ++k) {
            double log_enum = levels[static_cast<std::size_t>(k)].value() - z.value();
            CHECK(std::fabs(log_enum - d.log_weights[static_cast<std::size_t>(k)]) <= 1e-10);
        }
    }
}

TEST_CASE("exact MPL sampling distribution") {
    SUBCASE("Curie-Weiss p=3: the +inf atom carries P(xbar < 0)") {
        const int n = 13;  // odd n: xbar never exactly 0
        const double beta = 0.5;
        auto d = orc::exact_mple_distribution(curie_weiss(3, n), beta);
        double inf_mass = d.mass_where([](double v) { return std::isinf(v); });
        auto pmf = orc::exact_magnetization_pmf(3, n, beta);
        // negative means plus the fully aligned state (H = sum|m_i| there)
        double want = pmf.mass_where([](double xb) { return xb < 0.0 || xb == 1.0; });
        CHECK(inf_mass == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("Curie-Weiss p=2 beta=0: binomial pushforward through phi_p") {
        const int n = 12;
        auto d = orc::exact_mple_distribution(curie_weiss(2, n), 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < d.support.size(); ++i) total += d.prob(i);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        // mass at beta_hat = 0 is P(xbar = 0)
        double zero_mass = d.mass_where([](double v) { return v == 0.0; });
        CHECK(zero_mass ==
              doctest::Approx(std::exp(stats::log_choose(12, 6) - 12 * std::log(2.0)))
                  .epsilon(1e-12));
    }
    SUBCASE("single-edge tensor: every configuration is degenerate") {
        auto t = InteractionTensor::from_edges(2, 8, {{{0, 1}, 1.0}});
        auto d = orc::exact_mple_distribution(t, 0.3);
        double inf_mass = d.mass_where([](double v) { return std::isinf(v); });
        CHECK(inf_mass == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("general N=8 tensor matches per-configuration grid search") {
        Rng rng(14, 2);
        auto t = testsupport::random_sparse(2, 8, rng, 0.6);
        auto d = orc::exact_mple_distribution(t, 0.4, 1e-9);
        double total = 0.0;
        for (std::size_t i = 0; i < d.support.size(); ++i) total += d.prob(i);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        // spot-check a handful of configurations against the literal scan
        for (std::uint32_t idx : {3u, 77u, 128u, 200u}) {
            std::vector<int8_t> s(8);
            for (int b = 0; b < 8; ++b) s[static_cast<std::size_t>(b)] = (idx >> b) & 1 ? 1 : -1;
            SpinConfig x(std::move(s));
            double grid = testsupport::grid_search_mple(t, x, 50.0, 1e-4);
            double lib = mple(t, x).beta_hat;
            if (std::isinf(grid))
                CHECK((std::isinf(lib) || lib > 49.0));
            else
                CHECK(std::fabs(lib - grid) <= 2e-4);
        }
    }
}

TEST_CASE("KL divergence") {
    Rng rng(15, 3);
    auto t = testsupport::random_sparse(2, 9, rng);
    SUBCASE("zero at equal parameters") {
        CHECK(orc::kl_divergence(t, 0.7, 0.7) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("nonnegative") {
        for (double b2 : {0.1, 0.5, 1.3}) CHECK(orc::kl_divergence(t, 0.6, b2) >= -1e-12);
    }
    SUBCASE("monotone along a ray for Curie-Weiss p=2") {
        auto cw = curie_weiss(2, 10);
        double d1 = orc::kl_divergence(cw, 0.3, 0.5);
        double d2 = orc::kl_divergence(cw, 0.3, 0.8);
        double d3 = orc::kl_divergence(cw, 0.3, 1.2);
        CHECK(d1 >= -1e-12);
        CHECK(d2 >= d1);
        CHECK(d3 >= d2);
    }
}

TEST_CASE("averaged HSBM log partition") {
    SUBCASE("beta = 0") {
        auto Theta = BlockProbTensor::constant(2, 2, 0.5);
        auto r = orc::averaged_hsbm_log_partition(2, 50, {0.5, 0.5}, Theta, 0.0);
        CHECK(r.log_partition == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(r.diag_correction_bound == 0.0);
    }
    SUBCASE("K=1 Theta=1 equals the Curie-Weiss magnetization normalizer") {
        auto Theta = BlockProbTensor::constant(1, 3, 1.0);
        const int n = 40;
        const double beta = 0.8;
        auto r = orc::averaged_hsbm_log_partition(3, n, {1.0}, Theta, beta);
        stats::LogSumExp lse;
        for (int k = 0; k <= n; ++k) {
            double xb = (2.0 * k - n) / n;
            lse.add(stats::log_choose(n, k) + beta * n * xb * xb * xb);
        }
        CHECK(r.log_partition == doctest::Approx(lse.value() - n * std::log(2.0)).epsilon(1e-12));
        CHECK(r.diag_correction_bound > 0.0);
        CHECK(r.diag_correction_bound <= beta * 4.0);  // ~ beta * C(p,2) * p!/2 / n^0 scale
    }
    SUBCASE("guards") {
        auto Theta5 = BlockProbTensor::constant(5, 2, 0.5);
        CHECK_THROWS(orc::averaged_hsbm_log_partition(2, 50, std::vector<double>(5, 0.2), Theta5, 1.0));
    }
}

TEST_CASE("mean-field lower bound") {
    auto Theta = BlockProbTensor::constant(1, 3, 0.5);
    double bstar = landscape::beta_star_er(3, 0.5, 1e-8);
    SUBCASE("zero below the threshold, positive above") {
        CHECK(orc::meanfield_lower_bound(3, 100, {1.0}, Theta, 0.8 * bstar) == 0.0);
        CHECK(orc::meanfield_lower_bound(3, 100, {1.0}, Theta, 1.2 * bstar) > 0.0);
    }
    SUBCASE("K=1 matches a dense 1-D grid") {
        double beta = 1.2 * bstar;
        double best = 0.0;
        for (int i = 1; i < 200000; ++i) {
            double t = i * 5e-6;
            best = std::max(best, beta * 0.5 * t * t * t - landscape::binary_entropy(t));
        }
        CHECK(orc::meanfield_lower_bound(3, 100, {1.0}, Theta, beta) ==
              doctest::Approx(100.0 * best).epsilon(1e-6));
    }
}

TEST_CASE("efficiency: Var(sqrt(N) xbar^p) approaches the Fisher limit") {
    const int p = 2;
    const double beta = 1.0;
    double fisher = landscape::fisher_info_limit(beta, p);
    double prev_gap = 1e9;
    for (int n : {500, 2000, 4000}) {
        auto pmf = orc::exact_magnetization_pmf(p, n, beta);
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < pmf.support.size(); ++i) {
            double v = std::sqrt(static_cast<double>(n)) * std::pow(pmf.support[i], p);
            m1 += pmf.prob(i) * v;
            m2 += pmf.prob(i) * v * v;
        }
        double var = m2 - m1 * m1;
        double gap = std::fabs(var - fisher) / fisher;
        CHECK(gap <= prev_gap + 0.01);
        prev_gap = gap;
        if (n == 4000) CHECK(gap <= 0.15);
    }
}
