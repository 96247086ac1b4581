#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "tising/experiments.hpp"
#include "tising/landscape.hpp"

using namespace tising;
namespace ex = tising::experiments;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string out_dir() {
    auto dir = std::filesystem::temp_directory_path() / "tising_experiments";
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("manifest parsing") {
    auto man = ex::ExperimentManifest::parse_text(
        "# comment\n"
        "experiment = histogram\n"
        "family = cw\n"
        "p = 4\n"
        "n = 500\n"
        "beta = 0.75\n"
        "replicates = 100\n"
        "seed = 7\n"
        "n_values = 100 200 400\n"
        "name = demo\n");
    CHECK(man.experiment == ex::ExperimentKind::Histogram);
    CHECK(man.model.family == Family::CurieWeiss);
    CHECK(man.model.p == 4);
    CHECK(man.beta == 0.75);
    CHECK(man.replicates == 100);
    CHECK(man.n_values == std::vector<long long>{100, 200, 400});
    CHECK(man.hash() == ex::ExperimentManifest::parse_text(man.raw_text).hash());
    CHECK_THROWS(ex::ExperimentManifest::parse_text("experiment = histogram\nbogus_key = 1\n"));
    CHECK_THROWS(ex::ExperimentManifest::parse_text("experiment = nonsense\n"));
}

TEST_CASE("histogram experiment: CW above threshold") {
    ex::ExperimentManifest man;
    man.experiment = ex::ExperimentKind::Histogram;
    man.model.family = Family::CurieWeiss;
    man.model.p = 2;
    man.model.n = 400;
    man.beta = 0.8;
    man.replicates = 400;
    man.seed = 11;
    man.output_dir = out_dir();
    man.name = "hist_p2";
    man.raw_text = "unit";
    auto res = ex::run_histogram(man);
    CHECK(res.beta_hat.size() == 400);
    CHECK(res.inf_count == 0);
    CHECK(res.theory_variance == doctest::Approx(landscape::asymptotic_variance(0.8, 2)));
    // loose sanity: empirical variance within a factor of two of the target
    CHECK(res.dev_summary.variance > 0.5 * res.theory_variance);
    CHECK(res.dev_summary.variance < 2.0 * res.theory_variance);
    CHECK(slurp(res.files.csv_path).substr(0, 9) == "replicate");
    CHECK(slurp(res.files.summary_path).find("theory_variance") != std::string::npos);
    CHECK(slurp(res.files.meta_path).find("manifest_hash") != std::string::npos);
}

TEST_CASE("histogram experiment refuses a below-threshold Gaussian target") {
    ex::ExperimentManifest man;
    man.experiment = ex::ExperimentKind::Histogram;
    man.model.family = Family::CurieWeiss;
    man.model.p = 2;
    man.model.n = 100;
    man.beta = 0.3;
    man.replicates = 10;
    man.output_dir = out_dir();
    man.name = "hist_bad";
    CHECK_THROWS(ex::run_histogram(man));
}

TEST_CASE("threshold mixture experiment splits branches") {
    ex::ExperimentManifest man;
    man.experiment = ex::ExperimentKind::ThresholdMixture;
    man.model.family = Family::CurieWeiss;
    man.model.p = 3;
    man.model.n = 800;
    man.beta = landscape::beta_star_cw(3, 1e-8);
    man.replicates = 600;
    man.seed = 5;
    man.output_dir = out_dir();
    man.name = "thr_p3";
    man.raw_text = "unit thr";
    auto res = ex::run_histogram(man);
    CHECK(res.threshold_mode);
    CHECK(res.zero_radius > 0.0);
    CHECK(res.alpha_theory == doctest::Approx(landscape::alpha_weight(3)));
    CHECK(res.divergent_freq > 0.2);
    CHECK(res.divergent_freq < 0.7);
    CHECK(res.conditional_ks_stat > 0.0);
}

TEST_CASE("consistency sweep") {
    ex::ExperimentManifest man;
    man.experiment = ex::ExperimentKind::ConsistencySweep;
    man.model.family = Family::CurieWeiss;
    man.model.p = 3;
    man.beta = 0.8;
    man.replicates = 300;
    man.n_values = {500, 2000, 8000};
    man.seed = 6;
    man.output_dir = out_dir();
    man.name = "sweep";
    man.raw_text = "unit sweep";
    auto res = ex::run_consistency_sweep(man);
    CHECK(res.applicable);
    CHECK(res.pass);
    REQUIRE(res.rows.size() == 3);
    CHECK(res.rows[0].n == 500);

    SUBCASE("beta = 0 is marked not applicable") {
        man.beta = 0.0;
        man.name = "sweep_na";
        auto na = ex::run_consistency_sweep(man);
        CHECK(!na.applicable);
        CHECK(slurp(na.files.summary_path).find("n/a") != std::string::npos);
    }
}

TEST_CASE("phase scan over the averaged model") {
    ex::ExperimentManifest man;
    man.experiment = ex::ExperimentKind::PhaseScan;
    man.model.family = Family::ErdosRenyiHypergraph;
    man.model.p = 3;
    man.model.theta = 1.0;
    man.beta_grid = {0.5, 0.6, 0.672, 0.75, 0.9};
    man.n_values = {200, 400, 800};
    man.output_dir = out_dir();
    man.name = "scan";
    man.raw_text = "unit scan";
    auto res = ex::run_phase_scan(man);
    CHECK(res.beta_star == doctest::Approx(0.672).epsilon(0.01));
    // flat below, growing above: the flagged transition lands near beta*
    CHECK(res.transition_beta == doctest::Approx(0.75).epsilon(0.15));
    REQUIRE(res.rows.size() == 15);
    for (const auto& row : res.rows) {
        if (row.beta <= 0.6) CHECK(!row.departed);
        if (row.beta >= 0.75) CHECK(row.departed);
    }

    SUBCASE("beta = 0 rows are exactly zero") {
        man.beta_grid = {0.0};
        man.name = "scan0";
        auto zero = ex::run_phase_scan(man);
        for (const auto& row : zero.rows) {
            CHECK(row.f_bar == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(row.mf_bound == 0.0);
        }
    }

    SUBCASE("K=2 symmetric blocks: transition matches the threshold solver") {
        man.model.family = Family::HSBM;
        man.model.lambda = {0.5, 0.5};
        man.model.Theta = BlockProbTensor::constant(2, 3, 0.5);
        man.beta_grid = {1.0, 1.2, 1.4, 1.6};
        man.name = "scan_k2";
        auto res = ex::run_phase_scan(man);
        // constant Theta=0.5 collapses to the K=1 threshold ~1.344
        CHECK(res.beta_star == doctest::Approx(landscape::beta_star_er(3, 0.5)).epsilon(1e-3));
        CHECK(res.transition_beta == doctest::Approx(1.4).epsilon(1e-12));
    }
}

TEST_CASE("coverage experiment") {
    ex::ExperimentManifest man;
    man.experiment = ex::ExperimentKind::Coverage;
    man.model.family = Family::CurieWeiss;
    man.model.p = 2;
    man.model.n = 500;
    man.beta = 0.8;
    man.level = 0.95;
    man.replicates = 400;
    man.seed = 8;
    man.output_dir = out_dir();
    man.name = "cov";
    man.raw_text = "unit cov";
    auto res = ex::run_coverage(man);
    CHECK(res.total == 400);
    CHECK(res.coverage > 0.85);
    CHECK(res.coverage <= 1.0);
    CHECK(res.undefined_ci == 0);

    SUBCASE("below threshold refused") {
        man.beta = 0.2;
        man.name = "cov_bad";
        CHECK_THROWS(ex::run_coverage(man));
    }

    SUBCASE("level 0.5 covers half the time") {
        man.model.n = 1000;
        man.level = 0.5;
        man.replicates = 2000;
        man.name = "cov_half";
        auto half = ex::run_coverage(man);
        CHECK(half.coverage >= 0.47);
        CHECK(half.coverage <= 0.53);
    }
}

TEST_CASE("sparse families route through Glauber sampling and the root finder") {
    ex::ExperimentManifest man;
    man.experiment = ex::ExperimentKind::ConsistencySweep;
    man.model.family = Family::ErdosRenyiHypergraph;
    man.model.p = 3;
    man.model.theta = 0.5;
    man.model.seed = 40;
    man.beta = 1.5;  // above beta*_ER(3, 0.5) ~ 1.344
    man.replicates = 30;
    man.n_values = {10, 14};
    man.burn_in = 150;
    man.seed = 41;
    man.output_dir = out_dir();
    man.name = "er_sweep";
    man.raw_text = "unit er sweep";
    auto res = ex::run_consistency_sweep(man);
    CHECK(res.applicable);
    REQUIRE(res.rows.size() == 2);
    for (const auto& row : res.rows) {
        CHECK(row.inf_count < man.replicates);
        CHECK(row.q90 >= row.q50);
        CHECK(std::isfinite(row.q90));
    }

    SUBCASE("histogram on a sparse family reports the empirical side only") {
        man.experiment = ex::ExperimentKind::Histogram;
        man.model.n = 12;
        man.replicates = 40;
        man.name = "er_hist";
        auto hist = ex::run_histogram(man);
        CHECK(hist.beta_hat.size() == 40);
        CHECK(std::isnan(hist.theory_variance));
        CHECK(hist.dev_summary.count + static_cast<std::size_t>(hist.inf_count) == 40);
    }
}

TEST_CASE("experiments are pure functions of the manifest: byte-identical CSV") {
    ex::ExperimentManifest man;
    man.experiment = ex::ExperimentKind::Coverage;
    man.model.family = Family::CurieWeiss;
    man.model.p = 2;
    man.model.n = 300;
    man.beta = 0.7;
    man.replicates = 150;
    man.seed = 99;
    man.output_dir = out_dir();
    man.raw_text = "determinism";
    man.name = "det1";
    auto a = ex::run_coverage(man);
    man.name = "det2";
    auto b = ex::run_coverage(man);
    CHECK(slurp(a.files.csv_path) == slurp(b.files.csv_path));

    // dispatch through run() returns the summary text
    man.name = "det3";
    auto summary = ex::run(man);
    CHECK(summary.find("coverage") != std::string::npos);
}
