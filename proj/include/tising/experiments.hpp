#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tising/model_zoo.hpp"
#include "tising/stats.hpp"

namespace tising::experiments {

enum class ExperimentKind { Histogram, ConsistencySweep, ThresholdMixture, PhaseScan, Coverage };

std::string kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);

// Parsed from a key-value manifest file ("key = value" lines, '#' comments).
struct ExperimentManifest {
    ExperimentKind experiment = ExperimentKind::Histogram;
    ModelSpec model;
    double beta = 0.0;
    std::vector<long long> n_values;
    long long replicates = 1;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    std::string name = "experiment";
    double level = 0.95;
    double zero_radius = -1.0;  // <0: default m*/2
    std::vector<double> beta_grid;
    long long burn_in = 200;
    long long thin = 1;
    std::string raw_text;

    static ExperimentManifest parse_file(const std::string& path);
    static ExperimentManifest parse_text(const std::string& text);
    std::uint64_t hash() const;
};

struct OutputFiles {
    std::string csv_path;
    std::string summary_path;
    std::string meta_path;
};

struct HistogramResult {
    std::vector<double> xbar;
    std::vector<double> beta_hat;        // +inf possible
    std::vector<double> sqrtn_dev;       // sqrt(n)(beta_hat - beta)
    long long inf_count = 0;
    stats::Summary dev_summary;          // finite deviations only
    double theory_variance = 0.0;        // CLT target (threshold runs: variance at m*)
    double ks_stat = 0.0;                // finite branch vs N(0, theory_variance)
    double ks_p = 0.0;
    bool threshold_mode = false;
    double alpha_theory = 0.0;
    double zero_radius = 0.0;
    double divergent_freq = 0.0;         // xbar inside the zero neighborhood
    double conditional_ks_stat = 0.0;    // branch outside the neighborhood
    double conditional_ks_p = 0.0;
    double cdf_sup_distance = 0.0;       // p=2 threshold law vs threshold_limit_cdf_p2
    OutputFiles files;
};

struct SweepRow {
    long long n = 0;
    long long inf_count = 0;
    double q50 = 0.0;  // quantiles of sqrt(n)|beta_hat - beta|, finite branch
    double q90 = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool applicable = true;  // false when beta is not above the family threshold
    bool pass = false;       // q90 at the largest n <= 1.5 x q90 at the smallest
    OutputFiles files;
};

struct PhaseScanRow {
    double beta = 0.0;
    long long n = 0;
    double f_bar = 0.0;
    double diag_bound = 0.0;
    double mf_bound = 0.0;
    double growth = 0.0;  // (f_bar(n_max) - f_bar(n_min)) / (n_max - n_min), on max-n rows
    bool departed = false;
};

struct PhaseScanResult {
    std::vector<PhaseScanRow> rows;
    double beta_star = 0.0;
    double transition_beta = 0.0;  // first grid point flagged as departed
    OutputFiles files;
};

struct CoverageResult {
    long long covered = 0;
    long long total = 0;
    long long undefined_ci = 0;  // CI construction rejected the sample
    double coverage = 0.0;
    double std_error = 0.0;
    OutputFiles files;
};

HistogramResult run_histogram(const ExperimentManifest& m);
SweepResult run_consistency_sweep(const ExperimentManifest& m);
PhaseScanResult run_phase_scan(const ExperimentManifest& m);
CoverageResult run_coverage(const ExperimentManifest& m);

// dispatch on m.experiment; returns the summary text
std::string run(const ExperimentManifest& m);

}  // namespace tising::experiments
