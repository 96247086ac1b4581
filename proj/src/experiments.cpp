#include "tising/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "tising/landscape.hpp"
#include "tising/mple.hpp"
#include "tising/oracle.hpp"
#include "tising/parallel.hpp"
#include "tising/sampler.hpp"

namespace tising::experiments {

namespace {

constexpr const char* kVersion = "tising 1.0.0";
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

OutputFiles write_outputs(const ExperimentManifest& man, const std::string& csv,
                          const std::string& summary) {
    std::filesystem::create_directories(man.output_dir);
    OutputFiles files;
    auto base = std::filesystem::path(man.output_dir) / man.name;
    files.csv_path = (base.string() + ".csv");
    files.summary_path = (base.string() + ".summary.txt");
    files.meta_path = (base.string() + ".meta");
    std::ofstream(files.csv_path) << csv;
    std::ofstream(files.summary_path) << summary;
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                  static_cast<unsigned long long>(man.hash()));
    std::ofstream meta(files.meta_path);
    meta << "name = " << man.name << '\n'
         << "experiment = " << kind_name(man.experiment) << '\n'
         << "manifest_hash = " << hash_buf << '\n'
         << "seed = " << man.seed << '\n'
         << "version = " << kVersion << '\n';
    return files;
}

// variance of the Gaussian component at beta = beta*_CW(p)
double threshold_variance(int p) {
    double bstar = landscape::beta_star_cw(p, 1e-8);
    auto m = landscape::positive_stationary_max(bstar, p);
    if (!m) throw std::runtime_error("threshold variance: no positive maximizer at beta*");
    double m2 = *m * *m;
    double pw = 1.0;
    for (int i = 0; i < p - 1; ++i) pw *= m2;  // m^{2p-2}
    return -landscape::g_second(bstar, p, *m) / (static_cast<double>(p) * p * pw);
}

struct ReplicateEstimates {
    std::vector<double> xbar;
    std::vector<double> beta_hat;
};

// per-replicate stream = hash(seed, replicate); Curie-Weiss goes through the
// exact sampler, everything else through Glauber + the root finder
ReplicateEstimates replicate_estimates(const ExperimentManifest& man, long long n, double beta,
                                       std::uint64_t seed) {
    ReplicateEstimates est;
    const long long r = man.replicates;
    est.xbar.assign(static_cast<std::size_t>(r), 0.0);
    est.beta_hat.assign(static_cast<std::size_t>(r), 0.0);
    if (man.model.family == Family::CurieWeiss) {
        auto levels = exact_cw_sample_levels(man.model.p, static_cast<int>(n), beta, r, seed);
        parallel_for(r, [&](std::int64_t i) {
            double xb = static_cast<double>(2 * levels[static_cast<std::size_t>(i)] - n) /
                        static_cast<double>(n);
            est.xbar[static_cast<std::size_t>(i)] = xb;
            est.beta_hat[static_cast<std::size_t>(i)] = phi_p(xb, man.model.p);
        });
        return est;
    }
    ModelSpec spec = man.model;
    spec.n = static_cast<int>(n);
    spec.seed = mix64(man.model.seed, static_cast<std::uint64_t>(n));
    auto gen = generate(spec);
    parallel_for(r, [&](std::int64_t i) {
        SampleSchedule sched;
        sched.n_samples = 1;
        sched.burn_in_sweeps = man.burn_in;
        sched.thin_sweeps = man.thin;
        sched.seed = seed;
        sched.chain_stream = static_cast<std::uint64_t>(i);
        auto configs = sample_glauber(gen.tensor, beta, sched);
        est.xbar[static_cast<std::size_t>(i)] = configs[0].mean();
        est.beta_hat[static_cast<std::size_t>(i)] = mple(gen.tensor, configs[0]).beta_hat;
    });
    return est;
}

double family_threshold(const ExperimentManifest& man) {
    switch (man.model.family) {
        case Family::CurieWeiss:
            return landscape::beta_star_cw(man.model.p, 1e-8);
        case Family::ErdosRenyiHypergraph:
            return landscape::beta_star_er(man.model.p, man.model.theta, 1e-8);
        case Family::HSBM:
            if (man.model.Theta)
                return landscape::beta_star_hsbm(man.model.p, man.model.lambda, *man.model.Theta)
                    .beta_star;
            return 0.0;
        default:
            return 0.0;  // unknown threshold: treat every beta as applicable
    }
}

void block_problem(const ExperimentManifest& man, std::vector<double>& lambda,
                   std::optional<BlockProbTensor>& Theta) {
    const int p = man.model.p;
    switch (man.model.family) {
        case Family::CurieWeiss:
            lambda = {1.0};
            Theta = BlockProbTensor::constant(1, p, 1.0);
            return;
        case Family::ErdosRenyiHypergraph:
            lambda = {1.0};
            Theta = BlockProbTensor::constant(1, p, man.model.theta);
            return;
        case Family::HSBM:
            if (!man.model.Theta) throw std::invalid_argument("phase scan: hsbm needs Theta");
            lambda = man.model.lambda;
            Theta = man.model.Theta;
            return;
        case Family::PPartite: {
            if (static_cast<int>(man.model.lambda.size()) != p)
                throw std::invalid_argument("phase scan: p_partite needs p lambda fractions");
            lambda = man.model.lambda;
            BlockProbTensor t(p, p);
            std::vector<int> all(static_cast<std::size_t>(p));
            for (int j = 0; j < p; ++j) all[static_cast<std::size_t>(j)] = j;
            // only label multisets hitting every part once carry probability
            t = BlockProbTensor(p, p);
            std::vector<int> labels(static_cast<std::size_t>(p), 0);
            while (true) {
                bool distinct_all = true;
                std::vector<bool> seen(static_cast<std::size_t>(p), false);
                for (int l : labels) seen[static_cast<std::size_t>(l)] = true;
                for (bool b : seen) distinct_all = distinct_all && b;
                t.set(labels, distinct_all ? man.model.theta : 0.0);
                int i = p - 1;
                while (i >= 0 && labels[static_cast<std::size_t>(i)] == p - 1) --i;
                if (i < 0) break;
                int v = labels[static_cast<std::size_t>(i)] + 1;
                for (int j = i; j < p; ++j) labels[static_cast<std::size_t>(j)] = v;
            }
            Theta = std::move(t);
            return;
        }
        default:
            throw std::invalid_argument("phase scan: family has no block structure");
    }
}

}  // namespace

std::string kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Histogram: return "histogram";
        case ExperimentKind::ConsistencySweep: return "consistency_sweep";
        case ExperimentKind::ThresholdMixture: return "threshold_mixture";
        case ExperimentKind::PhaseScan: return "phase_scan";
        case ExperimentKind::Coverage: return "coverage";
    }
    return "histogram";
}

ExperimentKind kind_from_name(const std::string& name) {
    if (name == "histogram") return ExperimentKind::Histogram;
    if (name == "consistency_sweep") return ExperimentKind::ConsistencySweep;
    if (name == "threshold_mixture") return ExperimentKind::ThresholdMixture;
    if (name == "phase_scan") return ExperimentKind::PhaseScan;
    if (name == "coverage") return ExperimentKind::Coverage;
    throw std::invalid_argument("unknown experiment kind: " + name);
}

std::uint64_t ExperimentManifest::hash() const { return fnv1a(raw_text); }

ExperimentManifest ExperimentManifest::parse_text(const std::string& text) {
    ExperimentManifest man;
    man.raw_text = text;
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<std::vector<int>, double>> theta_entries;
    int theta_k = 0;
    while (std::getline(in, line)) {
        auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        auto eq = line.find('=');
        if (eq == std::string::npos) eq = line.find(':');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        if (key.empty() || value.empty()) continue;
        std::istringstream vs(value);
        if (key == "experiment") man.experiment = kind_from_name(value);
        else if (key == "family") man.model.family = family_from_name(value);
        else if (key == "p") vs >> man.model.p;
        else if (key == "n") vs >> man.model.n;
        else if (key == "beta") vs >> man.beta;
        else if (key == "theta") vs >> man.model.theta;
        else if (key == "replicates") vs >> man.replicates;
        else if (key == "seed") { vs >> man.seed; man.model.seed = man.seed; }
        else if (key == "level") vs >> man.level;
        else if (key == "zero_radius") vs >> man.zero_radius;
        else if (key == "burn_in") vs >> man.burn_in;
        else if (key == "thin") vs >> man.thin;
        else if (key == "output_dir") man.output_dir = value;
        else if (key == "name") man.name = value;
        else if (key == "n_values") {
            long long v;
            while (vs >> v) man.n_values.push_back(v);
        } else if (key == "beta_grid") {
            double v;
            while (vs >> v) man.beta_grid.push_back(v);
        } else if (key == "lambda") {
            double v;
            while (vs >> v) man.model.lambda.push_back(v);
        } else if (key == "parts") {
            int v;
            while (vs >> v) man.model.parts.push_back(v);
        } else if (key == "theta_k") {
            vs >> theta_k;
        } else if (key == "theta_entry") {
            // "theta_entry = j1 ... jp prob" with 1-based block labels
            std::vector<double> nums;
            double v;
            while (vs >> v) nums.push_back(v);
            if (nums.size() < 2) throw std::invalid_argument("manifest: bad theta_entry");
            std::vector<int> labels;
            for (std::size_t i = 0; i + 1 < nums.size(); ++i)
                labels.push_back(static_cast<int>(nums[i]) - 1);
            theta_entries.emplace_back(std::move(labels), nums.back());
        } else {
            throw std::invalid_argument("manifest: unknown key '" + key + "'");
        }
    }
    if (!theta_entries.empty()) {
        if (theta_k == 0) theta_k = static_cast<int>(man.model.lambda.size());
        BlockProbTensor t(theta_k, man.model.p);
        for (auto& [labels, prob] : theta_entries) t.set(labels, prob);
        man.model.Theta = std::move(t);
    }
    if (man.replicates < 1) throw std::invalid_argument("manifest: replicates must be >= 1");
    return man;
}

ExperimentManifest ExperimentManifest::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

HistogramResult run_histogram(const ExperimentManifest& man) {
    const int p = man.model.p;
    const long long n = man.model.n;
    const double beta = man.beta;
    const bool threshold_mode = man.experiment == ExperimentKind::ThresholdMixture;
    const bool cw = man.model.family == Family::CurieWeiss;

    HistogramResult res;
    res.threshold_mode = threshold_mode;

    if (cw && !threshold_mode) {
        double bstar = landscape::beta_star_cw(p, 1e-8);
        if (!(beta > bstar))
            throw std::invalid_argument(
                "histogram: beta is not above the estimation threshold; the Gaussian target is "
                "undefined (use experiment = threshold_mixture at the threshold)");
    }

    auto est = replicate_estimates(man, n, beta, man.seed);
    res.xbar = std::move(est.xbar);
    res.beta_hat = std::move(est.beta_hat);

    std::vector<double> finite_devs;
    res.sqrtn_dev.reserve(res.beta_hat.size());
    const double sn = std::sqrt(static_cast<double>(n));
    for (double bh : res.beta_hat) {
        double dev = std::isinf(bh) ? kInf : sn * (bh - beta);
        res.sqrtn_dev.push_back(dev);
        if (std::isinf(bh))
            ++res.inf_count;
        else
            finite_devs.push_back(dev);
    }
    res.dev_summary = stats::summarize(finite_devs);

    if (cw) {
        res.theory_variance =
            threshold_mode ? threshold_variance(p) : landscape::asymptotic_variance(beta, p);
        double sigma = std::sqrt(res.theory_variance);
        if (!finite_devs.empty()) {
            auto ks = stats::ks_test(finite_devs,
                                     [sigma](double x) { return stats::normal_cdf(x / sigma); });
            res.ks_stat = ks.statistic;
            res.ks_p = ks.p_value;
        }
    } else {
        res.theory_variance = std::numeric_limits<double>::quiet_NaN();
    }

    std::vector<char> divergent(res.beta_hat.size(), 0);
    if (threshold_mode && cw) {
        double bstar = landscape::beta_star_cw(p, 1e-8);
        auto mstar = landscape::positive_stationary_max(bstar, p);
        res.zero_radius = man.zero_radius > 0 ? man.zero_radius : (mstar ? *mstar / 2.0 : 0.25);
        std::vector<double> kept;
        long long div_count = 0;
        for (std::size_t i = 0; i < res.beta_hat.size(); ++i) {
            bool in_zero = (p % 2 == 0) ? std::fabs(res.xbar[i]) < res.zero_radius
                                        : res.xbar[i] < res.zero_radius;
            divergent[i] = in_zero ? 1 : 0;
            if (in_zero)
                ++div_count;
            else if (!std::isinf(res.sqrtn_dev[i]))
                kept.push_back(res.sqrtn_dev[i]);
        }
        res.divergent_freq =
            static_cast<double>(div_count) / static_cast<double>(res.beta_hat.size());
        if (p >= 3) res.alpha_theory = landscape::alpha_weight(p);
        if (!kept.empty()) {
            double sigma = std::sqrt(res.theory_variance);
            auto ks = stats::ks_test(kept,
                                     [sigma](double x) { return stats::normal_cdf(x / sigma); });
            res.conditional_ks_stat = ks.statistic;
            res.conditional_ks_p = ks.p_value;
        }
        if (p == 2) {
            auto ks = stats::ks_test(res.sqrtn_dev, landscape::threshold_limit_cdf_p2);
            res.cdf_sup_distance = ks.statistic;
        }
    }

    std::ostringstream csv;
    csv << "replicate,xbar,beta_hat,sqrtn_dev,divergent\n";
    for (std::size_t i = 0; i < res.beta_hat.size(); ++i) {
        csv << i << ',' << fmt(res.xbar[i]) << ',' << fmt(res.beta_hat[i]) << ','
            << fmt(res.sqrtn_dev[i]) << ',' << static_cast<int>(divergent[i]) << '\n';
    }

    std::ostringstream sum;
    sum << "experiment = " << kind_name(man.experiment) << '\n'
        << "family = " << family_name(man.model.family) << '\n'
        << "p = " << p << '\n' << "n = " << n << '\n'
        << "beta = " << fmt6(beta) << '\n'
        << "replicates = " << man.replicates << '\n'
        << "inf_count = " << res.inf_count << '\n'
        << "mean_sqrtn_dev = " << fmt6(res.dev_summary.mean) << '\n'
        << "var_sqrtn_dev = " << fmt6(res.dev_summary.variance) << '\n'
        << "theory_variance = " << fmt6(res.theory_variance) << '\n'
        << "ks_stat = " << fmt6(res.ks_stat) << '\n'
        << "ks_p = " << fmt6(res.ks_p) << '\n';
    if (threshold_mode) {
        sum << "zero_radius = " << fmt6(res.zero_radius) << '\n'
            << "divergent_freq = " << fmt6(res.divergent_freq) << '\n'
            << "alpha_theory = " << fmt6(res.alpha_theory) << '\n'
            << "conditional_ks_stat = " << fmt6(res.conditional_ks_stat) << '\n'
            << "conditional_ks_p = " << fmt6(res.conditional_ks_p) << '\n';
        if (p == 2) sum << "cdf_sup_distance = " << fmt6(res.cdf_sup_distance) << '\n';
    }
    res.files = write_outputs(man, csv.str(), sum.str());
    return res;
}

SweepResult run_consistency_sweep(const ExperimentManifest& man) {
    if (man.n_values.empty())
        throw std::invalid_argument("consistency sweep: n_values must be nonempty");
    SweepResult res;
    double thr = family_threshold(man);
    res.applicable = man.beta > thr;

    for (long long n : man.n_values) {
        auto est = replicate_estimates(man, n, man.beta, mix64(man.seed, static_cast<std::uint64_t>(n)));
        SweepRow row;
        row.n = n;
        std::vector<double> devs;
        double sn = std::sqrt(static_cast<double>(n));
        for (double bh : est.beta_hat) {
            if (std::isinf(bh))
                ++row.inf_count;
            else
                devs.push_back(sn * std::fabs(bh - man.beta));
        }
        if (!devs.empty()) {
            row.q50 = stats::quantile(devs, 0.5);
            row.q90 = stats::quantile(devs, 0.9);
        }
        res.rows.push_back(row);
    }
    if (res.applicable && res.rows.size() >= 2) {
        res.pass = res.rows.back().q90 <= 1.5 * res.rows.front().q90 + 1e-12;
    }

    std::ostringstream csv;
    csv << "n,replicates,inf_count,q50_sqrtn_abs_dev,q90_sqrtn_abs_dev\n";
    for (const auto& row : res.rows)
        csv << row.n << ',' << man.replicates << ',' << row.inf_count << ',' << fmt(row.q50)
            << ',' << fmt(row.q90) << '\n';

    std::ostringstream sum;
    sum << "experiment = consistency_sweep\n"
        << "family = " << family_name(man.model.family) << '\n'
        << "beta = " << fmt6(man.beta) << '\n'
        << "applicable = " << (res.applicable ? "yes" : "no (beta not above the threshold)") << '\n'
        << "pass = " << (res.applicable ? (res.pass ? "yes" : "no") : "n/a") << '\n';
    res.files = write_outputs(man, csv.str(), sum.str());
    return res;
}

PhaseScanResult run_phase_scan(const ExperimentManifest& man) {
    if (man.beta_grid.empty() || man.n_values.size() < 2)
        throw std::invalid_argument("phase scan: need beta_grid and at least two n_values");
    std::vector<double> lambda;
    std::optional<BlockProbTensor> Theta;
    block_problem(man, lambda, Theta);
    const int p = man.model.p;

    PhaseScanResult res;
    res.beta_star = landscape::beta_star_hsbm(p, lambda, *Theta).beta_star;
    res.transition_beta = std::numeric_limits<double>::quiet_NaN();

    long long n_min = man.n_values.front(), n_max = man.n_values.back();
    for (double beta : man.beta_grid) {
        double f_min = 0.0, f_max = 0.0;
        std::vector<PhaseScanRow> rows;
        for (long long n : man.n_values) {
            auto avg = oracle::averaged_hsbm_log_partition(p, static_cast<int>(n), lambda, *Theta,
                                                           beta);
            PhaseScanRow row;
            row.beta = beta;
            row.n = n;
            row.f_bar = avg.log_partition;
            row.diag_bound = avg.diag_correction_bound;
            row.mf_bound = oracle::meanfield_lower_bound(p, static_cast<int>(n), lambda, *Theta, beta);
            rows.push_back(row);
            if (n == n_min) f_min = avg.log_partition;
            if (n == n_max) f_max = avg.log_partition;
        }
        double growth = (f_max - f_min) / static_cast<double>(n_max - n_min);
        for (auto& row : rows) {
            row.growth = growth;
            row.departed = growth > 1e-3;
        }
        if (growth > 1e-3 && std::isnan(res.transition_beta)) res.transition_beta = beta;
        res.rows.insert(res.rows.end(), rows.begin(), rows.end());
    }

    std::ostringstream csv;
    csv << "beta,n,f_bar,diag_correction_bound,mf_lower_bound,growth_per_n,departed\n";
    for (const auto& row : res.rows)
        csv << fmt(row.beta) << ',' << row.n << ',' << fmt(row.f_bar) << ',' << fmt(row.diag_bound)
            << ',' << fmt(row.mf_bound) << ',' << fmt(row.growth) << ',' << (row.departed ? 1 : 0)
            << '\n';

    std::ostringstream sum;
    sum << "experiment = phase_scan\n"
        << "beta_star = " << fmt6(res.beta_star) << '\n'
        << "transition_beta = "
        << (std::isnan(res.transition_beta) ? std::string("none") : fmt6(res.transition_beta))
        << '\n';
    res.files = write_outputs(man, csv.str(), sum.str());
    return res;
}

CoverageResult run_coverage(const ExperimentManifest& man) {
    if (man.model.family != Family::CurieWeiss)
        throw std::invalid_argument("coverage: only the Curie-Weiss CI is implemented");
    const int p = man.model.p;
    double bstar = landscape::beta_star_cw(p, 1e-8);
    if (!(man.beta > bstar))
        throw std::invalid_argument("coverage: beta is not above beta*_CW(p); the CI is undefined "
                                    "below the estimation threshold");

    auto levels =
        exact_cw_sample_levels(p, man.model.n, man.beta, man.replicates, man.seed);
    CoverageResult res;
    res.total = man.replicates;
    std::ostringstream csv;
    csv << "replicate,xbar,ci_lo,ci_hi,covered\n";
    for (long long i = 0; i < man.replicates; ++i) {
        double xb = static_cast<double>(2 * levels[static_cast<std::size_t>(i)] - man.model.n) /
                    static_cast<double>(man.model.n);
        double lo = 0.0, hi = 0.0;
        int covered = 0;
        try {
            auto ci = cw_confidence_interval(xb, p, man.model.n, man.level);
            lo = ci.lo;
            hi = ci.hi;
            covered = (ci.lo <= man.beta && man.beta <= ci.hi) ? 1 : 0;
        } catch (const std::exception&) {
            ++res.undefined_ci;
            lo = hi = std::numeric_limits<double>::quiet_NaN();
        }
        res.covered += covered;
        csv << i << ',' << fmt(xb) << ',' << fmt(lo) << ',' << fmt(hi) << ',' << covered << '\n';
    }
    res.coverage = static_cast<double>(res.covered) / static_cast<double>(res.total);
    res.std_error = std::sqrt(res.coverage * (1.0 - res.coverage) /
                              static_cast<double>(res.total));

    std::ostringstream sum;
    sum << "experiment = coverage\n"
        << "p = " << p << '\n' << "n = " << man.model.n << '\n'
        << "beta = " << fmt6(man.beta) << '\n'
        << "level = " << fmt6(man.level) << '\n'
        << "replicates = " << man.replicates << '\n'
        << "covered = " << res.covered << '\n'
        << "undefined_ci = " << res.undefined_ci << '\n'
        << "coverage = " << fmt6(res.coverage) << '\n'
        << "std_error = " << fmt6(res.std_error) << '\n';
    res.files = write_outputs(man, csv.str(), sum.str());
    return res;
}

std::string run(const ExperimentManifest& man) {
    OutputFiles files;
    switch (man.experiment) {
        case ExperimentKind::Histogram:
        case ExperimentKind::ThresholdMixture:
            files = run_histogram(man).files;
            break;
        case ExperimentKind::ConsistencySweep:
            files = run_consistency_sweep(man).files;
            break;
        case ExperimentKind::PhaseScan:
            files = run_phase_scan(man).files;
            break;
        case ExperimentKind::Coverage:
            files = run_coverage(man).files;
            break;
    }
    std::ifstream in(files.summary_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace tising::experiments
