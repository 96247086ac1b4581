// tising: p-tensor Ising models, maximum pseudo-likelihood estimation, and
// estimability thresholds.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tising/experiments.hpp"
#include "tising/landscape.hpp"
#include "tising/model_zoo.hpp"
#include "tising/mple.hpp"
#include "tising/oracle.hpp"
#include "tising/sampler.hpp"

using nlohmann::json;
using namespace tising;

namespace {

json block_structure_json(const BlockStructure& bs) {
    json j;
    j["block_sizes"] = bs.block_sizes;
    return j;
}

std::optional<BlockProbTensor> parse_theta_entries(int k, int p,
                                                   const std::vector<std::string>& entries) {
    if (entries.empty()) return std::nullopt;
    BlockProbTensor t(k, p);
    for (const auto& s : entries) {
        std::istringstream is(s);
        std::vector<double> nums;
        double v;
        while (is >> v) nums.push_back(v);
        if (static_cast<int>(nums.size()) != p + 1)
            throw CLI::ValidationError("--theta-entry needs p labels (1-based) and a probability");
        std::vector<int> labels;
        for (int i = 0; i < p; ++i) labels.push_back(static_cast<int>(nums[static_cast<std::size_t>(i)]) - 1);
        t.set(labels, nums.back());
    }
    return t;
}

double beta_hat_or_inf(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    return std::stod(s);
}

json mpl_result_json(const MplResult& r) {
    auto extended = [](double v) { return std::isinf(v) ? json("inf") : json(v); };
    json j;
    j["beta_hat"] = extended(r.beta_hat);
    j["residual"] = extended(r.residual);
    j["bracket"] = {extended(r.bracket_lo), extended(r.bracket_hi)};
    j["iterations"] = r.iterations;
    j["flags"] = mpl_flags_to_string(r.flags);
    return j;
}

void warn_near_critical(const InteractionTensor& tensor, double beta) {
    double bstar = -1.0;
    if (tensor.family() == "curie_weiss")
        bstar = landscape::beta_star_cw(tensor.order());
    else if (tensor.family() == "erdos_renyi")
        return;  // theta not stored in the tensor file; sidecar has it
    if (bstar > 0 && std::fabs(beta - bstar) < 0.1 * bstar) {
        std::cerr << "warning: beta is within 10% of the estimation threshold beta* = " << bstar
                  << "; Glauber mixing is slow there. The exact Curie-Weiss sampler is used "
                     "automatically for curie_weiss tensors.\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-tensor Ising models: generators, samplers, MPL estimation, thresholds"};
    app.require_subcommand(1);

    // ---- generate ----
    auto* gen = app.add_subcommand("generate", "generate an interaction tensor");
    std::string g_family = "cw", g_out = "tensor.txt", g_scale = "default";
    int g_p = 2, g_n = 10, g_k = 1;
    double g_theta = 1.0;
    std::vector<double> g_lambda;
    std::vector<int> g_parts;
    std::vector<std::string> g_theta_entries;
    std::uint64_t g_seed = 0;
    gen->add_option("--family", g_family, "cw|sk|er|partite|hsbm")->required();
    gen->add_option("--p", g_p, "tensor order")->required();
    gen->add_option("--n", g_n, "number of nodes");
    gen->add_option("--theta", g_theta, "edge probability (er/partite)");
    gen->add_option("--lambda", g_lambda, "block proportions (hsbm) or part fractions (partite)");
    gen->add_option("--parts", g_parts, "explicit part sizes (partite)");
    gen->add_option("--K", g_k, "number of blocks (hsbm)");
    gen->add_option("--theta-entry", g_theta_entries,
                    "hsbm block probability: \"j1 .. jp prob\" (1-based labels, repeatable)");
    gen->add_option("--seed", g_seed, "RNG seed");
    gen->add_option("--scale", g_scale, "default|ncount (N/|E| normalization)");
    gen->add_option("--out", g_out, "output tensor file");

    // ---- sample ----
    auto* smp = app.add_subcommand("sample", "draw configurations from P_beta");
    std::string s_tensor, s_model, s_out = "samples.txt";
    double s_beta = 1.0, s_theta = 1.0;
    int s_p = 2, s_n = 10;
    std::uint64_t s_model_seed = 0;
    long long s_count = 1, s_burn = 200, s_thin = 1;
    std::uint64_t s_seed = 0;
    bool s_exact_enum = false;
    smp->add_option("--tensor-file", s_tensor, "tensor file");
    smp->add_option("--model", s_model, "inline model family: cw|sk|er (alternative to --tensor-file)");
    smp->add_option("--p", s_p, "tensor order (with --model)");
    smp->add_option("--n", s_n, "nodes (with --model)");
    smp->add_option("--theta", s_theta, "edge probability (with --model er)");
    smp->add_option("--model-seed", s_model_seed, "generator seed (with --model)");
    smp->add_option("--beta", s_beta, "inverse temperature")->required();
    smp->add_option("--samples", s_count, "number of configurations");
    smp->add_option("--burn-in", s_burn, "burn-in sweeps (N site-updates each)");
    smp->add_option("--thin", s_thin, "sweeps between samples");
    smp->add_option("--seed", s_seed, "RNG seed");
    smp->add_flag("--exact-enum", s_exact_enum, "force exact enumeration sampling (N <= 20)");
    smp->add_option("--out", s_out, "output file, one configuration per line");

    // ---- estimate ----
    auto* est = app.add_subcommand("estimate", "maximum pseudo-likelihood estimate");
    std::string e_tensor, e_samples, e_out;
    double e_tol = 1e-10, e_ci_level = 0.0;
    est->add_option("--tensor-file", e_tensor, "tensor file")->required();
    est->add_option("--sample-file", e_samples, "configurations, one per line")->required();
    est->add_option("--tol", e_tol, "score tolerance");
    est->add_option("--ci-level", e_ci_level, "confidence level (Curie-Weiss tensors only)");
    est->add_option("--out", e_out, "write JSON records here instead of stdout");

    // ---- threshold ----
    auto* thr = app.add_subcommand("threshold", "estimability threshold beta*");
    std::string t_family = "cw";
    int t_p = 2, t_k = 1;
    double t_theta = 1.0, t_tol = 1e-5;
    std::vector<double> t_lambda;
    std::vector<std::string> t_theta_entries;
    thr->add_option("--family", t_family, "cw|er|partite|hsbm")->required();
    thr->add_option("--p", t_p, "tensor order")->required();
    thr->add_option("--theta", t_theta, "edge probability");
    thr->add_option("--lambda", t_lambda, "block proportions");
    thr->add_option("--K", t_k, "number of blocks (hsbm)");
    thr->add_option("--theta-entry", t_theta_entries, "hsbm block probability (repeatable)");
    thr->add_option("--tol", t_tol, "outer bisection tolerance");

    // ---- oracle ----
    auto* orc = app.add_subcommand("oracle", "exact reference computations");
    std::string o_verb, o_tensor;
    double o_beta = 0.0, o_beta2 = 0.0, o_theta = 1.0;
    int o_p = 2, o_n = 10, o_k = 1;
    std::vector<double> o_lambda;
    std::vector<std::string> o_theta_entries;
    orc->add_option("verb", o_verb, "logZ|magpmf|mplepmf|kl|avg-hsbm|mf-bound")->required();
    orc->add_option("--tensor-file", o_tensor, "tensor file (logZ/mplepmf/kl)");
    orc->add_option("--beta", o_beta, "inverse temperature");
    orc->add_option("--beta2", o_beta2, "second inverse temperature (kl)");
    orc->add_option("--p", o_p, "tensor order (magpmf/avg-hsbm/mf-bound)");
    orc->add_option("--n", o_n, "nodes");
    orc->add_option("--K", o_k, "blocks");
    orc->add_option("--theta", o_theta, "edge probability (K=1 shortcut)");
    orc->add_option("--lambda", o_lambda, "block proportions");
    orc->add_option("--theta-entry", o_theta_entries, "block probability (repeatable)");

    // ---- experiment ----
    auto* exp = app.add_subcommand("experiment", "run a manifest-driven experiment");
    std::string x_verb, x_manifest;
    exp->add_option("verb", x_verb, "run")->required();
    exp->add_option("manifest", x_manifest, "manifest file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            ModelSpec spec;
            spec.family = family_from_name(g_family);
            spec.p = g_p;
            spec.n = g_n;
            spec.theta = g_theta;
            spec.lambda = g_lambda;
            spec.parts = g_parts;
            spec.seed = g_seed;
            if (spec.family == Family::HSBM) {
                if (g_lambda.empty()) throw CLI::ValidationError("hsbm requires --lambda");
                g_k = static_cast<int>(g_lambda.size());
                spec.Theta = parse_theta_entries(g_k, g_p, g_theta_entries);
                if (!spec.Theta) spec.Theta = BlockProbTensor::constant(g_k, g_p, g_theta);
            }
            ScaleMode scale = g_scale == "ncount" ? ScaleMode::EdgeCount : ScaleMode::Default;
            auto result = generate(spec, scale);
            result.tensor.save(g_out);
            json meta;
            meta["family"] = family_name(spec.family);
            meta["p"] = spec.p;
            meta["n"] = result.tensor.n();
            meta["seed"] = spec.seed;
            meta["scale"] = g_scale;
            meta["edge_count"] = result.tensor.edge_count();
            if (spec.family == Family::ErdosRenyiHypergraph || spec.family == Family::PPartite)
                meta["theta"] = spec.theta;
            if (!spec.lambda.empty()) meta["lambda"] = spec.lambda;
            if (result.blocks) meta["blocks"] = block_structure_json(*result.blocks);
            std::ofstream(g_out + ".meta.json") << meta.dump(2) << '\n';
            std::cout << "wrote " << g_out << " (" << result.tensor.edge_count() << " edges)\n";
        } else if (*smp) {
            if (s_tensor.empty() == s_model.empty())
                throw CLI::ValidationError("sample needs exactly one of --tensor-file / --model");
            InteractionTensor tensor = [&] {
                if (!s_tensor.empty()) return InteractionTensor::load(s_tensor);
                ModelSpec spec;
                spec.family = family_from_name(s_model);
                spec.p = s_p;
                spec.n = s_n;
                spec.theta = s_theta;
                spec.seed = s_model_seed;
                return std::move(generate(spec).tensor);
            }();
            warn_near_critical(tensor, s_beta);
            SampleSchedule sched{s_count, s_burn, s_thin, s_seed, 0};
            auto configs = sample(tensor, s_beta, sched, s_exact_enum);
            save_spin_configs(s_out, configs);
            std::cout << "wrote " << configs.size() << " configurations to " << s_out << '\n';
        } else if (*est) {
            auto tensor = InteractionTensor::load(e_tensor);
            auto configs = load_spin_configs(e_samples);
            json records = json::array();
            for (const auto& x : configs) {
                auto r = mple(tensor, x, e_tol);
                json j = mpl_result_json(r);
                if (e_ci_level > 0.0) {
                    if (tensor.storage() != TensorStorage::CurieWeissDense)
                        throw std::invalid_argument("--ci-level requires a curie_weiss tensor");
                    auto ci = cw_confidence_interval(x.mean(), tensor.order(), tensor.n(), e_ci_level);
                    j["ci"] = {{"lo", ci.lo}, {"hi", ci.hi}, {"level", ci.level},
                               {"method", "CurieWeissCLT"}};
                }
                records.push_back(std::move(j));
            }
            std::string out = records.size() == 1 ? records[0].dump(2) : records.dump(2);
            if (e_out.empty())
                std::cout << out << '\n';
            else
                std::ofstream(e_out) << out << '\n';
        } else if (*thr) {
            json j;
            // maximizer just above the threshold, matching the hsbm output
            auto scalar_profile = [&](double bstar, double theta) {
                auto m = landscape::positive_stationary_max((bstar + 10 * t_tol) * theta, t_p);
                j["argmax_profile"] = std::vector<double>{m ? *m : 0.0};
            };
            if (t_family == "cw") {
                double bstar = landscape::beta_star_cw(t_p, std::min(t_tol, 1e-6));
                j["beta_star"] = bstar;
                scalar_profile(bstar, 1.0);
                j["tol_beta"] = std::min(t_tol, 1e-6);
                j["family"] = "cw";
            } else if (t_family == "er") {
                double bstar = landscape::beta_star_er(t_p, t_theta, std::min(t_tol, 1e-6));
                j["beta_star"] = bstar;
                scalar_profile(bstar, t_theta);
                j["tol_beta"] = std::min(t_tol, 1e-6);
                j["family"] = "er";
            } else if (t_family == "partite") {
                if (t_lambda.empty())
                    t_lambda.assign(static_cast<std::size_t>(t_p), 1.0 / t_p);
                double bstar = landscape::beta_star_partite(t_p, t_lambda, t_theta, t_tol);
                j["beta_star"] = bstar;
                j["argmax_profile"] =
                    landscape::sup_phi_partite(bstar + 10 * t_tol, t_lambda, t_theta).argmax;
                j["tol_beta"] = t_tol;
                j["family"] = "partite";
            } else if (t_family == "hsbm") {
                if (t_lambda.empty()) throw CLI::ValidationError("hsbm requires --lambda");
                t_k = static_cast<int>(t_lambda.size());
                auto Theta = parse_theta_entries(t_k, t_p, t_theta_entries);
                if (!Theta) Theta = BlockProbTensor::constant(t_k, t_p, t_theta);
                auto res = landscape::beta_star_hsbm(t_p, t_lambda, *Theta, t_tol);
                j["beta_star"] = res.beta_star;
                j["argmax_profile"] = res.argmax_profile;
                j["tol_beta"] = res.tol_beta;
                j["tol_inner"] = res.tol_inner;
                j["family"] = "hsbm";
            } else {
                throw CLI::ValidationError("unknown family: " + t_family);
            }
            std::cout << j.dump(2) << '\n';
        } else if (*orc) {
            auto need_tensor = [&]() {
                if (o_tensor.empty()) throw CLI::ValidationError("this verb needs --tensor-file");
                return InteractionTensor::load(o_tensor);
            };
            auto block_inputs = [&](std::vector<double>& lambda,
                                    std::optional<BlockProbTensor>& Theta) {
                lambda = o_lambda.empty() ? std::vector<double>{1.0} : o_lambda;
                o_k = static_cast<int>(lambda.size());
                Theta = parse_theta_entries(o_k, o_p, o_theta_entries);
                if (!Theta) Theta = BlockProbTensor::constant(o_k, o_p, o_theta);
            };
            if (o_verb == "logZ") {
                std::printf("%.17g\n", oracle::exact_log_partition(need_tensor(), o_beta));
            } else if (o_verb == "magpmf") {
                auto d = oracle::exact_magnetization_pmf(o_p, o_n, o_beta);
                std::printf("xbar,probability\n");
                for (std::size_t i = 0; i < d.support.size(); ++i)
                    std::printf("%.17g,%.17g\n", d.support[i], d.prob(i));
            } else if (o_verb == "mplepmf") {
                auto d = oracle::exact_mple_distribution(need_tensor(), o_beta);
                std::printf("beta_hat,probability\n");
                for (std::size_t i = 0; i < d.support.size(); ++i) {
                    if (std::isinf(d.support[i]))
                        std::printf("inf,%.17g\n", d.prob(i));
                    else
                        std::printf("%.17g,%.17g\n", d.support[i], d.prob(i));
                }
            } else if (o_verb == "kl") {
                std::printf("%.17g\n", oracle::kl_divergence(need_tensor(), o_beta, o_beta2));
            } else if (o_verb == "avg-hsbm") {
                std::vector<double> lambda;
                std::optional<BlockProbTensor> Theta;
                block_inputs(lambda, Theta);
                auto r = oracle::averaged_hsbm_log_partition(o_p, o_n, lambda, *Theta, o_beta);
                std::printf("log_partition,diag_correction_bound\n%.17g,%.17g\n", r.log_partition,
                            r.diag_correction_bound);
            } else if (o_verb == "mf-bound") {
                std::vector<double> lambda;
                std::optional<BlockProbTensor> Theta;
                block_inputs(lambda, Theta);
                std::printf("%.17g\n",
                            oracle::meanfield_lower_bound(o_p, o_n, lambda, *Theta, o_beta));
            } else {
                throw CLI::ValidationError("unknown oracle verb: " + o_verb);
            }
        } else if (*exp) {
            if (x_verb != "run") throw CLI::ValidationError("usage: experiment run <manifest>");
            auto man = experiments::ExperimentManifest::parse_file(x_manifest);
            std::cout << experiments::run(man);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
