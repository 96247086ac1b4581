#pragma once

#include <functional>
#include <vector>

#include "tising/model_zoo.hpp"
#include "tising/tensor.hpp"

namespace tising::oracle {

struct ExactDistribution {
    std::vector<double> support;
    std::vector<double> log_weights;
    bool normalized = false;

    void normalize();
    double prob(std::size_t i) const;
    double mean() const;
    double mass_where(const std::function<bool(double)>& pred) const;
};

// F_N(beta) = log[ 2^{-N} sum_x exp(beta H_N(x)) ], exact over all 2^N
// configurations (lexicographic order, log domain). Guard: N <= 22.
double exact_log_partition(const InteractionTensor& tensor, double beta);

// exact E_beta[H_N] by enumeration (same guard)
double exact_mean_hamiltonian(const InteractionTensor& tensor, double beta);

// Curie-Weiss magnetization pmf over xbar in {-1, -1+2/n, ..., 1}:
// log-weight log C(n,k) + beta n xbar^p. Guard n <= 1e6.
ExactDistribution exact_magnetization_pmf(int p, long long n, double beta);

// pushforward of the exact model distribution through the MPL map; +inf kept
// as an explicit atom. Curie-Weiss storage uses the magnetization pmf (any n);
// general tensors enumerate (guard N <= 18).
ExactDistribution exact_mple_distribution(const InteractionTensor& tensor, double beta,
                                          double atom_tol = 1e-12);

// D(P_{beta1} || P_{beta2}) = F(beta2) - F(beta1) - (beta2-beta1) E_{beta1}[H]
double kl_divergence(const InteractionTensor& tensor, double beta1, double beta2);

struct AveragedHsbmResult {
    double log_partition = 0.0;          // block-collapsed F for the averaged model
    double diag_correction_bound = 0.0;  // bound on |beta| * sup_x |H_tilde - H_bar|
};

// Exact log-partition of the block-collapsed averaged HSBM Hamiltonian
// H_bar(X) = N^{1-p} sum_{j_1..j_p} theta_{j_1..j_p} prod_l S_{j_l}(X),
// summed over the product lattice of block magnetizations with binomial
// multiplicities. Guards: K <= 4 and prod(|B_j|+1) <= 1e8.
AveragedHsbmResult averaged_hsbm_log_partition(int p, int n, const std::vector<double>& lambda,
                                               const BlockProbTensor& Theta, double beta);

// N * sup phi_beta: certified mean-field lower bound for E F_N(beta)
double meanfield_lower_bound(int p, int n, const std::vector<double>& lambda,
                             const BlockProbTensor& Theta, double beta);

}  // namespace tising::oracle
