#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tising/tensor.hpp"

namespace tising {

enum class Family { CurieWeiss, SK, ErdosRenyiHypergraph, PPartite, HSBM, FromFile };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Contiguous-interval block assignment: block j covers
// (N * sum_{i<j} lambda_i, N * sum_{i<=j} lambda_i] as 1-based vertex labels.
struct BlockStructure {
    std::vector<int> block_of;    // vertex (0-based) -> block label (0-based)
    std::vector<int> block_sizes;

    int k() const { return static_cast<int>(block_sizes.size()); }
    static BlockStructure from_proportions(int n, const std::vector<double>& lambda);
    static BlockStructure from_sizes(const std::vector<int>& sizes);
};

// Symmetric probability tensor over K block labels, stored once per sorted
// label multiset.
class BlockProbTensor {
public:
    BlockProbTensor(int k, int p);
    static BlockProbTensor constant(int k, int p, double theta);

    int k() const { return k_; }
    int p() const { return p_; }

    void set(std::vector<int> labels, double prob);  // any label order
    double get(std::vector<int> labels) const;
    double get_sorted(const std::vector<int>& sorted_labels) const;

    // sorted multisets in lexicographic order, with their value
    const std::map<std::vector<int>, double>& entries() const { return vals_; }

private:
    int k_;
    int p_;
    std::map<std::vector<int>, double> vals_;
};

struct ModelSpec {
    Family family = Family::CurieWeiss;
    int p = 2;
    int n = 0;
    double theta = 1.0;                       // ER / p-partite edge probability
    std::vector<double> lambda;               // HSBM proportions (or p-partite fractions)
    std::optional<BlockProbTensor> Theta;     // HSBM block probabilities
    std::vector<int> parts;                   // p-partite part sizes (overrides lambda)
    std::uint64_t seed = 0;
};

enum class ScaleMode {
    Default,    // per-family scaling from the model definition (N^{1-p} for hypergraphs)
    EdgeCount,  // N/|E| on present edges (unweighted-hypergraph normalization)
};

InteractionTensor curie_weiss(int p, int n);
InteractionTensor sk(int p, int n, std::uint64_t seed);
std::pair<InteractionTensor, BlockStructure> hsbm(int p, int n, const std::vector<double>& lambda,
                                                  const BlockProbTensor& Theta, std::uint64_t seed,
                                                  ScaleMode scale = ScaleMode::Default);
InteractionTensor erdos_renyi(int p, int n, double theta, std::uint64_t seed,
                              ScaleMode scale = ScaleMode::Default);
std::pair<InteractionTensor, BlockStructure> p_partite(int p, const std::vector<int>& part_sizes,
                                                       double theta, std::uint64_t seed,
                                                       ScaleMode scale = ScaleMode::Default);

struct GenerationResult {
    InteractionTensor tensor;
    std::optional<BlockStructure> blocks;
};
GenerationResult generate(const ModelSpec& spec, ScaleMode scale = ScaleMode::Default);

std::uint64_t binomial_capped(int n, int p, std::uint64_t cap);

}  // namespace tising
