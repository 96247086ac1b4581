#include "tising/model_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tising/rng.hpp"

namespace tising {

std::string family_name(Family f) {
    switch (f) {
        case Family::CurieWeiss: return "curie_weiss";
        case Family::SK: return "sk";
        case Family::ErdosRenyiHypergraph: return "erdos_renyi";
        case Family::PPartite: return "p_partite";
        case Family::HSBM: return "hsbm";
        case Family::FromFile: return "from_file";
    }
    return "from_file";
}

Family family_from_name(const std::string& name) {
    if (name == "curie_weiss" || name == "cw") return Family::CurieWeiss;
    if (name == "sk") return Family::SK;
    if (name == "erdos_renyi" || name == "er") return Family::ErdosRenyiHypergraph;
    if (name == "p_partite" || name == "partite") return Family::PPartite;
    if (name == "hsbm") return Family::HSBM;
    if (name == "from_file") return Family::FromFile;
    throw std::invalid_argument("unknown family: " + name);
}

namespace {

void validate_lambda(const std::vector<double>& lambda) {
    if (lambda.empty()) throw std::invalid_argument("lambda must be nonempty");
    double sum = 0.0;
    for (double l : lambda) {
        if (!(l > 0.0)) throw std::invalid_argument("lambda entries must be positive");
        sum += l;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw std::invalid_argument("lambda must sum to 1");
}

std::uint64_t edge_count_guard(int n, int p) {
    std::uint64_t cap = 100000000ULL;  // 1e8 canonical edges
    std::uint64_t m = binomial_capped(n, p, cap);
    if (m > cap) throw std::invalid_argument("edge count C(n,p) exceeds the 1e8 guard");
    return m;
}

// lexicographic successor over p-subsets of {0..n-1}; false when exhausted
bool next_combination(std::vector<int>& c, int n) {
    int p = static_cast<int>(c.size());
    int i = p - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - p + i) --i;
    if (i < 0) return false;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < p; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    return true;
}

void apply_edge_count_scale(std::vector<Hyperedge>& edges, int n) {
    if (edges.empty()) return;
    double w = static_cast<double>(n) / static_cast<double>(edges.size());
    for (auto& e : edges) e.weight = w;
}

}  // namespace

std::uint64_t binomial_capped(int n, int p, std::uint64_t cap) {
    if (p < 0 || p > n) return 0;
    long double v = 1.0L;
    for (int i = 1; i <= p; ++i) {
        v *= static_cast<long double>(n - p + i);
        v /= static_cast<long double>(i);
        if (v > static_cast<long double>(cap) * 2.0L) return cap + 1;
    }
    return static_cast<std::uint64_t>(v + 0.5L);
}

BlockStructure BlockStructure::from_proportions(int n, const std::vector<double>& lambda) {
    validate_lambda(lambda);
    int k = static_cast<int>(lambda.size());
    BlockStructure bs;
    bs.block_of.assign(static_cast<std::size_t>(n), 0);
    bs.block_sizes.assign(static_cast<std::size_t>(k), 0);
    double cum = 0.0;
    int prev_hi = 0;
    for (int j = 0; j < k; ++j) {
        cum += lambda[static_cast<std::size_t>(j)];
        int hi = (j == k - 1) ? n
                              : static_cast<int>(std::floor(static_cast<double>(n) * cum + 1e-9));
        hi = std::clamp(hi, prev_hi, n);
        for (int v = prev_hi; v < hi; ++v) bs.block_of[static_cast<std::size_t>(v)] = j;
        bs.block_sizes[static_cast<std::size_t>(j)] = hi - prev_hi;
        prev_hi = hi;
    }
    for (int j = 0; j < k; ++j) {
        if (bs.block_sizes[static_cast<std::size_t>(j)] <= 0)
            throw std::invalid_argument("block interval is empty; increase n or adjust lambda");
    }
    return bs;
}

BlockStructure BlockStructure::from_sizes(const std::vector<int>& sizes) {
    BlockStructure bs;
    bs.block_sizes = sizes;
    int v = 0;
    for (int j = 0; j < static_cast<int>(sizes.size()); ++j) {
        if (sizes[static_cast<std::size_t>(j)] <= 0) throw std::invalid_argument("block sizes must be positive");
        for (int i = 0; i < sizes[static_cast<std::size_t>(j)]; ++i) bs.block_of.push_back(j);
        v += sizes[static_cast<std::size_t>(j)];
    }
    (void)v;
    return bs;
}

BlockProbTensor::BlockProbTensor(int k, int p) : k_(k), p_(p) {
    if (k < 1) throw std::invalid_argument("BlockProbTensor: K must be >= 1");
    if (p < 2) throw std::invalid_argument("BlockProbTensor: p must be >= 2");
}

BlockProbTensor BlockProbTensor::constant(int k, int p, double theta) {
    BlockProbTensor t(k, p);
    std::vector<int> labels(static_cast<std::size_t>(p), 0);
    // enumerate nondecreasing label tuples
    while (true) {
        t.set(labels, theta);
        int i = p - 1;
        while (i >= 0 && labels[static_cast<std::size_t>(i)] == k - 1) --i;
        if (i < 0) break;
        int v = labels[static_cast<std::size_t>(i)] + 1;
        for (int j = i; j < p; ++j) labels[static_cast<std::size_t>(j)] = v;
    }
    return t;
}

void BlockProbTensor::set(std::vector<int> labels, double prob) {
    if (static_cast<int>(labels.size()) != p_) throw std::invalid_argument("BlockProbTensor: arity mismatch");
    for (int l : labels) {
        if (l < 0 || l >= k_) throw std::invalid_argument("BlockProbTensor: label out of range");
    }
    if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("BlockProbTensor: probability outside [0,1]");
    std::sort(labels.begin(), labels.end());
    vals_[std::move(labels)] = prob;
}

double BlockProbTensor::get(std::vector<int> labels) const {
    std::sort(labels.begin(), labels.end());
    return get_sorted(labels);
}

double BlockProbTensor::get_sorted(const std::vector<int>& sorted_labels) const {
    auto it = vals_.find(sorted_labels);
    if (it == vals_.end()) throw std::invalid_argument("BlockProbTensor: entry not set");
    return it->second;
}

InteractionTensor curie_weiss(int p, int n) { return InteractionTensor::curie_weiss_dense(p, n); }

InteractionTensor sk(int p, int n, std::uint64_t seed) {
    edge_count_guard(n, p);
    const double scale = std::pow(static_cast<double>(n), 0.5 * (1.0 - p));
    std::vector<Hyperedge> edges;
    std::vector<int> c(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) c[static_cast<std::size_t>(i)] = i;
    std::uint64_t rank = 0;
    do {
        Rng rng(seed, rank++);
        edges.push_back({c, scale * rng.normal()});
    } while (next_combination(c, n));
    auto t = InteractionTensor::from_edges(p, n, std::move(edges), "sk");
    return t;
}

std::pair<InteractionTensor, BlockStructure> hsbm(int p, int n, const std::vector<double>& lambda,
                                                  const BlockProbTensor& Theta, std::uint64_t seed,
                                                  ScaleMode scale) {
    if (Theta.p() != p) throw std::invalid_argument("hsbm: Theta arity != p");
    if (Theta.k() != static_cast<int>(lambda.size()))
        throw std::invalid_argument("hsbm: Theta block count != |lambda|");
    edge_count_guard(n, p);
    BlockStructure bs = BlockStructure::from_proportions(n, lambda);
    const double w = std::pow(static_cast<double>(n), 1.0 - p);

    std::vector<Hyperedge> edges;
    std::vector<int> c(static_cast<std::size_t>(p));
    std::vector<int> labels(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) c[static_cast<std::size_t>(i)] = i;
    std::uint64_t rank = 0;
    do {
        // vertices ascend and blocks are contiguous, so labels are sorted
        for (int i = 0; i < p; ++i)
            labels[static_cast<std::size_t>(i)] = bs.block_of[static_cast<std::size_t>(c[static_cast<std::size_t>(i)])];
        double prob = Theta.get_sorted(labels);
        Rng rng(seed, rank++);
        if (rng.uniform() < prob) edges.push_back({c, w});
    } while (next_combination(c, n));

    if (scale == ScaleMode::EdgeCount) apply_edge_count_scale(edges, n);
    auto t = InteractionTensor::from_edges(p, n, std::move(edges), "hsbm");
    return {std::move(t), std::move(bs)};
}

InteractionTensor erdos_renyi(int p, int n, double theta, std::uint64_t seed, ScaleMode scale) {
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("erdos_renyi: theta must be in (0,1]");
    auto [t, bs] = hsbm(p, n, {1.0}, BlockProbTensor::constant(1, p, theta), seed, scale);
    (void)bs;
    t.set_family("erdos_renyi");
    return std::move(t);
}

std::pair<InteractionTensor, BlockStructure> p_partite(int p, const std::vector<int>& part_sizes,
                                                       double theta, std::uint64_t seed,
                                                       ScaleMode scale) {
    if (static_cast<int>(part_sizes.size()) != p)
        throw std::invalid_argument("p_partite: need exactly p parts");
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("p_partite: theta must be in (0,1]");
    int n = 0;
    std::uint64_t count = 1;
    for (int s : part_sizes) {
        if (s <= 0) throw std::invalid_argument("p_partite: part sizes must be positive");
        n += s;
        count *= static_cast<std::uint64_t>(s);
        if (count > 100000000ULL) throw std::invalid_argument("p_partite: edge count exceeds the 1e8 guard");
    }
    BlockStructure bs = BlockStructure::from_sizes(part_sizes);
    std::vector<int> offset(static_cast<std::size_t>(p), 0);
    for (int j = 1; j < p; ++j)
        offset[static_cast<std::size_t>(j)] = offset[static_cast<std::size_t>(j - 1)] + part_sizes[static_cast<std::size_t>(j - 1)];

    const double w = std::pow(static_cast<double>(n), 1.0 - p);
    std::vector<Hyperedge> edges;
    std::vector<int> idx(static_cast<std::size_t>(p), 0);  // position within each part
    std::vector<int> verts(static_cast<std::size_t>(p));
    std::uint64_t rank = 0;
    while (true) {
        for (int j = 0; j < p; ++j)
            verts[static_cast<std::size_t>(j)] = offset[static_cast<std::size_t>(j)] + idx[static_cast<std::size_t>(j)];
        Rng rng(seed, rank++);
        if (rng.uniform() < theta) edges.push_back({verts, w});
        int j = p - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == part_sizes[static_cast<std::size_t>(j)] - 1) --j;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
        for (int l = j + 1; l < p; ++l) idx[static_cast<std::size_t>(l)] = 0;
    }

    if (scale == ScaleMode::EdgeCount) apply_edge_count_scale(edges, n);
    auto t = InteractionTensor::from_edges(p, n, std::move(edges), "p_partite");
    return {std::move(t), std::move(bs)};
}

GenerationResult generate(const ModelSpec& spec, ScaleMode scale) {
    switch (spec.family) {
        case Family::CurieWeiss:
            return {curie_weiss(spec.p, spec.n), std::nullopt};
        case Family::SK:
            return {sk(spec.p, spec.n, spec.seed), std::nullopt};
        case Family::ErdosRenyiHypergraph:
            return {erdos_renyi(spec.p, spec.n, spec.theta, spec.seed, scale), std::nullopt};
        case Family::PPartite: {
            std::vector<int> parts = spec.parts;
            if (parts.empty()) {
                if (static_cast<int>(spec.lambda.size()) != spec.p)
                    throw std::invalid_argument("p_partite: need p part sizes or p lambda fractions");
                auto bs = BlockStructure::from_proportions(spec.n, spec.lambda);
                parts = bs.block_sizes;
            }
            auto [t, bs] = p_partite(spec.p, parts, spec.theta, spec.seed, scale);
            return {std::move(t), std::move(bs)};
        }
        case Family::HSBM: {
            if (!spec.Theta) throw std::invalid_argument("hsbm: Theta is required");
            auto [t, bs] = hsbm(spec.p, spec.n, spec.lambda, *spec.Theta, spec.seed, scale);
            return {std::move(t), std::move(bs)};
        }
        case Family::FromFile:
            throw std::invalid_argument("generate: from_file is not a generator family");
    }
    throw std::logic_error("generate: unreachable");
}

}  // namespace tising
