#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tising/spin.hpp"

namespace tising {

struct SymMatrix {
    int n = 0;
    std::vector<double> a;  // row-major n*n

    SymMatrix() = default;
    explicit SymMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// J_N(x): contraction of the tensor against x in all slots but two.
struct LocalInteractionMatrix {
    SymMatrix entries;
    std::uint64_t config_hash = 0;
};

struct CoDegreeMatrix {
    SymMatrix entries;
};

struct Hyperedge {
    std::vector<int> vertices;  // strictly increasing, 0-based
    double weight = 0.0;
};

enum class TensorStorage { SparseEdges, CurieWeissDense };

// Symmetric p-tensor over n nodes. Sparse storage keeps one weight per
// canonical hyperedge; the full symmetric tensor has that weight on every
// permutation and zeros on diagonals, so ordered-tuple sums carry a p!
// multiplicity. The Curie-Weiss storage is the analytic tensor
// J_{i_1...i_p} = n^{1-p} on ALL tuples, diagonals included.
class InteractionTensor {
public:
    static InteractionTensor curie_weiss_dense(int p, int n);
    static InteractionTensor from_edges(int p, int n, std::vector<Hyperedge> edges,
                                        std::string family = "from_file");

    int order() const { return p_; }
    int n() const { return n_; }
    TensorStorage storage() const { return storage_; }
    bool includes_diagonal() const { return storage_ == TensorStorage::CurieWeissDense; }
    const std::string& family() const { return family_; }
    void set_family(std::string f) { family_ = std::move(f); }

    std::size_t edge_count() const { return weights_.size(); }
    const std::vector<double>& edge_weights() const { return weights_; }
    // vertices of edge e occupy verts[e*p .. e*p+p)
    const std::vector<int>& edge_vertices_flat() const { return verts_; }
    const int* edge_vertices(std::size_t e) const { return verts_.data() + e * static_cast<std::size_t>(p_); }

    // edges incident to a vertex
    const std::vector<std::size_t>& incident_edges(int vertex) const;

    double hamiltonian(const SpinConfig& x) const;
    double local_field(const SpinConfig& x, int i) const;  // 0-based site index
    std::vector<double> all_local_fields(const SpinConfig& x) const;
    LocalInteractionMatrix local_interaction_matrix(const SpinConfig& x) const;

    CoDegreeMatrix codegree_matrix() const;
    std::vector<double> degrees() const;

    // text format: header "p N family", then one line per canonical edge
    // "i1 ... ip weight" with 1-based strictly increasing indices
    void save(const std::string& path) const;
    static InteractionTensor load(const std::string& path);

    double factorial(int k) const;  // exact for k <= 18

private:
    InteractionTensor() = default;
    void check_config(const SpinConfig& x) const;

    int p_ = 0;
    int n_ = 0;
    TensorStorage storage_ = TensorStorage::SparseEdges;
    std::string family_ = "from_file";
    std::vector<int> verts_;
    std::vector<double> weights_;
    std::vector<std::vector<std::size_t>> incidence_;
};

}  // namespace tising
