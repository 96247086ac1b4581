#include "tising/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tising {

namespace {

double ipow(double base, int exp) {
    double r = 1.0, b = base;
    for (int e = exp; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
    }
    return r;
}

}  // namespace

double InteractionTensor::factorial(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

InteractionTensor InteractionTensor::curie_weiss_dense(int p, int n) {
    if (p < 2) throw std::invalid_argument("InteractionTensor: order p must be >= 2");
    if (n < p) throw std::invalid_argument("InteractionTensor: need n >= p");
    InteractionTensor t;
    t.p_ = p;
    t.n_ = n;
    t.storage_ = TensorStorage::CurieWeissDense;
    t.family_ = "curie_weiss";
    return t;
}

InteractionTensor InteractionTensor::from_edges(int p, int n, std::vector<Hyperedge> edges,
                                                std::string family) {
    if (p < 2) throw std::invalid_argument("InteractionTensor: order p must be >= 2");
    if (p > 18) throw std::invalid_argument("InteractionTensor: order p too large for exact p!");
    if (n < 1) throw std::invalid_argument("InteractionTensor: need n >= 1");
    // n < p is allowed only for the edgeless tensor (no valid off-diagonal edge)
    if (n < p && !edges.empty())
        throw std::invalid_argument("InteractionTensor: need n >= p when edges are present");
    for (const auto& e : edges) {
        if (static_cast<int>(e.vertices.size()) != p)
            throw std::invalid_argument("InteractionTensor: edge arity != p");
        for (std::size_t k = 0; k < e.vertices.size(); ++k) {
            int v = e.vertices[k];
            if (v < 0 || v >= n) throw std::invalid_argument("InteractionTensor: vertex out of range");
            if (k > 0 && e.vertices[k - 1] >= v)
                throw std::invalid_argument("InteractionTensor: edge indices must be strictly increasing");
        }
        if (!std::isfinite(e.weight)) throw std::invalid_argument("InteractionTensor: non-finite weight");
    }
    std::sort(edges.begin(), edges.end(),
              [](const Hyperedge& a, const Hyperedge& b) { return a.vertices < b.vertices; });
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i].vertices == edges[i - 1].vertices)
            throw std::invalid_argument("InteractionTensor: duplicate canonical edge");
    }

    InteractionTensor t;
    t.p_ = p;
    t.n_ = n;
    t.storage_ = TensorStorage::SparseEdges;
    t.family_ = std::move(family);
    t.verts_.reserve(edges.size() * static_cast<std::size_t>(p));
    t.weights_.reserve(edges.size());
    for (const auto& e : edges) {
        t.verts_.insert(t.verts_.end(), e.vertices.begin(), e.vertices.end());
        t.weights_.push_back(e.weight);
    }
    t.incidence_.assign(static_cast<std::size_t>(n), {});
    for (std::size_t e = 0; e < t.weights_.size(); ++e) {
        const int* v = t.edge_vertices(e);
        for (int k = 0; k < p; ++k) t.incidence_[static_cast<std::size_t>(v[k])].push_back(e);
    }
    return t;
}

const std::vector<std::size_t>& InteractionTensor::incident_edges(int vertex) const {
    if (storage_ != TensorStorage::SparseEdges)
        throw std::logic_error("incident_edges: only available for sparse storage");
    if (vertex < 0 || vertex >= n_) throw std::out_of_range("incident_edges: vertex out of range");
    return incidence_[static_cast<std::size_t>(vertex)];
}

void InteractionTensor::check_config(const SpinConfig& x) const {
    if (x.n() != n_) throw std::invalid_argument("tensor/config dimension mismatch");
}

double InteractionTensor::hamiltonian(const SpinConfig& x) const {
    check_config(x);
    if (storage_ == TensorStorage::CurieWeissDense) {
        return static_cast<double>(n_) * ipow(x.mean(), p_);
    }
    const double fp = factorial(p_);
    double h = 0.0;
    const std::size_t m = weights_.size();
    for (std::size_t e = 0; e < m; ++e) {
        const int* v = verts_.data() + e * static_cast<std::size_t>(p_);
        int sign = 1;
        for (int k = 0; k < p_; ++k) sign *= x[v[k]];
        h += weights_[e] * sign;
    }
    return fp * h;
}

double InteractionTensor::local_field(const SpinConfig& x, int i) const {
    check_config(x);
    if (i < 0 || i >= n_) throw std::out_of_range("local_field: index out of range");
    if (storage_ == TensorStorage::CurieWeissDense) {
        return ipow(x.mean(), p_ - 1);
    }
    const double fpm1 = factorial(p_ - 1);
    double m = 0.0;
    for (std::size_t e : incidence_[static_cast<std::size_t>(i)]) {
        const int* v = edge_vertices(e);
        int sign = 1;
        for (int k = 0; k < p_; ++k) sign *= x[v[k]];
        // product over the edge minus site i; x_i^2 = 1
        m += weights_[e] * (sign * x[i]);
    }
    return fpm1 * m;
}

std::vector<double> InteractionTensor::all_local_fields(const SpinConfig& x) const {
    check_config(x);
    std::vector<double> fields(static_cast<std::size_t>(n_), 0.0);
    if (storage_ == TensorStorage::CurieWeissDense) {
        double m = ipow(x.mean(), p_ - 1);
        std::fill(fields.begin(), fields.end(), m);
        return fields;
    }
    const double fpm1 = factorial(p_ - 1);
    const std::size_t m = weights_.size();
    for (std::size_t e = 0; e < m; ++e) {
        const int* v = verts_.data() + e * static_cast<std::size_t>(p_);
        int sign = 1;
        for (int k = 0; k < p_; ++k) sign *= x[v[k]];
        double base = weights_[e] * sign;
        for (int k = 0; k < p_; ++k) fields[static_cast<std::size_t>(v[k])] += base * x[v[k]];
    }
    for (double& f : fields) f *= fpm1;
    return fields;
}

LocalInteractionMatrix InteractionTensor::local_interaction_matrix(const SpinConfig& x) const {
    check_config(x);
    LocalInteractionMatrix out;
    out.entries = SymMatrix(n_);
    out.config_hash = x.hash();
    if (storage_ == TensorStorage::CurieWeissDense) {
        double v = ipow(x.mean(), p_ - 2) / static_cast<double>(n_);
        std::fill(out.entries.a.begin(), out.entries.a.end(), v);
        return out;
    }
    const double fpm2 = factorial(p_ - 2);
    const std::size_t m = weights_.size();
    for (std::size_t e = 0; e < m; ++e) {
        const int* v = verts_.data() + e * static_cast<std::size_t>(p_);
        int sign = 1;
        for (int k = 0; k < p_; ++k) sign *= x[v[k]];
        for (int a = 0; a < p_; ++a) {
            for (int b = a + 1; b < p_; ++b) {
                // product over the edge minus sites {a,b}
                double c = fpm2 * weights_[e] * (sign * x[v[a]] * x[v[b]]);
                out.entries.at(v[a], v[b]) += c;
                out.entries.at(v[b], v[a]) += c;
            }
        }
    }
    return out;
}

CoDegreeMatrix InteractionTensor::codegree_matrix() const {
    if (storage_ != TensorStorage::SparseEdges)
        throw std::invalid_argument(
            "codegree_matrix: unsupported storage (Curie-Weiss dense tensor mixes diagonal conventions)");
    CoDegreeMatrix out;
    out.entries = SymMatrix(n_);
    const std::size_t m = weights_.size();
    for (std::size_t e = 0; e < m; ++e) {
        const int* v = verts_.data() + e * static_cast<std::size_t>(p_);
        double w = std::fabs(weights_[e]);
        for (int a = 0; a < p_; ++a) {
            for (int b = a + 1; b < p_; ++b) {
                out.entries.at(v[a], v[b]) += w;
                out.entries.at(v[b], v[a]) += w;
            }
        }
    }
    return out;
}

std::vector<double> InteractionTensor::degrees() const {
    if (storage_ != TensorStorage::SparseEdges)
        throw std::invalid_argument("degrees: unsupported storage");
    std::vector<double> deg(static_cast<std::size_t>(n_), 0.0);
    const std::size_t m = weights_.size();
    for (std::size_t e = 0; e < m; ++e) {
        const int* v = verts_.data() + e * static_cast<std::size_t>(p_);
        double w = std::fabs(weights_[e]);
        for (int k = 0; k < p_; ++k) deg[static_cast<std::size_t>(v[k])] += w;
    }
    return deg;
}

void InteractionTensor::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write tensor file: " + path);
    out << p_ << ' ' << n_ << ' ' << family_ << '\n';
    char buf[40];
    const std::size_t m = weights_.size();
    for (std::size_t e = 0; e < m; ++e) {
        const int* v = verts_.data() + e * static_cast<std::size_t>(p_);
        for (int k = 0; k < p_; ++k) out << (v[k] + 1) << ' ';
        std::snprintf(buf, sizeof buf, "%.17g", weights_[e]);
        out << buf << '\n';
    }
}

InteractionTensor InteractionTensor::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tensor file: " + path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty tensor file: " + path);
    std::istringstream hs(header);
    int p = 0, n = 0;
    std::string family;
    if (!(hs >> p >> n >> family)) throw std::runtime_error("bad tensor header in " + path);
    if (family == "curie_weiss") {
        std::string rest;
        if (in >> rest) throw std::runtime_error("curie_weiss tensor file must have no edge lines");
        return curie_weiss_dense(p, n);
    }
    std::vector<Hyperedge> edges;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Hyperedge e;
        e.vertices.resize(static_cast<std::size_t>(p));
        for (int k = 0; k < p; ++k) {
            if (!(ls >> e.vertices[static_cast<std::size_t>(k)]))
                throw std::runtime_error("bad edge line in " + path);
            e.vertices[static_cast<std::size_t>(k)] -= 1;  // file is 1-based
        }
        if (!(ls >> e.weight)) throw std::runtime_error("bad edge weight in " + path);
        edges.push_back(std::move(e));
    }
    return from_edges(p, n, std::move(edges), family);
}

}  // namespace tising
