// Test-only reference computations, kept independent of the library's
// evaluation paths: dense ordered-tuple sums, grid-search MPL, dense
// eigensolver spectral norm.
#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "tising/rng.hpp"
#include "tising/spin.hpp"
#include "tising/tensor.hpp"

namespace testsupport {

// Fully symmetrized dense tensor: weight w on every permutation of each
// canonical edge, zero elsewhere. Evaluation is the literal ordered-tuple sum.
struct DenseTensor {
    int p;
    int n;
    std::map<std::vector<int>, double> entries;  // ordered tuples -> J value

    static DenseTensor from(const tising::InteractionTensor& t) {
        DenseTensor d{t.order(), t.n(), {}};
        for (std::size_t e = 0; e < t.edge_count(); ++e) {
            const int* v = t.edge_vertices(e);
            std::vector<int> tuple(v, v + t.order());
            std::sort(tuple.begin(), tuple.end());
            do {
                d.entries[tuple] = t.edge_weights()[e];
            } while (std::next_permutation(tuple.begin(), tuple.end()));
        }
        return d;
    }

    double at(const std::vector<int>& tuple) const {
        auto it = entries.find(tuple);
        return it == entries.end() ? 0.0 : it->second;
    }

    // iterate all of [n]^p
    template <typename F>
    void for_all_tuples(F&& f) const {
        std::vector<int> idx(static_cast<std::size_t>(p), 0);
        while (true) {
            f(idx);
            int j = p - 1;
            while (j >= 0 && idx[static_cast<std::size_t>(j)] == n - 1) --j;
            if (j < 0) break;
            ++idx[static_cast<std::size_t>(j)];
            for (int l = j + 1; l < p; ++l) idx[static_cast<std::size_t>(l)] = 0;
        }
    }

    double hamiltonian(const tising::SpinConfig& x) const {
        double h = 0.0;
        for_all_tuples([&](const std::vector<int>& idx) {
            double j = at(idx);
            if (j == 0.0) return;
            int sign = 1;
            for (int v : idx) sign *= x[v];
            h += j * sign;
        });
        return h;
    }

    double local_field(const tising::SpinConfig& x, int i) const {
        double m = 0.0;
        for_all_tuples([&](const std::vector<int>& idx) {
            if (idx[0] != i) return;
            double j = at(idx);
            if (j == 0.0) return;
            int sign = 1;
            for (std::size_t k = 1; k < idx.size(); ++k) sign *= x[idx[k]];
            m += j * sign;
        });
        return m;
    }

    double lim_entry(const tising::SpinConfig& x, int i1, int i2) const {
        double v = 0.0;
        for_all_tuples([&](const std::vector<int>& idx) {
            if (idx[0] != i1 || idx[1] != i2) return;
            double j = at(idx);
            if (j == 0.0) return;
            int sign = 1;
            for (std::size_t k = 2; k < idx.size(); ++k) sign *= x[idx[k]];
            v += j * sign;
        });
        return v;
    }
};

inline tising::InteractionTensor random_sparse(int p, int n, tising::Rng& rng,
                                               double density = 0.5, bool integer_weights = false) {
    std::vector<tising::Hyperedge> edges;
    std::vector<int> c(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) c[static_cast<std::size_t>(i)] = i;
    while (true) {
        if (rng.uniform() < density) {
            double w = integer_weights ? (rng.bernoulli(0.5) ? 1.0 : -1.0)
                                       : 2.0 * rng.uniform() - 1.0;
            edges.push_back({c, w});
        }
        int i = p - 1;
        while (i >= 0 && c[static_cast<std::size_t>(i)] == n - p + i) --i;
        if (i < 0) break;
        ++c[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < p; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
    return tising::InteractionTensor::from_edges(p, n, std::move(edges));
}

inline tising::SpinConfig random_config(int n, tising::Rng& rng) {
    std::vector<int8_t> s(static_cast<std::size_t>(n));
    for (auto& v : s) v = rng.bernoulli(0.5) ? 1 : -1;
    return tising::SpinConfig(std::move(s));
}

// literal grid scan for the MPL root: first sign change of
// s(b) = H - sum m_i tanh(p b m_i) on {0, step, 2 step, ..., b_max};
// +inf when the score never crosses zero. Crossings are required to clear
// rounding noise so that aligned configurations (H equal to the saturated
// supremum of u) are not mistaken for roots.
inline double grid_search_mple(const tising::InteractionTensor& t, const tising::SpinConfig& x,
                               double b_max = 50.0, double step = 1e-5) {
    const double h = t.hamiltonian(x);
    auto fields = t.all_local_fields(x);
    double total = 0.0;
    for (double m : fields) total += std::fabs(m);
    const double noise = 1e-12 * std::max(1.0, total);
    auto score = [&](double b) {
        double u = 0.0;
        for (double m : fields) u += m * std::tanh(t.order() * b * m);
        return h - u;
    };
    double prev = score(0.0);
    if (prev == 0.0) return 0.0;
    if (prev < 0.0) return std::numeric_limits<double>::infinity();
    const auto steps = static_cast<long long>(b_max / step);
    for (long long k = 1; k <= steps; ++k) {
        double b = k * step;
        double cur = score(b);
        if (cur <= -noise) return b - 0.5 * step;
        prev = cur;
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace testsupport
