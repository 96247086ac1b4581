#include "tising/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tising/rng.hpp"

namespace tising {

namespace {

// largest eigenvalue of (sign*A + shift*I) minus shift, by power iteration
// with Rayleigh-quotient stopping
double extreme_eigenvalue(const SymMatrix& m, double sign, double shift, double rel_tol,
                          int max_iter) {
    const int n = m.n;
    Rng rng(0xB5C0FFEEULL, static_cast<std::uint64_t>(n));
    std::vector<double> v(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = rng.uniform() + 0.5;
        norm += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;

    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        for (int i = 0; i < n; ++i) {
            double s = shift * v[static_cast<std::size_t>(i)];
            const double* row = m.a.data() + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) s += sign * row[j] * v[static_cast<std::size_t>(j)];
            w[static_cast<std::size_t>(i)] = s;
        }
        double rayleigh = 0.0, wn = 0.0;
        for (int i = 0; i < n; ++i) {
            rayleigh += v[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
            wn += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
        }
        wn = std::sqrt(wn);
        if (wn == 0.0) return -shift;  // v in the kernel of the shifted matrix
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / wn;
        if (it > 0 && std::fabs(rayleigh - lambda) <= rel_tol * std::max(shift, 1e-300)) {
            lambda = rayleigh;
            break;
        }
        lambda = rayleigh;
    }
    return lambda - shift;
}

}  // namespace

double operator_norm(const SymMatrix& m, double rel_tol, int max_iter) {
    if (m.n == 0) return 0.0;
    double row_bound = 0.0;
    for (int i = 0; i < m.n; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.n; ++j) {
            double v = m.at(i, j);
            if (!std::isfinite(v)) throw std::invalid_argument("operator_norm: non-finite entry");
            s += std::fabs(v);
        }
        row_bound = std::max(row_bound, s);
    }
    if (row_bound == 0.0) return 0.0;
    double hi = extreme_eigenvalue(m, +1.0, row_bound, rel_tol, max_iter);
    double lo = extreme_eigenvalue(m, -1.0, row_bound, rel_tol, max_iter);
    return std::max(hi, lo);
}

}  // namespace tising
