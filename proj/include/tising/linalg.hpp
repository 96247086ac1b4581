#pragma once

#include "tising/tensor.hpp"

namespace tising {

// Spectral norm of a symmetric matrix, via shifted power iterations on A and
// -A (norm = max |eigenvalue|). Deterministic: fixed internal start vector.
// Relative tolerance ~1e-8. Throws on non-finite entries.
double operator_norm(const SymMatrix& m, double rel_tol = 1e-10, int max_iter = 100000);

}  // namespace tising
