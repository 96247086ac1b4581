#pragma once

#include <string>

#include "tising/tensor.hpp"

namespace tising {

enum MplFlags : unsigned {
    MplConverged = 1u << 0,
    MplNoFiniteRoot = 1u << 1,   // solution set of the gradient equation is empty
    MplZeroAtOrigin = 1u << 2,   // all local fields vanish
};

struct MplResult {
    double beta_hat = 0.0;  // in [0, +inf]; +inf iff NoFiniteRoot
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
    double residual = 0.0;  // |s_X(beta_hat)|
    unsigned flags = 0;

    bool converged() const { return flags & MplConverged; }
    bool infinite() const { return flags & MplNoFiniteRoot; }
};

std::string mpl_flags_to_string(unsigned flags);

// s_X(b) = (H_N(x) - sum_i m_i tanh(p b m_i)) / N, the scaled derivative of
// the log-pseudolikelihood. Nonincreasing in b.
double pseudolik_score(const InteractionTensor& tensor, const SpinConfig& x, double b);

// MPL estimate: inf{b >= 0 : H_N(x) = sum_i m_i tanh(p b m_i)}, +inf when the
// set is empty. Bracketing bisection plus Newton polish; Curie-Weiss tensors
// route through the closed form phi_p(xbar).
MplResult mple(const InteractionTensor& tensor, const SpinConfig& x, double tol = 1e-10,
               double b_max = 1e6);

// Closed-form MPL map for the Curie-Weiss model:
//   t^{1-p} atanh(t) / p   for even p (t != 0) and for odd p with t > 0,
//   +inf                   for odd p with t < 0,
//   0                      at t = 0.
double phi_p(double t, int p);

enum class CiMethod { CurieWeissCLT };

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.0;
    CiMethod method = CiMethod::CurieWeissCLT;
};

// CLT-based interval for the Curie-Weiss model above the estimation
// threshold: center phi_p(|xbar|), half-width
// (|xbar|^{1-p}/p) sqrt(-g''(|xbar|)/n) z_{1-alpha/2}, with the plug-in
// estimate inside g''. Throws when |xbar| < 1e-6, |xbar| >= 1, or
// g''(|xbar|) >= 0 (below-threshold sample).
ConfidenceInterval cw_confidence_interval(double xbar, int p, long long n, double level);

}  // namespace tising
