#pragma once

#include <optional>
#include <vector>

#include "tising/model_zoo.hpp"

namespace tising::landscape {

// I(t) = ((1+t)log(1+t) + (1-t)log(1-t))/2, with I(+-1) = log 2 by continuity
double binary_entropy(double t);

// g(t) = beta t^p - I(t) and derivatives
double g_value(double beta, int p, double t);
double g_prime(double beta, int p, double t);
double g_second(double beta, int p, double t);

// Positive global maximizer of g on (0,1): present when the interior maximum
// is strictly positive or ties with g(0)=0 at the threshold (tie tolerance
// 1e-7); absent when the global maximum is uniquely at t=0.
std::optional<double> m_star(double beta, int p);

// Largest interior stationary point with g'' < 0, regardless of whether it is
// the global maximizer. Used at the exact threshold where g(m)=g(0)=0.
std::optional<double> positive_stationary_max(double beta, int p);

struct FreeEnergyCurve {
    double beta = 0.0;
    int p = 2;
    std::vector<std::pair<double, double>> maximizers;  // local maxima (t, g(t))
    std::optional<double> m_star;
    double g2_at_mstar = 0.0;

    double g(double t) const { return g_value(beta, p, t); }
};
FreeEnergyCurve free_energy_curve(double beta, int p);

// sup{beta >= 0 : sup_{t in [0,1]} (beta t^p - I(t)) = 0}, by bisection
double beta_star_cw(int p, double tol = 1e-7);
// beta*_ER(p,theta) = beta*_ER(p,1)/theta (change of variable kappa = beta theta)
double beta_star_er(int p, double theta, double tol = 1e-7);

struct SupPhiResult {
    double value = 0.0;               // sup over [0,1]^K, always >= 0
    std::vector<double> argmax;
};

// sup of phi_beta(t_1..t_K) = beta sum_{j_1..j_p} theta_{j_1..j_p}
// prod_l lambda_{j_l} t_{j_l} - sum_j lambda_j I(t_j) over [0,1]^K
SupPhiResult sup_phi_hsbm(double beta, const std::vector<double>& lambda,
                          const BlockProbTensor& Theta);
// sup of beta theta prod_j lambda_j t_j - sum_j lambda_j I(t_j) over [0,1]^p
SupPhiResult sup_phi_partite(double beta, const std::vector<double>& lambda, double theta);

struct ThresholdResult {
    double beta_star = 0.0;
    std::vector<double> argmax_profile;  // maximizer at beta just above beta_star
    double tol_beta = 0.0;               // certified bisection width
    double tol_inner = 0.0;
};

ThresholdResult beta_star_hsbm(int p, const std::vector<double>& lambda,
                               const BlockProbTensor& Theta, double tol = 1e-5);
double beta_star_partite(int p, const std::vector<double>& lambda, double theta,
                         double tol = 1e-5);

// mixture weight at beta = beta*_CW(p):
//   1/(1 + 2[(m*^2-1)g''(m*)]^{-1/2}) for even p,
//   1/(1 +  [(m*^2-1)g''(m*)]^{-1/2}) for odd p
double alpha_weight(int p);

// N(0, -g''(m*)/(p^2 m*^{2p-2})) is the limit law of sqrt(N)(beta_hat - beta)
// above the threshold; fisher_info_limit is the reciprocal (Cramer-Rao bound
// is attained). Both require beta > beta*_CW(p).
double asymptotic_variance(double beta, int p);
double fisher_info_limit(double beta, int p);

// limiting CDF of sqrt(N)(beta_hat - 1/2) for p=2 at the threshold:
// F(sqrt(6t)) - F(-sqrt(6t)) for t >= 0 with dF proportional to exp(-s^4/12)
double threshold_limit_cdf_p2(double t);

}  // namespace tising::landscape
