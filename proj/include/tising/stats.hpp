#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace tising::stats {

double log_choose(long long n, long long k);

// streaming log(sum(exp(x_i))); order-sensitive, callers fix the order
class LogSumExp {
public:
    void add(double log_term);
    double value() const;
    bool empty() const { return n_ == 0; }

private:
    double max_ = 0.0;
    double sum_ = 0.0;  // sum of exp(x - max_)
    std::size_t n_ = 0;
};

double logsumexp_pair(double a, double b);

double normal_cdf(double x);
// inverse standard normal CDF; |error| < 1e-13 over (0,1)
double normal_quantile(double prob);

// regularized upper incomplete gamma Q(a, x)
double gamma_q(double a, double x);

double chi_square_p_value(double statistic, int dof);

// one-sample Kolmogorov-Smirnov against a continuous CDF.
// Sorts a copy of the sample; p-value uses the asymptotic Kolmogorov
// distribution with the Stephens small-sample correction.
struct KsResult {
    double statistic;
    double p_value;
};
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

double kolmogorov_q(double lambda);

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double min = 0.0;
    double max = 0.0;
};
Summary summarize(const std::vector<double>& xs);

double quantile(std::vector<double> xs, double q);

}  // namespace tising::stats
