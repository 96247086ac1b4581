#include "tising/mple.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tising/stats.hpp"

namespace tising {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ipow(double base, int exp) {
    double r = 1.0, b = base;
    for (int e = exp; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
    }
    return r;
}

double atanh_stable(double t) { return 0.5 * (std::log1p(t) - std::log1p(-t)); }

double sech2(double z) {
    double e = std::exp(-std::fabs(z));
    double c = 2.0 * e / (1.0 + e * e);
    return c * c;
}

struct ScoreFn {
    const std::vector<double>& fields;
    double h;
    int p;
    int n;

    // s(b) = (H - u(b))/N with u(b) = sum_i m_i tanh(p b m_i)
    double operator()(double b) const {
        double u = 0.0;
        for (double m : fields) u += m * std::tanh(p * b * m);
        return (h - u) / n;
    }
    // s'(b) = -(p/N) sum_i m_i^2 sech^2(p b m_i)
    double deriv(double b) const {
        double d = 0.0;
        for (double m : fields) d += m * m * sech2(p * b * m);
        return -d * p / n;
    }
};

}  // namespace

std::string mpl_flags_to_string(unsigned flags) {
    std::string s;
    auto add = [&s](const char* name) {
        if (!s.empty()) s += "|";
        s += name;
    };
    if (flags & MplConverged) add("Converged");
    if (flags & MplNoFiniteRoot) add("NoFiniteRoot");
    if (flags & MplZeroAtOrigin) add("ZeroAtOrigin");
    if (s.empty()) s = "none";
    return s;
}

double pseudolik_score(const InteractionTensor& tensor, const SpinConfig& x, double b) {
    if (b < 0.0) throw std::invalid_argument("pseudolik_score: b must be >= 0");
    auto fields = tensor.all_local_fields(x);
    ScoreFn s{fields, tensor.hamiltonian(x), tensor.order(), tensor.n()};
    return s(b);
}

double phi_p(double t, int p) {
    if (p < 2) throw std::invalid_argument("phi_p: p must be >= 2");
    if (std::fabs(t) > 1.0) throw std::domain_error("phi_p: |t| > 1");
    if (t == 0.0) return 0.0;
    if ((p % 2 == 1) && t < 0.0) return kInf;
    if (std::fabs(t) == 1.0) return kInf;
    return atanh_stable(t) / (p * ipow(t, p - 1));
}

MplResult mple(const InteractionTensor& tensor, const SpinConfig& x, double tol, double b_max) {
    MplResult r;

    if (tensor.storage() == TensorStorage::CurieWeissDense) {
        double xbar = x.mean();
        double bh = phi_p(xbar, tensor.order());
        r.beta_hat = bh;
        if (std::isinf(bh)) {
            r.flags = MplNoFiniteRoot;
            r.bracket_lo = b_max;
            r.bracket_hi = kInf;
            r.residual = kInf;
        } else {
            r.flags = MplConverged;
            r.bracket_lo = r.bracket_hi = bh;
            double m = ipow(xbar, tensor.order() - 1);
            r.residual = std::fabs(ipow(xbar, tensor.order()) -
                                   m * std::tanh(tensor.order() * bh * m));
        }
        return r;
    }

    auto fields = tensor.all_local_fields(x);
    const double h = tensor.hamiltonian(x);
    ScoreFn s{fields, h, tensor.order(), tensor.n()};

    double total = 0.0;
    for (double m : fields) total += std::fabs(m);

    if (total == 0.0) {
        r.flags = MplZeroAtOrigin;
        if (h == 0.0) {
            r.beta_hat = 0.0;
            r.flags |= MplConverged;
        } else {
            r.beta_hat = kInf;
            r.flags |= MplNoFiniteRoot;
            r.residual = std::fabs(h) / tensor.n();
        }
        return r;
    }
    if (h == 0.0) {
        // u(0) = 0 = H, so 0 belongs to the solution set and is its infimum
        r.beta_hat = 0.0;
        r.flags = MplConverged;
        return r;
    }
    if (h < 0.0 || h >= total) {
        // u is nonnegative with supremum sum_i |m_i|: empty solution set
        r.beta_hat = kInf;
        r.flags = MplNoFiniteRoot;
        r.residual = std::fabs(s(b_max));
        return r;
    }

    // 0 < H < sum|m_i|: s is nonincreasing with s(0) > 0, a root exists
    double lo = 0.0, hi = 1.0;
    int iters = 0;
    double s_hi = s(hi);
    ++iters;
    while (s_hi > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > b_max) {
            r.beta_hat = kInf;
            r.flags = MplNoFiniteRoot;
            r.iterations = iters;
            r.residual = s_hi;
            return r;
        }
        s_hi = s(hi);
        ++iters;
    }

    while (hi - lo > 1e-6) {
        double mid = 0.5 * (lo + hi);
        double sm = s(mid);
        ++iters;
        if (sm > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    r.bracket_lo = lo;
    r.bracket_hi = hi;

    // Newton polish, safeguarded by the bracket
    double b = 0.5 * (lo + hi);
    double sb = s(b);
    ++iters;
    for (int k = 0; k < 200 && std::fabs(sb) > tol; ++k) {
        double d = s.deriv(b);
        double bn = (d != 0.0) ? b - sb / d : 0.5 * (lo + hi);
        if (!(bn > lo && bn < hi)) bn = 0.5 * (lo + hi);
        double sn = s(bn);
        ++iters;
        if (sn > 0.0)
            lo = bn;
        else
            hi = bn;
        b = bn;
        sb = sn;
        if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    }

    r.beta_hat = b;
    r.iterations = iters;
    r.residual = std::fabs(sb);
    if (r.residual <= tol) r.flags |= MplConverged;
    return r;
}

ConfidenceInterval cw_confidence_interval(double xbar, int p, long long n, double level) {
    double a = std::fabs(xbar);
    if (a < 1e-6) throw std::invalid_argument("cw_confidence_interval: |xbar| too close to zero");
    if (a >= 1.0) throw std::invalid_argument("cw_confidence_interval: |xbar| must be < 1");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("cw_confidence_interval: level outside (0,1)");
    if (n <= 0) throw std::invalid_argument("cw_confidence_interval: n must be positive");

    double beta_hat = phi_p(a, p);
    // plug-in estimate inside g''(t) = beta p(p-1) t^{p-2} - 1/(1-t^2)
    double gpp = beta_hat * p * (p - 1) * ipow(a, p - 2) - 1.0 / (1.0 - a * a);
    if (gpp >= 0.0)
        throw std::runtime_error("cw_confidence_interval: g''(|xbar|) >= 0 (below-threshold sample)");

    double z = stats::normal_quantile(1.0 - 0.5 * (1.0 - level));
    double half = std::sqrt(-gpp / static_cast<double>(n)) * z / (p * ipow(a, p - 1));
    return {beta_hat - half, beta_hat + half, level, CiMethod::CurieWeissCLT};
}

}  // namespace tising
