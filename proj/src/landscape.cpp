#include "tising/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tising::landscape {

namespace {

constexpr double kPosTol = 1e-13;   // sup values at or below this count as zero
constexpr double kTieTol = 1e-7;    // threshold tie tolerance for m_star

double ipow(double base, int exp) {
    double r = 1.0, b = base;
    for (int e = exp; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
    }
    return r;
}

double atanh_stable(double t) { return 0.5 * (std::log1p(t) - std::log1p(-t)); }

// interior stationary points of g on (0,1), refined to |g'| <= 1e-12
std::vector<double> stationary_points(double beta, int p) {
    std::vector<double> roots;
    if (beta <= 0.0) return roots;
    const double t_hi = 1.0 - 1e-14;
    std::vector<double> grid;
    grid.push_back(1e-9);
    for (int k = 1; k <= 9999; ++k) grid.push_back(k * 1e-4);
    grid.push_back(t_hi);

    auto gp = [&](double t) { return g_prime(beta, p, t); };
    double prev_t = grid[0], prev_v = gp(prev_t);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double t = grid[i], v = gp(t);
        if ((prev_v > 0.0 && v <= 0.0) || (prev_v < 0.0 && v >= 0.0)) {
            double lo = prev_t, hi = t, flo = prev_v;
            for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
                double mid = 0.5 * (lo + hi), fm = gp(mid);
                if ((flo > 0.0) == (fm > 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            double r = 0.5 * (lo + hi);
            for (int it = 0; it < 60; ++it) {  // Newton polish
                double f = gp(r);
                if (std::fabs(f) <= 1e-12) break;
                double d = g_second(beta, p, r);
                if (d == 0.0) break;
                double rn = r - f / d;
                if (!(rn > 0.0 && rn < 1.0)) break;
                r = rn;
            }
            roots.push_back(r);
        }
        prev_t = t;
        prev_v = v;
    }
    return roots;
}

struct InteriorMax {
    double sup = 0.0;        // over all candidates including t=0 and t=1
    double best_t = 0.0;     // argmax (0 when the max is at the origin)
    bool has_stationary_max = false;
    double stat_t = 0.0;     // largest stationary point with g'' < 0
};

InteriorMax maximize_g(double beta, int p) {
    InteriorMax out;
    auto roots = stationary_points(beta, p);
    for (double r : roots) {
        double v = g_value(beta, p, r);
        if (v > out.sup) {
            out.sup = v;
            out.best_t = r;
        }
        if (g_second(beta, p, r) < 0.0 && r > out.stat_t) {
            out.stat_t = r;
            out.has_stationary_max = true;
        }
    }
    double g1 = beta - std::log(2.0);  // boundary value g(1)
    if (g1 > out.sup) {
        out.sup = g1;
        out.best_t = 1.0;
    }
    return out;
}

}  // namespace

double binary_entropy(double t) {
    if (std::fabs(t) > 1.0) throw std::domain_error("binary_entropy: |t| > 1");
    if (std::fabs(t) == 1.0) return std::log(2.0);
    if (std::fabs(t) < 1e-4) {
        // series sum_k t^{2k} / (2k (2k-1)); the naive formula loses the
        // t^2/2 term entirely once t drops below machine epsilon
        double t2 = t * t;
        return t2 * (0.5 + t2 * (1.0 / 12.0 + t2 * (1.0 / 30.0)));
    }
    return 0.5 * ((1.0 + t) * std::log1p(t) + (1.0 - t) * std::log1p(-t));
}

double g_value(double beta, int p, double t) { return beta * ipow(t, p) - binary_entropy(t); }

double g_prime(double beta, int p, double t) {
    return beta * p * ipow(t, p - 1) - atanh_stable(t);
}

double g_second(double beta, int p, double t) {
    return beta * p * (p - 1) * ipow(t, p - 2) - 1.0 / (1.0 - t * t);
}

std::optional<double> m_star(double beta, int p) {
    if (beta < 0.0) throw std::invalid_argument("m_star: beta must be >= 0");
    auto im = maximize_g(beta, p);
    if (im.best_t > 0.0 && im.sup > -kTieTol) {
        // prefers the stationary maximizer over the boundary candidate
        if (im.has_stationary_max && g_value(beta, p, im.stat_t) >= im.sup - 1e-12)
            return im.stat_t;
        return im.best_t;
    }
    if (im.has_stationary_max && g_value(beta, p, im.stat_t) > -kTieTol) return im.stat_t;
    return std::nullopt;
}

std::optional<double> positive_stationary_max(double beta, int p) {
    auto im = maximize_g(beta, p);
    if (im.has_stationary_max) return im.stat_t;
    return std::nullopt;
}

FreeEnergyCurve free_energy_curve(double beta, int p) {
    FreeEnergyCurve c;
    c.beta = beta;
    c.p = p;
    if (g_second(beta, p, 0.0) <= 0.0) c.maximizers.emplace_back(0.0, 0.0);
    for (double r : stationary_points(beta, p)) {
        if (g_second(beta, p, r) < 0.0) c.maximizers.emplace_back(r, g_value(beta, p, r));
    }
    c.m_star = m_star(beta, p);
    c.g2_at_mstar = c.m_star ? g_second(beta, p, *c.m_star)
                             : std::numeric_limits<double>::quiet_NaN();
    return c;
}

double beta_star_cw(int p, double tol) {
    if (p < 2) throw std::invalid_argument("beta_star_cw: p must be >= 2");
    double lo = 0.0, hi = 0.75;  // beta*_CW(p) < log 2 < 0.75 for every p
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (maximize_g(mid, p).sup > kPosTol)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double beta_star_er(int p, double theta, double tol) {
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("beta_star_er: theta in (0,1]");
    return beta_star_cw(p, tol) / theta;
}

namespace {

// shared inner maximization for the block functionals
struct VarProblem {
    int k = 0;
    int p = 2;
    std::vector<double> lambda;
    // canonical terms of S(t) = sum theta prod lambda_j t_j over ordered block
    // tuples: coefficient = multiplicity * theta_c * prod_j lambda_j^{count_j}
    struct Term {
        double coef = 0.0;
        std::vector<int> counts;  // exponent of t_j per block
    };
    std::vector<Term> terms;

    double s_value(const std::vector<double>& t) const {
        double s = 0.0;
        for (const auto& term : terms) {
            double v = term.coef;
            for (int j = 0; j < k; ++j) {
                int c = term.counts[static_cast<std::size_t>(j)];
                if (c) v *= ipow(t[static_cast<std::size_t>(j)], c);
            }
            s += v;
        }
        return s;
    }

    void s_gradient(const std::vector<double>& t, std::vector<double>& grad) const {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (const auto& term : terms) {
            for (int j = 0; j < k; ++j) {
                int cj = term.counts[static_cast<std::size_t>(j)];
                if (!cj) continue;
                double v = term.coef * cj * ipow(t[static_cast<std::size_t>(j)], cj - 1);
                for (int l = 0; l < k; ++l) {
                    if (l == j) continue;
                    int cl = term.counts[static_cast<std::size_t>(l)];
                    if (cl) v *= ipow(t[static_cast<std::size_t>(l)], cl);
                }
                grad[static_cast<std::size_t>(j)] += v;
            }
        }
    }

    double phi(double beta, const std::vector<double>& t) const {
        double v = beta * s_value(t);
        for (int j = 0; j < k; ++j)
            v -= lambda[static_cast<std::size_t>(j)] * binary_entropy(t[static_cast<std::size_t>(j)]);
        return v;
    }
};

VarProblem make_hsbm_problem(int p, const std::vector<double>& lambda,
                             const BlockProbTensor& Theta) {
    VarProblem vp;
    vp.k = static_cast<int>(lambda.size());
    vp.p = p;
    vp.lambda = lambda;
    double fact_p = 1.0;
    for (int i = 2; i <= p; ++i) fact_p *= i;
    for (const auto& [labels, theta] : Theta.entries()) {
        VarProblem::Term term;
        term.counts.assign(static_cast<std::size_t>(vp.k), 0);
        for (int l : labels) term.counts[static_cast<std::size_t>(l)]++;
        double mult = fact_p;
        double lam_pow = 1.0;
        for (int j = 0; j < vp.k; ++j) {
            int c = term.counts[static_cast<std::size_t>(j)];
            for (int i = 2; i <= c; ++i) mult /= i;
            lam_pow *= ipow(lambda[static_cast<std::size_t>(j)], c);
        }
        term.coef = mult * theta * lam_pow;
        if (term.coef != 0.0) vp.terms.push_back(std::move(term));
    }
    return vp;
}

VarProblem make_partite_problem(int p, const std::vector<double>& lambda, double theta) {
    VarProblem vp;
    vp.k = p;
    vp.p = p;
    vp.lambda = lambda;
    VarProblem::Term term;
    term.counts.assign(static_cast<std::size_t>(p), 1);
    double coef = theta;
    for (double l : lambda) coef *= l;
    term.coef = coef;
    vp.terms.push_back(std::move(term));
    return vp;
}

constexpr double kTMax = 1.0 - 1e-12;

void clamp01(std::vector<double>& t) {
    for (double& x : t) x = std::clamp(x, 0.0, kTMax);
}

// damped coordinatewise fixed point t_j <- tanh(beta dS/dt_j / lambda_j);
// stops early once phi exceeds stop_value (when finite)
double fixed_point_refine(const VarProblem& vp, double beta, std::vector<double>& t,
                          double stop_value, int max_iter) {
    std::vector<double> grad(static_cast<std::size_t>(vp.k));
    double gamma = 1.0;
    double prev_phi = vp.phi(beta, t);
    for (int it = 0; it < max_iter; ++it) {
        vp.s_gradient(t, grad);
        double delta = 0.0;
        for (int j = 0; j < vp.k; ++j) {
            double target = std::tanh(beta * grad[static_cast<std::size_t>(j)] /
                                      vp.lambda[static_cast<std::size_t>(j)]);
            target = std::clamp(target, 0.0, kTMax);
            double next = (1.0 - gamma) * t[static_cast<std::size_t>(j)] + gamma * target;
            delta = std::max(delta, std::fabs(next - t[static_cast<std::size_t>(j)]));
            t[static_cast<std::size_t>(j)] = next;
        }
        double cur = vp.phi(beta, t);
        if (cur < prev_phi - 1e-15) gamma = 0.5;  // oscillation: damp
        prev_phi = cur;
        if (std::isfinite(stop_value) && cur > stop_value) return cur;
        if (delta <= 1e-13) break;
    }
    return vp.phi(beta, t);
}

// projected gradient ascent with backtracking
double projected_ascent(const VarProblem& vp, double beta, std::vector<double>& t, int max_iter) {
    std::vector<double> grad(static_cast<std::size_t>(vp.k)), trial(static_cast<std::size_t>(vp.k));
    double value = vp.phi(beta, t);
    double step = 0.25;
    for (int it = 0; it < max_iter; ++it) {
        vp.s_gradient(t, grad);
        double gnorm = 0.0;
        for (int j = 0; j < vp.k; ++j) {
            grad[static_cast<std::size_t>(j)] =
                beta * grad[static_cast<std::size_t>(j)] -
                vp.lambda[static_cast<std::size_t>(j)] * atanh_stable(t[static_cast<std::size_t>(j)]);
            gnorm = std::max(gnorm, std::fabs(grad[static_cast<std::size_t>(j)]));
        }
        if (gnorm <= 1e-12) break;
        bool improved = false;
        for (int bt = 0; bt < 40; ++bt) {
            for (int j = 0; j < vp.k; ++j)
                trial[static_cast<std::size_t>(j)] = std::clamp(
                    t[static_cast<std::size_t>(j)] + step * grad[static_cast<std::size_t>(j)], 0.0, kTMax);
            double tv = vp.phi(beta, trial);
            if (tv > value) {
                t = trial;
                value = tv;
                improved = true;
                step = std::min(step * 2.0, 0.5);
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return value;
}

SupPhiResult sup_phi(const VarProblem& vp, double beta, bool decide_only) {
    SupPhiResult best;
    best.value = 0.0;  // phi(0) = 0 always
    best.argmax.assign(static_cast<std::size_t>(vp.k), 0.0);
    const double stop = decide_only ? kPosTol * 4.0 : std::numeric_limits<double>::infinity();

    auto consider = [&](const std::vector<double>& t, double v) {
        if (v > best.value) {
            best.value = v;
            best.argmax = t;
        }
    };

    // symmetric-ray scan: dense linear plus log-spaced points near zero
    std::vector<double> ray;
    for (int i = 1; i <= 200; ++i) ray.push_back(i * 5e-3);
    for (double s = 1e-6; s < 5e-3; s *= 1.6) ray.push_back(s);
    std::vector<double> t(static_cast<std::size_t>(vp.k));
    double best_ray = -std::numeric_limits<double>::infinity();
    double best_ray_s = 0.0;
    for (double s : ray) {
        std::fill(t.begin(), t.end(), std::min(s, kTMax));
        double v = vp.phi(beta, t);
        consider(t, v);
        if (v > best_ray) {
            best_ray = v;
            best_ray_s = s;
        }
    }
    if (decide_only && best.value > stop) return best;

    // 5^K lattice seeds plus the best ray point
    std::vector<std::vector<double>> seeds;
    static const double levels[5] = {0.05, 0.275, 0.5, 0.725, 0.95};
    long long total = 1;
    for (int j = 0; j < vp.k; ++j) total *= 5;
    for (long long s = 0; s < total; ++s) {
        long long r = s;
        std::vector<double> seed(static_cast<std::size_t>(vp.k));
        for (int j = 0; j < vp.k; ++j) {
            seed[static_cast<std::size_t>(j)] = levels[r % 5];
            r /= 5;
        }
        seeds.push_back(std::move(seed));
    }
    seeds.push_back(std::vector<double>(static_cast<std::size_t>(vp.k), std::min(best_ray_s, kTMax)));

    for (auto& seed : seeds) {
        clamp01(seed);
        std::vector<double> cur = seed;
        double v = projected_ascent(vp, beta, cur, 2000);
        consider(cur, v);
        if (decide_only && best.value > stop) return best;
        v = fixed_point_refine(vp, beta, cur, stop, decide_only ? 30000 : 200000);
        consider(cur, v);
        if (decide_only && best.value > stop) return best;
    }
    return best;
}

double bisect_threshold(const VarProblem& vp, double tol) {
    double s1 = vp.s_value(std::vector<double>(static_cast<std::size_t>(vp.k), 1.0));
    if (!(s1 > 0.0))
        throw std::invalid_argument("threshold: probability tensor has no positive mass");
    double lo = 0.0, hi = std::log(2.0) / s1 + 1.0;  // phi_hi(1,..,1) > 0
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (sup_phi(vp, mid, true).value > kPosTol)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

ThresholdResult threshold_result(const VarProblem& vp, double tol) {
    ThresholdResult res;
    res.beta_star = bisect_threshold(vp, tol);
    res.tol_inner = 1e-13;
    // certify a strictly positive interior maximizer just above the threshold
    for (int k = 1; k <= 64; ++k) {
        auto sp = sup_phi(vp, res.beta_star + k * tol, false);
        if (sp.value >= 1e-10) {
            res.argmax_profile = sp.argmax;
            res.tol_beta = k * tol;
            return res;
        }
    }
    throw std::runtime_error("threshold: could not certify positivity above the bisection point");
}

}  // namespace

SupPhiResult sup_phi_hsbm(double beta, const std::vector<double>& lambda,
                          const BlockProbTensor& Theta) {
    auto vp = make_hsbm_problem(Theta.p(), lambda, Theta);
    return sup_phi(vp, beta, false);
}

SupPhiResult sup_phi_partite(double beta, const std::vector<double>& lambda, double theta) {
    auto vp = make_partite_problem(static_cast<int>(lambda.size()), lambda, theta);
    return sup_phi(vp, beta, false);
}

ThresholdResult beta_star_hsbm(int p, const std::vector<double>& lambda,
                               const BlockProbTensor& Theta, double tol) {
    if (static_cast<int>(lambda.size()) != Theta.k())
        throw std::invalid_argument("beta_star_hsbm: |lambda| != K");
    if (Theta.p() != p) throw std::invalid_argument("beta_star_hsbm: Theta arity != p");
    if (lambda.size() > 6)
        throw std::invalid_argument("beta_star_hsbm: K > 6 rejected (seed-lattice blowup); coarsen");
    auto vp = make_hsbm_problem(p, lambda, Theta);
    return threshold_result(vp, tol);
}

double beta_star_partite(int p, const std::vector<double>& lambda, double theta, double tol) {
    if (static_cast<int>(lambda.size()) != p)
        throw std::invalid_argument("beta_star_partite: lambda must have p parts");
    if (p > 6)
        throw std::invalid_argument("beta_star_partite: p > 6 rejected (seed-lattice blowup)");
    double sum = 0.0;
    for (double l : lambda) {
        if (!(l > 0.0)) throw std::invalid_argument("beta_star_partite: lambda entries positive");
        sum += l;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw std::invalid_argument("beta_star_partite: lambda must sum to 1");
    auto vp = make_partite_problem(p, lambda, theta);
    return threshold_result(vp, tol).beta_star;
}

double alpha_weight(int p) {
    if (p < 2) throw std::invalid_argument("alpha_weight: p must be >= 2");
    double bstar = beta_star_cw(p, 1e-8);
    auto m = positive_stationary_max(bstar, p);
    if (!m) throw std::runtime_error("alpha_weight: no positive stationary maximizer at the threshold");
    double gpp = g_second(bstar, p, *m);
    double radicand = (*m * *m - 1.0) * gpp;
    if (!(radicand > 0.0))
        throw std::runtime_error("alpha_weight: nonpositive radicand (m* or g'' computation failed)");
    double root = std::sqrt(radicand);
    if (p % 2 == 0) return 1.0 / (1.0 + 2.0 / root);
    return 1.0 / (1.0 + 1.0 / root);
}

double asymptotic_variance(double beta, int p) {
    double bstar = beta_star_cw(p, 1e-8);
    if (!(beta > bstar))
        throw std::invalid_argument("asymptotic_variance: beta must be above beta*_CW(p)");
    auto m = m_star(beta, p);
    if (!m) throw std::runtime_error("asymptotic_variance: m* not found");
    return -g_second(beta, p, *m) / (static_cast<double>(p) * p * ipow(*m, 2 * p - 2));
}

double fisher_info_limit(double beta, int p) { return 1.0 / asymptotic_variance(beta, p); }

namespace {

double quartic_density(double s) { return std::exp(-s * s * s * s / 12.0); }

double adaptive_simpson(double (*f)(double), double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_quartic(double a, double b, double tol) {
    if (b <= a) return 0.0;
    double fa = quartic_density(a), fb = quartic_density(b), fm = quartic_density(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(&quartic_density, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double threshold_limit_cdf_p2(double t) {
    if (!(t == t)) throw std::domain_error("threshold_limit_cdf_p2: NaN input");
    if (t < 0.0) return 0.0;
    static const double half_mass = integrate_quartic(0.0, 8.0, 1e-12);
    double s = std::sqrt(6.0 * t);
    if (s >= 8.0) return 1.0;
    return integrate_quartic(0.0, s, 1e-12) / half_mass;
}

}  // namespace tising::landscape
