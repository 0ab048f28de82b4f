#include "siftlab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "siftlab/stats.hpp"

namespace siftlab {

namespace {

void require_open_unit(double p_x) {
    if (!(p_x > 0.0 && p_x < 1.0)) {
        throw std::domain_error("p_x must lie strictly inside (0, 1) for this series");
    }
}

struct TermBudget {
    int64_t left;
    void spend() {
        if (--left < 0) throw TruncationBudgetExceeded("series term budget exhausted");
    }
};

// Sum over n_d of the negative-binomial weights
//   NB(n_d; r, q) = C(r + n_d - 1, n_d) q^n_d (1 - q)^r,
// swept outward from the mode so that no intermediate under- or overflows.
// Mathematically the total is 1; it is summed numerically here because it is
// the inner disagreement sum of the attack series.
double nb_total(int64_t r, double q, double eps, TermBudget& budget) {
    if (q <= 0.0) return 1.0;
    const double log_q = std::log(q), log_1mq = std::log1p(-q);
    int64_t mode = static_cast<int64_t>(static_cast<double>(r - 1) * q / (1.0 - q));
    if (mode < 0) mode = 0;
    double t0 = std::exp(log_binomial(r + mode - 1, mode) + mode * log_q + r * log_1mq);
    double sum = t0;
    budget.spend();
    // upward sweep: ratio q (r + nd) / (nd + 1) decreases in nd
    double t = t0;
    for (int64_t nd = mode;; ++nd) {
        double ratio = q * static_cast<double>(r + nd) / static_cast<double>(nd + 1);
        if (ratio < 1.0 && t * ratio / (1.0 - ratio) < eps) break;
        t *= ratio;
        sum += t;
        budget.spend();
    }
    // downward sweep: ratio nd / (q (r + nd - 1)) decreases toward nd = 0
    t = t0;
    for (int64_t nd = mode; nd > 0; --nd) {
        double ratio = static_cast<double>(nd) / (q * static_cast<double>(r + nd - 1));
        if (ratio < 1.0 && t * ratio / (1.0 - ratio) < eps) break;
        t *= ratio;
        sum += t;
        budget.spend();
    }
    return sum;
}

} // namespace

double gz_star(int k) {
    if (k < 1) throw std::domain_error("k must be >= 1");
    return std::pow(1.0 / (k + 1), 1.0 / k);
}

double pz_star(int k) {
    if (k == 1) return 0.5;  // limit of the 0/0 closed form
    double g = gz_star(k);
    return (g - std::sqrt(g * (1.0 - g))) / (2.0 * g - 1.0);
}

double iter_sampling_n1(int k, double p_z, const BitString& theta) {
    if (!(p_z > 0.0 && p_z < 1.0)) throw std::domain_error("p_z must lie in (0, 1)");
    if (static_cast<int>(theta.size()) != k + 1 || weight(theta) != k) {
        throw BadThetaShape("theta must have length k+1 and weight k");
    }
    double px = 1.0 - p_z;
    double gz = p_z * p_z / (p_z * p_z + px * px);
    double top = std::pow(gz, k);
    return theta.back() == 0 ? top : (1.0 - top) / k;
}

double iter_sampling_enum(const SiftParams& params, const BitString& theta,
                          const SeriesConfig& cfg) {
    require_open_unit(params.p_x());
    const int n = params.n(), k = params.k(), l = params.l();
    if (static_cast<int>(theta.size()) != l || weight(theta) != k) {
        throw BadThetaShape("theta must have length n+k and weight k");
    }
    const AgreementLaw law = AgreementLaw::from_px(params.p_x());
    TermBudget budget{cfg.max_terms};

    // Runs ending on an X-agreement have N_x = n exactly (every X-agreement
    // is kept, the last one closing the loop), so theta ends in 0 and the
    // surplus consists of N_z - k unkept Z-agreements. Symmetrically for
    // runs ending on a Z-agreement. Summing the uniform-discard weight of a
    // fixed theta over all interleavings of the surplus gives, per terminal
    // count b >= k (or a >= n),
    //   g_x^n g_z^b C(b-k+l-1, l-1) / C(b, k).
    const bool ends_x = theta.back() == 0;
    const double g_keep = ends_x ? law.g_x : law.g_z;    // basis of the kept quota
    const double g_grow = ends_x ? law.g_z : law.g_x;    // basis that accumulates surplus
    const int quota_keep = ends_x ? n : k;
    const int quota_grow = ends_x ? k : n;

    double total = 0.0;
    double t = std::pow(g_keep, quota_keep) * std::pow(g_grow, quota_grow);  // b = quota_grow
    for (int64_t b = quota_grow;; ++b) {
        total += t;
        budget.spend();
        double ratio = g_grow * static_cast<double>(b - quota_grow + l) / static_cast<double>(b + 1);
        if (ratio < 1.0 && t * ratio / (1.0 - ratio) < cfg.tail_epsilon) break;
        t *= ratio;
    }
    return total;
}

double attack1_error(double p_x, const SeriesConfig& cfg) {
    require_open_unit(p_x);
    const double pz = 1.0 - p_x;
    const double gx2 = p_x * p_x, gz2 = pz * pz, q = 2.0 * p_x * pz;
    const AgreementLaw law = AgreementLaw::from_px(p_x);
    const double qr = q / (1.0 - q);
    const double eps = cfg.tail_epsilon / 16.0;
    TermBudget budget{cfg.max_terms};

    double total = 0.0;

    // Delta_x: first basis agreement is an X-agreement (theta = 01),
    // terminal counts N_x = n_x, N_z = 1.
    {
        double gpow = law.g_x;
        double nbt = nb_total(1, q, eps, budget);
        for (int64_t nx = 1;; ++nx) {
            double nbt_next = nb_total(nx + 1, q, eps, budget);
            total += (gz2 / 4.0) * gpow *
                     ((1.0 - 1.0 / static_cast<double>(nx)) * nbt + qr * nbt_next);
            double tail = (gz2 / 4.0) * (1.0 + qr) * gpow * law.g_x / (1.0 - law.g_x);
            if (tail < cfg.tail_epsilon / 4.0) break;
            gpow *= law.g_x;
            nbt = nbt_next;
        }
    }
    // Delta_z: first agreement is a Z-agreement (theta = 10), N_z = n_z, N_x = 1.
    {
        double gpow = law.g_z;
        double nbt = nb_total(1, q, eps, budget);
        for (int64_t nz = 1;; ++nz) {
            double nbt_next = nb_total(nz + 1, q, eps, budget);
            total += (gx2 / 4.0) * gpow *
                     (qr * nbt_next + (1.0 + 1.0 / static_cast<double>(nz)) * nbt);
            double tail = (gx2 / 4.0) * (2.0 + qr) * gpow * law.g_z / (1.0 - law.g_z);
            if (tail < cfg.tail_epsilon / 4.0) break;
            gpow *= law.g_z;
            nbt = nbt_next;
        }
    }
    return total;
}

double attack2_error_symmetric() { return (2.0 - std::log(2.0)) / 8.0; }

double attack3_error(double p_x, const SeriesConfig& cfg) {
    require_open_unit(p_x);
    const double pz = 1.0 - p_x;
    const double gx2 = p_x * p_x, gz2 = pz * pz, q = 2.0 * p_x * pz;
    const AgreementLaw law = AgreementLaw::from_px(p_x);
    const double eps = cfg.tail_epsilon / 16.0;
    TermBudget budget{cfg.max_terms};

    double total = 0.0;
    // runs whose first agreement is a Z-agreement: Eve stays in X, errors
    // land on the test bit with probability 1/2
    {
        double gpow = law.g_z;
        for (int64_t nz = 1;; ++nz) {
            total += (gx2 / (4.0 * (1.0 - q))) * gpow * nb_total(nz + 1, q, eps, budget);
            double tail = (gx2 / (4.0 * (1.0 - q))) * gpow * law.g_z / (1.0 - law.g_z);
            if (tail < cfg.tail_epsilon / 4.0) break;
            gpow *= law.g_z;
        }
    }
    // runs whose first agreement is an X-agreement: Eve switches to Z and
    // only the n_x - 1 later X-agreements can contribute an error
    {
        double gpow = law.g_x;
        for (int64_t nx = 1;; ++nx) {
            total += (gz2 / (4.0 * (1.0 - q))) * gpow *
                     (static_cast<double>(nx - 1) / static_cast<double>(nx)) *
                     nb_total(nx + 1, q, eps, budget);
            double tail = (gz2 / (4.0 * (1.0 - q))) * gpow * law.g_x / (1.0 - law.g_x);
            if (tail < cfg.tail_epsilon / 4.0) break;
            gpow *= law.g_x;
        }
    }
    return total;
}

namespace {

// max-shifted exponentiation over a vector of term logs
double sum_exp(const std::vector<double>& logs) {
    if (logs.empty()) return 0.0;
    double mx = *std::max_element(logs.begin(), logs.end());
    if (!std::isfinite(mx)) return 0.0;
    double s = 0.0;
    for (double lt : logs) s += std::exp(lt - mx);
    return std::exp(mx + std::log(s));
}

} // namespace

double lca_abort_prob(const SiftParams& params) {
    if (!params.m()) throw ParamError(ParamErrorCode::MissingM, "m required");
    const int n = params.n(), k = params.k(), m = *params.m();
    const double px = params.p_x(), pz = params.p_z();
    if (px == 0.0 || px == 1.0) return 1.0;  // one agreement type never occurs
    const double lpx = std::log(px), lpz = std::log(pz), l2 = std::log(2.0);

    std::vector<double> logs;
    logs.reserve(static_cast<size_t>(m + 1) * (m + 2) / 2);
    for (int nx = 0; nx <= m; ++nx) {
        for (int nz = 0; nz + nx <= m; ++nz) {
            if (nx >= n && nz >= k) continue;
            logs.push_back(log_binomial(m, nx) + log_binomial(m - nx, nz) +
                           (m - nx - nz) * l2 + (m + nx - nz) * lpx + (m - nx + nz) * lpz);
        }
    }
    return sum_exp(logs);
}

double lca_sampling_prob(const SiftParams& params) {
    if (!params.m()) throw ParamError(ParamErrorCode::MissingM, "m required");
    const int n = params.n(), k = params.k(), m = *params.m(), l = params.l();
    const double px = params.p_x(), pz = params.p_z();
    if (px == 0.0 || px == 1.0) return 0.0;
    const double lpx = std::log(px), lpz = std::log(pz), l2 = std::log(2.0);

    std::vector<double> logs;
    for (int nx = n; nx <= m - k; ++nx) {
        for (int nz = k; nz + nx <= m; ++nz) {
            logs.push_back(log_binomial(m - l, nx - n) + log_binomial(m - k - nx, nz - k) +
                           (m - nx - nz) * l2 + (m + nx - nz) * lpx + (m - nx + nz) * lpz -
                           log_binomial(nx, n) - log_binomial(nz, k));
        }
    }
    double body = sum_exp(logs);
    return std::exp(log_binomial(m, l) + std::log(body));
}

double eff_iterative(int n, int k, double p_x, const SeriesConfig& cfg) {
    require_open_unit(p_x);
    const int l = n + k;
    const double px = p_x, pz = 1.0 - p_x;
    const double lpx2 = 2.0 * std::log(px), lpz2 = 2.0 * std::log(pz);
    const double lq = std::log(2.0 * px * pz);
    TermBudget budget{cfg.max_terms};

    double total = 0.0;
    double cum = 0.0;  // cumulative P_M(m); the whole mass is 1
    for (int64_t m = l;; ++m) {
        // P_M(m): the final round closes the lagging quota, so it is either
        // the n-th X-agreement (with m - n - n_d Z-agreements before it) or
        // the k-th Z-agreement.
        std::vector<double> logs;
        logs.reserve(2 * static_cast<size_t>(m - l + 1));
        for (int64_t nd = 0; nd <= m - l; ++nd) {
            double common = nd * lq + log_binomial(m - 1, nd);
            logs.push_back(common + n * lpx2 + (m - n - nd) * lpz2 +
                           log_binomial(m - nd - 1, n - 1));
            logs.push_back(common + (m - k - nd) * lpx2 + k * lpz2 +
                           log_binomial(m - nd - 1, k - 1));
            budget.spend();
        }
        double pm = sum_exp(logs);
        cum += pm;
        total += pm / static_cast<double>(m);
        double mass_left = std::max(0.0, 1.0 - cum);
        if (mass_left * static_cast<double>(l) / static_cast<double>(m + 1) <
            cfg.tail_epsilon) {
            break;
        }
    }
    return l * total;
}

double eff_lca(int n, int k, int m, double p_x) {
    if (m < n + k) throw ParamError(ParamErrorCode::RoundCountTooSmall, "m < n + k");
    if (p_x == 0.0 || p_x == 1.0) return 0.0;
    const double px = p_x, pz = 1.0 - p_x;
    const double lpx2 = 2.0 * std::log(px), lpz2 = 2.0 * std::log(pz);
    const double lq = std::log(2.0 * px * pz);

    std::vector<double> logs;
    for (int nd = 0; nd <= m - n - k; ++nd) {
        for (int nz = k; nz <= m - nd - n; ++nz) {
            logs.push_back((m - nz - nd) * lpx2 + nz * lpz2 + nd * lq +
                           log_binomial(m, nd) + log_binomial(m - nd, nz));
        }
    }
    return static_cast<double>(n + k) / m * sum_exp(logs);
}

OptimizedM optimize_m(int n, int k, double p_x) {
    constexpr int kConfirmWindow = 8;
    int best_m = n + k;
    double best = -1.0;
    int since_best = 0;
    for (int m = n + k;; ++m) {
        double eta = eff_lca(n, k, m, p_x);
        if (eta > best) {
            best = eta;
            best_m = m;
            since_best = 0;
        } else if (++since_best >= kConfirmWindow) {
            break;
        }
    }
    return {best_m, best};
}

int TailExperimentSpec::d() const {
    // d = ceil(n (sigma_tot/l + ((l-n)/l) mu)); the tiny slack keeps exact
    // integer boundaries (e.g. 1.5 -> 2) from being pushed up by rounding
    double x = static_cast<double>(n) *
               (static_cast<double>(sigma_tot) + static_cast<double>(l - n) * mu) /
               static_cast<double>(l);
    return static_cast<int>(std::ceil(x - 1e-9));
}

double hypergeom_pmf(const TailExperimentSpec& spec, int j) {
    if (j < 0 || j > spec.n || j > spec.sigma_tot || spec.n - j > spec.l - spec.sigma_tot) {
        return 0.0;
    }
    return std::exp(log_binomial(spec.sigma_tot, j) +
                    log_binomial(spec.l - spec.sigma_tot, spec.n - j) -
                    log_binomial(spec.l, spec.n));
}

double hypergeom_tail(const TailExperimentSpec& spec) {
    int d = spec.d();
    if (d > spec.n) return 0.0;
    double s = 0.0;
    for (int j = std::max(0, d); j <= spec.n; ++j) s += hypergeom_pmf(spec, j);
    return std::min(s, 1.0);
}

double serfling_bound(int n, int k, double mu) {
    if (mu <= 0.0) throw std::domain_error("mu must be positive");
    const double l = n + k;
    return std::exp(-2.0 * (static_cast<double>(k) * n / l) *
                    (static_cast<double>(k) / (k + 1)) * mu * mu);
}

GridMinimum grid_minimize(const std::function<double(double)>& f, double lo, double hi,
                          double step) {
    GridMinimum best{lo, f(lo)};
    for (int64_t i = 1;; ++i) {
        double x = lo + i * step;
        if (x > hi + step * 1e-9) break;
        double v = f(x);
        if (v < best.value) best = {x, v};
    }
    return best;
}

} // namespace siftlab
