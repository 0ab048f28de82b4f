#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "siftlab/bits.hpp"
#include "siftlab/params.hpp"

namespace siftlab {

// Truncation policy for the infinite sums. All series here have positive
// terms, so every truncation below carries a certified bound on the
// neglected mass.
struct SeriesConfig {
    double tail_epsilon = 1e-12;
    int64_t max_terms = 2'000'000'000;
};

class TruncationBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class BadThetaShape : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Conditional law of an agreement round: Z-agreement with probability g_z,
// X-agreement with g_x = 1 - g_z.
struct AgreementLaw {
    double g_x;
    double g_z;

    static AgreementLaw from_px(double p_x) {
        double px2 = p_x * p_x, pz2 = (1 - p_x) * (1 - p_x);
        return {px2 / (px2 + pz2), pz2 / (px2 + pz2)};
    }
};

// g_z* = (1/(k+1))^(1/k): the agreement law under which iterative sifting
// with n = 1 samples uniformly.
double gz_star(int k);

// The basis-choice probability p_z solving g_z(p_z) = gz_star(k).
// k = 1 is the symmetric case p_z = 1/2 (the closed form is 0/0 there).
double pz_star(int k);

// Closed-form sampling probability for iterative sifting with n = 1:
// P(1...10) = g_z^k, every other weight-k string gets (1 - g_z^k)/k.
double iter_sampling_n1(int k, double p_z, const BitString& theta);

// Exact sampling probability of iterative sifting for general (n, k),
// obtained by marginalizing disagreements (each agreement is independently
// a Z-agreement with probability g_z) and summing, over all terminal
// agreement counts, the uniform-discard probability of producing theta.
// The termination structure forces either N_x = n (runs ending on an
// X-agreement) or N_z = k (runs ending on a Z-agreement), which is why the
// value depends on theta only through its final bit.
double iter_sampling_enum(const SiftParams& params, const BitString& theta,
                          const SeriesConfig& cfg = {});

// Expected error rate of the round-1-X / then-Z intercept-resend attack on
// iterative sifting with n = k = 1, as a double series over the terminal
// agreement count and the disagreement count.
double attack1_error(double p_x, const SeriesConfig& cfg = {});

// (2 - ln 2)/8: expected error rate of the coin-flip adaptive attack at
// p_x = 1/2. The general-p_x curve has no closed form here; use Monte Carlo.
double attack2_error_symmetric();

// Expected error rate of the adaptive attack that starts in X and reacts to
// the first announced agreement, n = k = 1.
double attack3_error(double p_x, const SeriesConfig& cfg = {});

// Fixed-round sifting: probability of any single weight-k outcome theta
// (independent of theta), and the quota-check abort probability. Binomials
// are evaluated in log space; sums use max-shifted exponentiation.
double lca_sampling_prob(const SiftParams& params);
double lca_abort_prob(const SiftParams& params);

// Expected efficiency <eta> = E[R/M].
// Iterative: (n+k) E[1/M], truncated from below with a certified tail.
// LCA: exact finite sum, equal to (l/m)(1 - p_abort).
double eff_iterative(int n, int k, double p_x, const SeriesConfig& cfg = {});
double eff_lca(int n, int k, int m, double p_x);

struct OptimizedM {
    int m_opt;
    double eta;
};

// Scans m upward from n+k and stops once the objective has been below the
// running maximum for a confirmation window.
OptimizedM optimize_m(int n, int k, double p_x);

// Parameters of the counterfactual all-Z measurement experiment.
struct TailExperimentSpec {
    int l;
    int n;
    int k;
    int sigma_tot;  // total error count over the l positions
    double mu;
    double q_tol;

    // smallest key-error count implied by Lambda_key >= Lambda_tot + (k/l) mu
    int d() const;
};

// Hypergeometric pmf h(sigma_tot, l, n, j) and upper tail H from spec.d().
double hypergeom_pmf(const TailExperimentSpec& spec, int j);
double hypergeom_tail(const TailExperimentSpec& spec);

// exp(-2 (kn/l) (k/(k+1)) mu^2), the Serfling bound on that tail.
double serfling_bound(int n, int k, double mu);

struct GridMinimum {
    double x;
    double value;
};

// Argmin of f over {lo, lo+step, ..., <= hi}.
GridMinimum grid_minimize(const std::function<double(double)>& f, double lo, double hi,
                          double step);

} // namespace siftlab
