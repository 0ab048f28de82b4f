#include "siftlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "siftlab/analytic.hpp"
#include "siftlab/stats.hpp"

namespace siftlab {

namespace {

SiftResult run_protocol(Protocol protocol, const SiftParams& params, EvePolicy& eve, Rng& rng) {
    return protocol == Protocol::Iterative ? run_iterative_sifting(params, eve, rng)
                                           : run_lca_sifting(params, eve, rng);
}

struct ErrAcc {
    FixedAccum err;
    int64_t aborted = 0;
    void merge(const ErrAcc& o) {
        err.merge(o.err);
        aborted += o.aborted;
    }
};

} // namespace

ErrorRateEstimate estimate_error_rate(Protocol protocol, const SiftParams& params,
                                      const EvePolicy& eve, uint64_t trials, uint64_t seed,
                                      unsigned workers) {
    auto acc = run_blocked<ErrAcc>(trials, workers, [&](uint64_t t, ErrAcc& a) {
        Rng rng(seed, t);
        EvePolicy policy = eve;
        policy.reset();
        SiftResult res = run_protocol(protocol, params, policy, rng);
        if (res.aborted) {
            ++a.aborted;
            return;
        }
        a.err.add(static_cast<double>(xor_count(res.s, res.t)) / params.l());
    });
    if (acc.err.n == 0) throw AllTrialsAborted("every trial aborted in the quota check");
    ErrorRateEstimate out;
    out.error_rate = acc.err.estimate(seed);
    out.kept = static_cast<uint64_t>(acc.err.n);
    out.aborted = static_cast<uint64_t>(acc.aborted);
    out.abort_fraction = trials == 0 ? 0.0 : static_cast<double>(acc.aborted) / trials;
    return out;
}

namespace {

struct HistAcc {
    std::map<std::string, uint64_t> bins;
    uint64_t abort_count = 0;
    uint64_t first_x = 0;
    uint64_t first_z = 0;
    void merge(const HistAcc& o) {
        for (const auto& [key, count] : o.bins) bins[key] += count;
        abort_count += o.abort_count;
        first_x += o.first_x;
        first_z += o.first_z;
    }
};

} // namespace

ThetaHistogram estimate_sampling_dist(Protocol protocol, const SiftParams& params,
                                      uint64_t trials, uint64_t seed, unsigned workers) {
    EvePolicy passive = EvePolicy::passive();
    auto acc = run_blocked<HistAcc>(trials, workers, [&](uint64_t t, HistAcc& a) {
        Rng rng(seed, t);
        EvePolicy policy = passive;
        SiftResult res = run_protocol(protocol, params, policy, rng);
        if (res.first_agreement) {
            (*res.first_agreement == Basis::X ? a.first_x : a.first_z)++;
        }
        if (res.aborted) {
            ++a.abort_count;
            return;
        }
        ++a.bins[to_string(res.theta)];
    });
    ThetaHistogram hist;
    hist.l = params.l();
    hist.k = params.k();
    hist.bins = std::move(acc.bins);
    hist.abort_count = acc.abort_count;
    hist.trials = trials;
    hist.first_x = acc.first_x;
    hist.first_z = acc.first_z;
    return hist;
}

EstimateWithCI estimate_efficiency(Protocol protocol, const SiftParams& params,
                                   const EvePolicy& eve, uint64_t trials, uint64_t seed,
                                   unsigned workers) {
    auto acc = run_blocked<FixedAccum>(trials, workers, [&](uint64_t t, FixedAccum& a) {
        Rng rng(seed, t);
        EvePolicy policy = eve;
        policy.reset();
        SiftResult res = run_protocol(protocol, params, policy, rng);
        double r = res.aborted ? 0.0 : static_cast<double>(params.l());
        a.add(r / static_cast<double>(res.rounds_used));
    });
    return acc.estimate(seed);
}

namespace {

struct PtailAcc {
    int64_t trials = 0;
    int64_t passed = 0;
    int64_t tail = 0;
    void merge(const PtailAcc& o) {
        trials += o.trials;
        passed += o.passed;
        tail += o.tail;
    }
};

EstimateWithCI proportion_estimate(int64_t hits, int64_t n, uint64_t seed) {
    double p = n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
    double se = n == 0 ? 0.0 : std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
    return {p, se, static_cast<uint64_t>(n), seed};
}

} // namespace

PtailEstimate estimate_ptail(const TailExperimentSpec& spec, const ErrorModel& model,
                             uint64_t trials, uint64_t seed, unsigned workers) {
    const int l = spec.l, n = spec.n, k = spec.k;
    if (model.kind == ErrorModel::Kind::FixedString &&
        static_cast<int>(model.bits.size()) != l) {
        throw std::invalid_argument("fixed error string must have length l");
    }
    auto acc = run_blocked<PtailAcc>(trials, workers, [&](uint64_t t, PtailAcc& a) {
        Rng rng(seed, t);
        // error string z ^ z'
        thread_local BitString err;
        err.resize(static_cast<size_t>(l));
        if (model.kind == ErrorModel::Kind::FixedString) {
            err = model.bits;
        } else {
            for (int i = 0; i < l; ++i) err[static_cast<size_t>(i)] = rng.bernoulli(model.flip_p);
        }
        // uniform weight-k test mask
        thread_local std::vector<int> idx;
        idx.resize(static_cast<size_t>(l));
        for (int i = 0; i < l; ++i) idx[static_cast<size_t>(i)] = i;
        int test_errs = 0, tot_errs = 0;
        for (int i = 0; i < l; ++i) tot_errs += err[static_cast<size_t>(i)];
        for (int i = 0; i < k; ++i) {
            size_t j = static_cast<size_t>(i) + static_cast<size_t>(rng.below(static_cast<uint64_t>(l - i)));
            std::swap(idx[static_cast<size_t>(i)], idx[j]);
            test_errs += err[static_cast<size_t>(idx[static_cast<size_t>(i)])];
        }
        int key_errs = tot_errs - test_errs;
        ++a.trials;
        double lam_test = static_cast<double>(test_errs) / k;
        if (lam_test <= spec.q_tol) {
            ++a.passed;
            // Lambda_key >= Lambda_test + mu, compared in cleared-denominator
            // form with a tiny slack so exact boundaries are kept
            double lhs = static_cast<double>(key_errs) * k;
            double rhs = static_cast<double>(test_errs) * n + spec.mu * n * k;
            if (lhs >= rhs - 1e-9) ++a.tail;
        }
    });
    if (acc.passed == 0) throw NoPassingTrials("correlation test never passed");
    PtailEstimate out;
    out.p_pass = proportion_estimate(acc.passed, acc.trials, seed);
    out.p_tail = proportion_estimate(acc.tail, acc.passed, seed);
    out.passing = static_cast<uint64_t>(acc.passed);
    return out;
}

namespace {

// all weight-k bit strings of length l, lexicographic
void enumerate_weight_k(int l, int k, std::vector<std::string>& out) {
    std::string cur(static_cast<size_t>(l), '0');
    // positions of the k ones
    std::vector<int> pos(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) pos[static_cast<size_t>(i)] = i;
    for (;;) {
        std::fill(cur.begin(), cur.end(), '0');
        for (int p : pos) cur[static_cast<size_t>(p)] = '1';
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && pos[static_cast<size_t>(i)] == l - k + i) --i;
        if (i < 0) break;
        ++pos[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j) pos[static_cast<size_t>(j)] = pos[static_cast<size_t>(j - 1)] + 1;
    }
}

} // namespace

ChiSquareResult chi_square_uniformity(const ThetaHistogram& hist, double alpha) {
    double nbins_d = binomial_d(hist.l, hist.k);
    if (nbins_d > 200000.0) {
        throw SparseBins("too many candidate bins for a chi-square test");
    }
    const int nbins = static_cast<int>(std::llround(nbins_d));
    uint64_t kept = 0;
    for (const auto& [key, count] : hist.bins) kept += count;
    double expected = static_cast<double>(kept) / nbins;
    if (expected < 5.0) {
        throw SparseBins("expected bin count below 5; not enough non-aborted trials");
    }
    std::vector<std::string> support;
    support.reserve(static_cast<size_t>(nbins));
    enumerate_weight_k(hist.l, hist.k, support);

    double stat = 0.0;
    for (const std::string& key : support) {
        auto it = hist.bins.find(key);
        double obs = it == hist.bins.end() ? 0.0 : static_cast<double>(it->second);
        double d = obs - expected;
        stat += d * d / expected;
    }
    ChiSquareResult out;
    out.statistic = stat;
    out.dof = nbins - 1;
    out.p_value = out.dof == 0 ? 1.0 : chi_square_sf(stat, out.dof);
    out.reject = out.p_value < alpha;
    out.expected_per_bin = expected;
    return out;
}

namespace {

void multinomial_rec(int bin, uint64_t left, double logp_acc, double stat_acc, int nbins,
                     uint64_t total, double expected, double stat_obs, const double* logfact,
                     double& pval) {
    if (bin == nbins - 1) {
        double d = static_cast<double>(left) - expected;
        double stat = stat_acc + d * d / expected;
        if (stat >= stat_obs - 1e-12) {
            double lp = logp_acc - logfact[left] -
                        static_cast<double>(total) * std::log(static_cast<double>(nbins));
            pval += std::exp(lp);
        }
        return;
    }
    for (uint64_t c = 0; c <= left; ++c) {
        double d = static_cast<double>(c) - expected;
        multinomial_rec(bin + 1, left - c, logp_acc - logfact[c], stat_acc + d * d / expected,
                        nbins, total, expected, stat_obs, logfact, pval);
    }
}

} // namespace

double exact_multinomial_pvalue(const std::vector<uint64_t>& counts) {
    const int nbins = static_cast<int>(counts.size());
    uint64_t total = 0;
    for (uint64_t c : counts) total += c;
    if (nbins < 2 || nbins > 6 || total > 1000) {
        throw std::invalid_argument("exact multinomial test supports bins <= 6, trials <= 1000");
    }
    double expected = static_cast<double>(total) / nbins;
    double stat_obs = 0.0;
    for (uint64_t c : counts) {
        double d = static_cast<double>(c) - expected;
        stat_obs += d * d / expected;
    }
    std::vector<double> logfact(total + 1, 0.0);
    for (uint64_t i = 1; i <= total; ++i) {
        logfact[i] = logfact[i - 1] + std::log(static_cast<double>(i));
    }
    double pval = 0.0;
    multinomial_rec(0, total, logfact[total], 0.0, nbins, total, expected, stat_obs,
                    logfact.data(), pval);
    return std::min(pval, 1.0);
}

namespace {

struct SummaryAcc {
    FixedAccum err;
    FixedAccum eff;
    int64_t aborted = 0;
    int64_t pe_pass = 0;
    void merge(const SummaryAcc& o) {
        err.merge(o.err);
        eff.merge(o.eff);
        aborted += o.aborted;
        pe_pass += o.pe_pass;
    }
};

} // namespace

SimulateSummary simulate_summary(Protocol protocol, const SiftParams& params,
                                 const EvePolicy& eve, PeKind pe, uint64_t trials,
                                 uint64_t seed, unsigned workers) {
    if (pe == PeKind::LcaTwoRate && params.n() < params.k()) {
        throw SampleTooLarge("two-rate estimation needs n >= k");
    }
    auto acc = run_blocked<SummaryAcc>(trials, workers, [&](uint64_t t, SummaryAcc& a) {
        Rng rng(seed, t);
        EvePolicy policy = eve;
        policy.reset();
        SiftResult res = run_protocol(protocol, params, policy, rng);
        double r = res.aborted ? 0.0 : static_cast<double>(params.l());
        a.eff.add(r / static_cast<double>(res.rounds_used));
        if (res.aborted) {
            ++a.aborted;
            return;
        }
        a.err.add(static_cast<double>(xor_count(res.s, res.t)) / params.l());
        if (pe == PeKind::Sbpe) {
            if (!run_sbpe(res, params.q_tol()).aborted) ++a.pe_pass;
        } else if (pe == PeKind::LcaTwoRate) {
            if (!run_lca_pe(res, params.q_tol(), rng).aborted) ++a.pe_pass;
        }
    });
    if (acc.err.n == 0) throw AllTrialsAborted("every trial aborted in the quota check");
    SimulateSummary out;
    out.error_rate = acc.err.estimate(seed);
    out.efficiency = acc.eff.estimate(seed);
    out.kept = static_cast<uint64_t>(acc.err.n);
    out.aborted = static_cast<uint64_t>(acc.aborted);
    out.abort_fraction = trials == 0 ? 0.0 : static_cast<double>(acc.aborted) / trials;
    if (pe != PeKind::None) {
        out.pe_pass_rate = static_cast<double>(acc.pe_pass) / static_cast<double>(acc.err.n);
    }
    return out;
}

} // namespace siftlab
