#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "siftlab/adversary.hpp"
#include "siftlab/params.hpp"
#include "siftlab/protocols.hpp"
#include "siftlab/rng.hpp"

namespace siftlab {

enum class Protocol { Iterative, LCA };

struct EstimateWithCI {
    double mean = 0.0;
    double std_error = 0.0;
    uint64_t trials = 0;
    uint64_t master_seed = 0;
};

// Per-trial values accumulated in Q62 fixed point (128-bit sums), so that
// merging partials is exactly associative and order-insensitive. That is
// what makes results bit-identical for every worker count. The 2^-62
// quantization per trial is far below any statistical resolution here.
struct FixedAccum {
    __int128 sum = 0;
    __int128 sumsq = 0;
    int64_t n = 0;

    void add(double v) {
        const double scale = 4611686018427387904.0;  // 2^62
        sum += static_cast<int64_t>(std::llround(v * scale));
        sumsq += static_cast<int64_t>(std::llround(v * v * scale));
        ++n;
    }
    void merge(const FixedAccum& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        n += o.n;
    }
    double mean() const {
        const double scale = 4611686018427387904.0;
        return n == 0 ? 0.0 : static_cast<double>(sum) / scale / static_cast<double>(n);
    }
    double std_error() const {
        if (n == 0) return 0.0;
        const double scale = 4611686018427387904.0;
        double m = mean();
        double var = static_cast<double>(sumsq) / scale / static_cast<double>(n) - m * m;
        return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
    }
    EstimateWithCI estimate(uint64_t seed) const {
        return {mean(), std_error(), static_cast<uint64_t>(n), seed};
    }
};

inline constexpr uint64_t kTrialBlock = 8192;

// Runs per_trial(t, acc) for t in [0, trials), processed in fixed blocks of
// kTrialBlock trials. Block boundaries do not depend on the worker count and
// partials are folded in block order, so any worker count produces the same
// result provided Acc::merge is associative. A per-trial exception stops all
// workers and is rethrown on the calling thread.
template <class Acc, class Fn>
Acc run_blocked(uint64_t trials, unsigned workers, Fn per_trial) {
    const uint64_t nblocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<Acc> partials(static_cast<size_t>(nblocks));
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(
        std::min<uint64_t>(workers, std::max<uint64_t>(nblocks, 1)));

    std::atomic<uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        try {
            for (;;) {
                uint64_t b = next.fetch_add(1);
                if (b >= nblocks || failed.load(std::memory_order_relaxed)) return;
                uint64_t lo = b * kTrialBlock;
                uint64_t hi = std::min(lo + kTrialBlock, trials);
                Acc& acc = partials[static_cast<size_t>(b)];
                for (uint64_t t = lo; t < hi; ++t) per_trial(t, acc);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true, std::memory_order_relaxed);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    Acc out;
    for (const Acc& p : partials) out.merge(p);
    return out;
}

class AllTrialsAborted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class NoPassingTrials : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class SparseBins : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ErrorRateEstimate {
    EstimateWithCI error_rate;  // mean of (1/l) sum s_i ^ t_i over kept trials
    uint64_t kept = 0;
    uint64_t aborted = 0;
    double abort_fraction = 0.0;
};

ErrorRateEstimate estimate_error_rate(Protocol protocol, const SiftParams& params,
                                      const EvePolicy& eve, uint64_t trials, uint64_t seed,
                                      unsigned workers = 1);

struct ThetaHistogram {
    int l = 0;
    int k = 0;
    std::map<std::string, uint64_t> bins;
    uint64_t abort_count = 0;
    uint64_t trials = 0;
    uint64_t first_x = 0;  // trials whose first basis agreement was an X-agreement
    uint64_t first_z = 0;
};

ThetaHistogram estimate_sampling_dist(Protocol protocol, const SiftParams& params,
                                      uint64_t trials, uint64_t seed, unsigned workers = 1);

EstimateWithCI estimate_efficiency(Protocol protocol, const SiftParams& params,
                                   const EvePolicy& eve, uint64_t trials, uint64_t seed,
                                   unsigned workers = 1);

// Error model for the tail-probability experiment: either a fixed error
// string z ^ z' or i.i.d. flips with a given probability.
struct ErrorModel {
    enum class Kind { FixedString, IIDFlip } kind;
    BitString bits;   // FixedString
    double flip_p = 0.0;  // IIDFlip

    static ErrorModel fixed(BitString b) { return {Kind::FixedString, std::move(b), 0.0}; }
    static ErrorModel iid(double p) { return {Kind::IIDFlip, {}, p}; }
};

struct TailExperimentSpec;  // analytic.hpp

struct PtailEstimate {
    EstimateWithCI p_tail;  // conditional on the correlation test passing
    EstimateWithCI p_pass;
    uint64_t passing = 0;
};

PtailEstimate estimate_ptail(const TailExperimentSpec& spec, const ErrorModel& model,
                             uint64_t trials, uint64_t seed, unsigned workers = 1);

struct ChiSquareResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false;
    int dof = 0;
    double expected_per_bin = 0.0;
};

// Pearson chi-square of the non-aborted histogram against the uniform
// distribution over all weight-k strings of length l. Bins that never
// occurred count as zeros. Requires expected counts >= 5.
ChiSquareResult chi_square_uniformity(const ThetaHistogram& hist, double alpha);

// Exact multinomial p-value P[X^2 >= observed] under the uniform null, by
// enumeration of compositions. Only feasible for small problems; callers
// must keep bins <= 6 and trials <= 1000.
double exact_multinomial_pvalue(const std::vector<uint64_t>& counts);

// One-pass summary behind `simulate`: error rate and efficiency from the
// same trials, optional parameter-estimation pass rate.
enum class PeKind { None, Sbpe, LcaTwoRate };

struct SimulateSummary {
    EstimateWithCI error_rate;  // over kept trials
    EstimateWithCI efficiency;  // R/M with R = 0 on abort
    uint64_t kept = 0;
    uint64_t aborted = 0;
    double abort_fraction = 0.0;
    std::optional<double> pe_pass_rate;  // among kept trials
};

SimulateSummary simulate_summary(Protocol protocol, const SiftParams& params,
                                 const EvePolicy& eve, PeKind pe, uint64_t trials,
                                 uint64_t seed, unsigned workers = 1);

} // namespace siftlab
