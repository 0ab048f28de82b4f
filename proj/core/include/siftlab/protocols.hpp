#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "siftlab/adversary.hpp"
#include "siftlab/bits.hpp"
#include "siftlab/channel.hpp"
#include "siftlab/params.hpp"
#include "siftlab/rng.hpp"

namespace siftlab {

enum class RoundKind { XAgreement, ZAgreement, Disagreement };

struct RoundRecord {
    int index;  // 1-based round number
    Basis a;
    Basis b;
    std::optional<Basis> eve_basis;
    int y;
    int y_prime;

    RoundKind kind() const {
        if (a != b) return RoundKind::Disagreement;
        return a == Basis::X ? RoundKind::XAgreement : RoundKind::ZAgreement;
    }
};

using RoundLog = std::vector<RoundRecord>;

struct AgreementCounts {
    int64_t n_x = 0;
    int64_t n_z = 0;
    int64_t n_d = 0;
};

struct SiftResult {
    bool aborted = false;
    BitString s;      // Alice's sifted outcomes, length l
    BitString t;      // Bob's sifted outcomes, length l
    BitString theta;  // sifted basis choices, weight k
    std::vector<int> kept_indices;  // 1-based original round indices, increasing
    int64_t rounds_used = 0;        // M
    AgreementCounts counts;
    std::optional<Basis> first_agreement;
};

// Small exact rational; lambda_test always has denominator k.
struct Ratio {
    int num = 0;
    int den = 1;
    double value() const { return static_cast<double>(num) / den; }
};

struct PEResult {
    bool aborted = false;
    BitString x;       // Alice's raw key (empty on abort)
    BitString x_prime; // Bob's raw key
    Ratio lambda_test;            // Z-part test error rate
    std::optional<Ratio> lambda_x;  // X-part rate (two-rate estimation only)
};

struct DiscardRecord {
    std::vector<int> u;       // kept X-agreement indices, size n
    std::vector<int> v;       // kept Z-agreement indices, size k
    std::vector<int> u_pool;  // all X-agreement indices
    std::vector<int> v_pool;  // all Z-agreement indices
};

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class RoundCapExceeded : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};
class PoolTooSmall : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};
class SiftAborted : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};
class SampleTooLarge : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};
class ResultAborted : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};

inline constexpr int64_t kDefaultRoundCap = 10'000'000;

// Uniformly random size-n / size-k subsets of the agreement pools,
// independent of each other.
DiscardRecord random_discard(const std::vector<int>& pool_x, const std::vector<int>& pool_z,
                             int n, int k, Rng& rng);

// Protocol with per-round basis announcements and quota-based termination.
// Loops until >= n X-agreements and >= k Z-agreements, then discards surplus
// at random and relabels order-preservingly. Never aborts; throws
// RoundCapExceeded if the cap is hit first (degenerate p_x configurations).
SiftResult run_iterative_sifting(const SiftParams& params, EvePolicy& eve, Rng& rng,
                                 RoundLog* log = nullptr, int64_t round_cap = kDefaultRoundCap);

// Fixed-round protocol: exactly m rounds with no announcements during the
// loop (Eve's transcript stays empty), then a quota check. Fails closed:
// aborted results still carry rounds_used = m so that efficiency statistics
// treat aborted runs as zero kept rounds.
SiftResult run_lca_sifting(const SiftParams& params, EvePolicy& eve, Rng& rng,
                           RoundLog* log = nullptr);

// Same final phase as run_lca_sifting but with both parties' basis choices
// forced by a fixed public schedule (a_r = b_r = schedule[r]). This is the
// deterministic-schedule protocol used to show that non-uniform sampling can
// occur with no communication at all.
SiftResult run_lca_sifting_scheduled(const SiftParams& params,
                                     const std::vector<Basis>& basis_schedule, EvePolicy& eve,
                                     Rng& rng, RoundLog* log = nullptr);

// Single-basis parameter estimation: Z-agreements are the test sample,
// X-agreements the raw key. Aborts iff lambda_test > q_tol.
PEResult run_sbpe(const SiftResult& sift, double q_tol);

// Two-error-rate parameter estimation: the k Z-positions plus k randomly
// chosen X-positions form the sample; both rates must be <= q_tol. The key
// is the n - k unsampled X-positions, order preserved.
PEResult run_lca_pe(const SiftResult& sift, double q_tol, Rng& rng);

// Fraction of raw-key positions (theta_i = 0) whose round Eve intercepted in
// the agreed basis, i.e. the bits she knows exactly.
double eve_key_knowledge(const RoundLog& log, const SiftResult& result);

} // namespace siftlab
