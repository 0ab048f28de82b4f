#pragma once

#include <optional>
#include <string>
#include <vector>

#include "siftlab/params.hpp"
#include "siftlab/rng.hpp"

namespace siftlab {

// Everything Eve is allowed to see: the (a_r, b_r) pairs announced so far.
// Iterative sifting appends one entry after every round; LCA sifting
// announces nothing until the loop is over, so the list stays empty.
struct PublicTranscript {
    std::vector<std::pair<Basis, Basis>> announced;

    void clear() { announced.clear(); }
    void append(Basis a, Basis b) { announced.emplace_back(a, b); }
    size_t size() const { return announced.size(); }
};

enum class EveKind {
    Passive,
    FixedBasis,
    Schedule,
    AttackNonUniform,  // X in round 1, Z afterwards, ignores the transcript
    AttackLeak,        // coin-flip basis until the first announced agreement
    AttackBoth,        // X until the first announced agreement
};

// Per-round intercept decision as a function of the public transcript.
// One instance serves one protocol run; call reset() before reuse.
class EvePolicy {
public:
    static EvePolicy passive() { return EvePolicy(EveKind::Passive); }
    static EvePolicy fixed(Basis b) {
        EvePolicy p(EveKind::FixedBasis);
        p.fixed_basis_ = b;
        return p;
    }
    static EvePolicy schedule(std::vector<std::optional<Basis>> entries) {
        EvePolicy p(EveKind::Schedule);
        p.schedule_ = std::move(entries);
        return p;
    }
    static EvePolicy nonuniform() { return EvePolicy(EveKind::AttackNonUniform); }
    static EvePolicy leak() { return EvePolicy(EveKind::AttackLeak); }
    static EvePolicy both() { return EvePolicy(EveKind::AttackBoth); }

    EveKind kind() const { return kind_; }

    // Decision for 1-based round index. transcript must contain only rounds
    // before `round`; the decision never looks ahead.
    std::optional<Basis> decide(int round, const PublicTranscript& transcript, Rng& rng);

    void reset();

private:
    explicit EvePolicy(EveKind k) : kind_(k) {}

    // consume announcements up to the present, latching the first agreement
    void scan_transcript(const PublicTranscript& transcript);

    EveKind kind_;
    Basis fixed_basis_ = Basis::X;
    std::vector<std::optional<Basis>> schedule_;

    size_t scanned_ = 0;
    std::optional<Basis> first_agreement_;
    std::optional<Basis> coin_basis_;  // F, drawn once at round 1 (AttackLeak)
};

// Parses one schedule entry per line: `X`, `Z` or `-` (no intercept).
// Rounds past the end of the file default to `-`.
std::vector<std::optional<Basis>> parse_schedule(const std::string& text);
std::vector<std::optional<Basis>> load_schedule_file(const std::string& path);

} // namespace siftlab
