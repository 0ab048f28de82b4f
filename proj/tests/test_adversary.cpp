#include <doctest.h>

#include <sstream>

#include "siftlab/adversary.hpp"

using namespace siftlab;

namespace {

PublicTranscript transcript_of(const std::string& tokens) {
    // 'd' = disagreement, 'x' = X-agreement, 'z' = Z-agreement
    PublicTranscript t;
    for (char c : tokens) {
        if (c == 'd') t.append(Basis::X, Basis::Z);
        if (c == 'x') t.append(Basis::X, Basis::X);
        if (c == 'z') t.append(Basis::Z, Basis::Z);
    }
    return t;
}

} // namespace

TEST_CASE("nonuniform attack: X in round 1, Z afterwards, transcript ignored") {
    Rng rng(20, 0);
    EvePolicy eve = EvePolicy::nonuniform();
    CHECK(eve.decide(1, transcript_of(""), rng) == Basis::X);
    CHECK(eve.decide(5, transcript_of("dzxz"), rng) == Basis::Z);
    // transcript-permutation invariance
    EvePolicy e2 = EvePolicy::nonuniform();
    for (const char* tr : {"", "dddd", "xxxx", "zxzx"}) {
        CHECK(e2.decide(2, transcript_of(tr), rng) == Basis::Z);
    }
}

TEST_CASE("leak attack holds its coin basis until the first announced agreement") {
    Rng rng(21, 0);
    EvePolicy eve = EvePolicy::leak();
    auto first = eve.decide(1, transcript_of(""), rng);
    REQUIRE(first.has_value());
    // disagreements only: keeps flipping nothing, stays on the coin basis
    CHECK(eve.decide(2, transcript_of("d"), rng) == first);
    CHECK(eve.decide(3, transcript_of("dd"), rng) == first);
    CHECK(eve.decide(4, transcript_of("ddd"), rng) == first);
    // first agreement is an X-agreement: switch to Z for good
    CHECK(eve.decide(5, transcript_of("dddx"), rng) == Basis::Z);
    CHECK(eve.decide(6, transcript_of("dddxz"), rng) == Basis::Z);
}

TEST_CASE("both-problems attack: X until an agreement, then the opposite basis") {
    Rng rng(22, 0);
    EvePolicy eve = EvePolicy::both();
    CHECK(eve.decide(1, transcript_of(""), rng) == Basis::X);
    CHECK(eve.decide(3, transcript_of("dd"), rng) == Basis::X);
    // Z-agreement announced: keep attacking X forever
    CHECK(eve.decide(4, transcript_of("ddz"), rng) == Basis::X);
    CHECK(eve.decide(6, transcript_of("ddzxx"), rng) == Basis::X);
    // fresh policy, X-agreement first: switch to Z
    EvePolicy e2 = EvePolicy::both();
    CHECK(e2.decide(3, transcript_of("dx"), rng) == Basis::Z);
}

TEST_CASE("schedule policy follows entries and defaults to no intercept") {
    Rng rng(23, 0);
    EvePolicy eve = EvePolicy::schedule({Basis::X, std::nullopt, Basis::Z});
    CHECK(eve.decide(1, transcript_of(""), rng) == Basis::X);
    CHECK_FALSE(eve.decide(2, transcript_of("d"), rng).has_value());
    CHECK(eve.decide(3, transcript_of("dd"), rng) == Basis::Z);
    CHECK_FALSE(eve.decide(4, transcript_of("ddd"), rng).has_value());
}

TEST_CASE("schedule file format") {
    auto sched = parse_schedule("X\nZ\n-\n z \n");
    REQUIRE(sched.size() == 4);
    CHECK(sched[0] == Basis::X);
    CHECK(sched[1] == Basis::Z);
    CHECK_FALSE(sched[2].has_value());
    CHECK(sched[3] == Basis::Z);
    CHECK_THROWS_AS(parse_schedule("X\nQ\n"), std::invalid_argument);
}

TEST_CASE("causality: truncated transcript replays reproduce each prefix decision") {
    // build a random announcement history, then check that replaying a fresh
    // policy against every prefix gives the same decision sequence
    Rng gen(24, 0);
    for (int rep = 0; rep < 1000; ++rep) {
        std::string hist;
        int len = 1 + static_cast<int>(gen.below(8));
        for (int i = 0; i < len; ++i) hist.push_back("dxz"[gen.below(3)]);

        for (int which = 0; which < 3; ++which) {
            EvePolicy proto = which == 0   ? EvePolicy::nonuniform()
                              : which == 1 ? EvePolicy::both()
                                           : EvePolicy::fixed(Basis::Z);
            EvePolicy online = proto;
            std::vector<std::optional<Basis>> decisions;
            for (int r = 1; r <= len; ++r) {
                Rng rng(25, static_cast<uint64_t>(rep));
                decisions.push_back(
                    online.decide(r, transcript_of(hist.substr(0, static_cast<size_t>(r - 1))),
                                  rng));
            }
            for (int r = 1; r <= len; ++r) {
                EvePolicy replay = proto;
                // feed the truncated prefix round by round, as the runner would
                std::optional<Basis> last;
                for (int rr = 1; rr <= r; ++rr) {
                    Rng rng(25, static_cast<uint64_t>(rep));
                    last = replay.decide(
                        rr, transcript_of(hist.substr(0, static_cast<size_t>(rr - 1))), rng);
                }
                CHECK(last == decisions[static_cast<size_t>(r - 1)]);
            }
        }
    }
}

TEST_CASE("with an empty transcript the adaptive attacks degenerate to fixed bases") {
    PublicTranscript empty;
    for (uint64_t stream = 0; stream < 50; ++stream) {
        Rng r1(26, stream), r2(26, stream);
        EvePolicy leak = EvePolicy::leak();
        auto coin = leak.decide(1, empty, r1);
        EvePolicy fixed = EvePolicy::fixed(*coin);
        for (int round = 2; round <= 30; ++round) {
            CHECK(leak.decide(round, empty, r1) == fixed.decide(round, empty, r2));
        }
        EvePolicy both = EvePolicy::both();
        for (int round = 1; round <= 30; ++round) {
            CHECK(both.decide(round, empty, r1) == Basis::X);
        }
    }
}
