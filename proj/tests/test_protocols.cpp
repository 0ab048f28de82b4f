#include <doctest.h>

#include <cmath>
#include <map>

#include "siftlab/analytic.hpp"
#include "siftlab/protocols.hpp"

using namespace siftlab;

namespace {

SiftParams make(int n, int k, double px, std::optional<int> m = std::nullopt) {
    RawParams raw;
    raw.n = n;
    raw.k = k;
    raw.p_x = px;
    if (m) raw.m = *m;
    return validate_params(raw);
}

SiftResult kept_result(const std::string& s, const std::string& t, const std::string& theta) {
    SiftResult r;
    r.s = bits_from_string(s);
    r.t = bits_from_string(t);
    r.theta = bits_from_string(theta);
    for (int i = 1; i <= static_cast<int>(s.size()); ++i) r.kept_indices.push_back(i);
    r.rounds_used = static_cast<int64_t>(s.size());
    return r;
}

} // namespace

TEST_CASE("random_discard: unique subset, uniformity, disjointness") {
    Rng rng(30, 0);
    std::vector<int> px = {1, 4, 6}, pz = {2, 5, 9};
    DiscardRecord d = random_discard(px, pz, 3, 2, rng);
    CHECK(d.u == px);  // |pool| = n forces the whole pool

    std::map<std::pair<int, int>, int> freq;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        DiscardRecord r = random_discard(px, pz, 1, 2, rng);
        CHECK(r.u.size() == 1);
        CHECK(r.v.size() == 2);
        ++freq[{r.v[0], r.v[1]}];
    }
    double sigma = std::sqrt((1.0 / 3) * (2.0 / 3) * trials);
    for (const auto& [subset, count] : freq) {
        CHECK(std::fabs(count - trials / 3.0) < 4 * sigma);
    }
    CHECK_THROWS_AS(random_discard(px, pz, 4, 1, rng), PoolTooSmall);
}

TEST_CASE("iterative sifting structural invariants hold on every trial") {
    SiftParams params = make(2, 3, 0.55);
    for (uint64_t t = 0; t < 500; ++t) {
        Rng rng(31, t);
        EvePolicy eve = EvePolicy::passive();
        SiftResult res = run_iterative_sifting(params, eve, rng);
        REQUIRE_FALSE(res.aborted);
        CHECK(static_cast<int>(res.s.size()) == params.l());
        CHECK(static_cast<int>(res.t.size()) == params.l());
        CHECK(weight(res.theta) == params.k());
        CHECK(res.counts.n_x + res.counts.n_z + res.counts.n_d == res.rounds_used);
        for (size_t i = 1; i < res.kept_indices.size(); ++i) {
            CHECK(res.kept_indices[i - 1] < res.kept_indices[i]);
        }
        CHECK(res.kept_indices.back() <= res.rounds_used);
        // termination: one quota is met exactly, exceeding both is impossible
        bool x_exact = res.counts.n_x == params.n() && res.counts.n_z >= params.k();
        bool z_exact = res.counts.n_z == params.k() && res.counts.n_x >= params.n();
        CHECK((x_exact || z_exact));
        CHECK_FALSE((res.counts.n_x > params.n() && res.counts.n_z > params.k()));
        // noiseless channel: s = t
        CHECK(xor_count(res.s, res.t) == 0);
    }
}

TEST_CASE("iterative n=k=1: a first Z-agreement forces theta = 10") {
    SiftParams params = make(1, 1, 0.5);
    int seen = 0;
    for (uint64_t t = 0; t < 400; ++t) {
        Rng rng(32, t);
        EvePolicy eve = EvePolicy::passive();
        SiftResult res = run_iterative_sifting(params, eve, rng);
        if (res.first_agreement == Basis::Z) {
            ++seen;
            CHECK(to_string(res.theta) == "10");
        }
    }
    CHECK(seen > 100);
}

TEST_CASE("iterative sampling distribution at n=1, k=2") {
    const int trials = 200000;
    std::map<std::string, int> freq;
    SiftParams params = make(1, 2, 0.5);
    for (uint64_t t = 0; t < trials; ++t) {
        Rng rng(33, t);
        EvePolicy eve = EvePolicy::passive();
        freq[to_string(run_iterative_sifting(params, eve, rng).theta)]++;
    }
    auto band = [&](double p) { return 4 * std::sqrt(p * (1 - p) / trials); };
    CHECK(std::fabs(freq["110"] / double(trials) - 0.25) < band(0.25));
    CHECK(std::fabs(freq["101"] / double(trials) - 0.375) < band(0.375));
    CHECK(std::fabs(freq["011"] / double(trials) - 0.375) < band(0.375));

    // biased case: P(110) = g_z^2 with p_z = 0.7
    std::map<std::string, int> freq2;
    SiftParams biased = make(1, 2, 0.3);
    for (uint64_t t = 0; t < trials; ++t) {
        Rng rng(34, t);
        EvePolicy eve = EvePolicy::passive();
        freq2[to_string(run_iterative_sifting(biased, eve, rng).theta)]++;
    }
    double gz = 0.49 / (0.49 + 0.09);
    CHECK(std::fabs(freq2["110"] / double(trials) - gz * gz) < band(gz * gz));
}

TEST_CASE("degenerate p_x never terminates and hits the round cap") {
    SiftParams params = make(1, 1, 1.0);
    Rng rng(35, 0);
    EvePolicy eve = EvePolicy::passive();
    CHECK_THROWS_AS(run_iterative_sifting(params, eve, rng, nullptr, 1000), RoundCapExceeded);
}

TEST_CASE("lca sifting matches the enumerated law at n=k=1, m=2, px=0.6") {
    const int trials = 200000;
    SiftParams params = make(1, 1, 0.6, 2);
    int aborts = 0;
    std::map<std::string, int> freq;
    for (uint64_t t = 0; t < trials; ++t) {
        Rng rng(36, t);
        EvePolicy eve = EvePolicy::passive();
        SiftResult res = run_lca_sifting(params, eve, rng);
        if (res.aborted) {
            ++aborts;
            CHECK(res.rounds_used == 2);
            continue;
        }
        CHECK(res.rounds_used == 2);
        freq[to_string(res.theta)]++;
    }
    auto band = [&](double p) { return 4 * std::sqrt(p * (1 - p) / trials); };
    CHECK(std::fabs(aborts / double(trials) - 0.8848) < band(0.8848));
    CHECK(std::fabs(freq["01"] / double(trials) - 0.0576) < band(0.0576));
    CHECK(std::fabs(freq["10"] / double(trials) - 0.0576) < band(0.0576));
}

TEST_CASE("lca with m = l keeps only zero-slack histories") {
    SiftParams params = make(2, 1, 0.5, 3);
    for (uint64_t t = 0; t < 2000; ++t) {
        Rng rng(37, t);
        EvePolicy eve = EvePolicy::passive();
        SiftResult res = run_lca_sifting(params, eve, rng);
        if (res.aborted) continue;
        CHECK(res.counts.n_x == 2);
        CHECK(res.counts.n_z == 1);
        CHECK(res.counts.n_d == 0);
        CHECK(res.kept_indices == std::vector<int>{1, 2, 3});
    }
}

TEST_CASE("sbpe follows the correlation-test examples") {
    PEResult ok = run_sbpe(kept_result("0101", "0101", "0011"), 0.1);
    CHECK_FALSE(ok.aborted);
    CHECK(to_string(ok.x) == "01");
    CHECK(to_string(ok.x_prime) == "01");
    CHECK(ok.lambda_test.num == 0);
    CHECK(ok.lambda_test.den == 2);

    PEResult bad = run_sbpe(kept_result("00", "01", "01"), 0.0);
    CHECK(bad.aborted);
    CHECK(bad.lambda_test.value() == doctest::Approx(1.0));

    // lambda_test = 1/2 on test positions {2, 4}
    PEResult half = run_sbpe(kept_result("0110", "0111", "0101"), 0.5);
    CHECK_FALSE(half.aborted);
    CHECK(half.lambda_test.value() == doctest::Approx(0.5));
    CHECK(run_sbpe(kept_result("0110", "0111", "0101"), 0.49).aborted);

    SiftResult aborted;
    aborted.aborted = true;
    CHECK_THROWS_AS(run_sbpe(aborted, 0.1), SiftAborted);
}

TEST_CASE("two-rate estimation: clean pass, X-rate abort, random X-sample") {
    Rng rng(38, 0);
    // passive: both rates zero, key has n - k bits
    PEResult pe = run_lca_pe(kept_result("010011", "010011", "010010"), 0.0, rng);
    CHECK_FALSE(pe.aborted);
    CHECK(pe.lambda_test.value() == 0.0);
    CHECK(pe.lambda_x->value() == 0.0);
    CHECK(pe.x.size() == 2);  // n = 4, k = 2

    // every X-test bit flipped: X-rate 1
    PEResult flip = run_lca_pe(kept_result("0000", "1110", "0001"), 0.99, rng);
    CHECK(flip.aborted);
    CHECK(flip.lambda_x->value() == doctest::Approx(1.0));

    // n = 2, k = 1, errors on one X position: abort with probability 1/2
    int aborts = 0;
    const int trials = 100000;
    for (uint64_t t = 0; t < trials; ++t) {
        Rng r(39, t);
        aborts += run_lca_pe(kept_result("110", "100", "001"), 0.0, r).aborted;
    }
    CHECK(std::fabs(aborts / double(trials) - 0.5) < 4 * std::sqrt(0.25 / trials));

    // n < k is rejected
    CHECK_THROWS_AS(run_lca_pe(kept_result("011", "011", "011"), 0.1, rng), SampleTooLarge);
}

TEST_CASE("eve key knowledge: passive zero, basis mismatch zero") {
    SiftParams params = make(2, 1, 0.5, 8);
    int kept_trials = 0;
    for (uint64_t t = 0; t < 500 && kept_trials < 100; ++t) {
        Rng rng(40, t);
        EvePolicy passive = EvePolicy::passive();
        RoundLog log;
        SiftResult res = run_lca_sifting(params, passive, rng, &log);
        if (res.aborted) continue;
        ++kept_trials;
        CHECK(eve_key_knowledge(log, res) == 0.0);
    }
    CHECK(kept_trials >= 100);

    kept_trials = 0;
    for (uint64_t t = 0; t < 500 && kept_trials < 100; ++t) {
        Rng rng(41, t);
        EvePolicy fz = EvePolicy::fixed(Basis::Z);
        RoundLog log;
        SiftResult res = run_lca_sifting(params, fz, rng, &log);
        if (res.aborted) continue;
        ++kept_trials;
        // key positions are X-agreements; Eve measured Z everywhere
        CHECK(eve_key_knowledge(log, res) == 0.0);
    }
    CHECK(kept_trials >= 100);

    SiftResult aborted;
    aborted.aborted = true;
    RoundLog empty;
    CHECK_THROWS_AS(eve_key_knowledge(empty, aborted), ResultAborted);
}

TEST_CASE("matched deterministic schedule gives Eve the whole key, error-free") {
    SiftParams params = make(3, 2, 0.5, 5);
    std::vector<Basis> bases = {Basis::X, Basis::X, Basis::X, Basis::Z, Basis::Z};
    std::vector<std::optional<Basis>> esched(bases.begin(), bases.end());
    for (uint64_t t = 0; t < 300; ++t) {
        Rng rng(42, t);
        EvePolicy eve = EvePolicy::schedule(esched);
        RoundLog log;
        SiftResult res = run_lca_sifting_scheduled(params, bases, eve, rng, &log);
        REQUIRE_FALSE(res.aborted);
        CHECK(to_string(res.theta) == "00011");
        CHECK(xor_count(res.s, res.t) == 0);
        CHECK(eve_key_knowledge(log, res) == 1.0);
    }
}

TEST_CASE("lca transcript stays empty for the whole loop") {
    // an AttackLeak policy can never see an agreement under LCA sifting, so
    // every decision sticks to the coin flipped before round 1
    SiftParams params = make(1, 1, 0.5, 12);
    for (uint64_t t = 0; t < 200; ++t) {
        Rng r1(43, t);
        EvePolicy leak = EvePolicy::leak();
        RoundLog log;
        run_lca_sifting(params, leak, r1, &log);
        REQUIRE(log.size() == 12);
        for (const RoundRecord& rec : log) {
            CHECK(rec.eve_basis == log.front().eve_basis);
        }
    }
}
