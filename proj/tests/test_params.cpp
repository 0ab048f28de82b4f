#include <doctest.h>

#include "siftlab/params.hpp"

using namespace siftlab;

TEST_CASE("normalization derives l and p_z") {
    SiftParams p = validate_params({1, 2, std::nullopt, 0.5, 1.0});
    CHECK(p.l() == 3);
    CHECK(p.p_z() == doctest::Approx(0.5));

    SiftParams q = validate_params({2, 2, 12, 0.7, 0.1});
    CHECK(q.l() == 4);
    CHECK(q.p_z() == doctest::Approx(0.3));
    CHECK(q.m().value() == 12);
    CHECK(q.q_tol() == doctest::Approx(0.1));
}

TEST_CASE("m below n + k is rejected") {
    try {
        validate_params({1, 1, 1, 0.5, 1.0});
        FAIL("expected ParamError");
    } catch (const ParamError& e) {
        CHECK(e.code() == ParamErrorCode::RoundCountTooSmall);
    }
}

TEST_CASE("nonpositive quotas are rejected") {
    for (auto [n, k] : {std::pair<int64_t, int64_t>{0, 1}, {1, 0}, {-3, 2}}) {
        try {
            validate_params({n, k, std::nullopt, 0.5, 1.0});
            FAIL("expected ParamError");
        } catch (const ParamError& e) {
            CHECK(e.code() == ParamErrorCode::NonPositiveQuota);
        }
    }
}

TEST_CASE("probabilities outside [0,1] are rejected") {
    for (double px : {-0.1, 1.2}) {
        try {
            validate_params({1, 1, std::nullopt, px, 1.0});
            FAIL("expected ParamError");
        } catch (const ParamError& e) {
            CHECK(e.code() == ParamErrorCode::ProbabilityOutOfRange);
        }
    }
    try {
        validate_params({1, 1, std::nullopt, 0.5, 1.5});
        FAIL("expected ParamError");
    } catch (const ParamError& e) {
        CHECK(e.code() == ParamErrorCode::ProbabilityOutOfRange);
    }
}

TEST_CASE("missing m is an error when the protocol needs it") {
    try {
        validate_params({1, 1, std::nullopt, 0.5, 1.0}, /*require_m=*/true);
        FAIL("expected ParamError");
    } catch (const ParamError& e) {
        CHECK(e.code() == ParamErrorCode::MissingM);
    }
}
