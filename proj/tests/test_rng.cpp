#include <doctest.h>

#include <cmath>
#include <set>

#include "siftlab/rng.hpp"

using namespace siftlab;

TEST_CASE("identical (seed, stream) pairs give bit-identical streams") {
    Rng a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct stream indices give distinct streams") {
    Rng a(42, 0), b(42, 1), c(43, 0);
    int same_ab = 0, same_ac = 0;
    for (int i = 0; i < 64; ++i) {
        uint64_t x = a.next_u64();
        same_ab += x == b.next_u64();
        same_ac += x == c.next_u64();
    }
    CHECK(same_ab == 0);
    CHECK(same_ac == 0);
}

TEST_CASE("next_double lies in [0,1) and has the right mean") {
    Rng rng(1, 0);
    const int n = 200000;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        double v = rng.next_double();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        sum += v;
    }
    double mean = sum / n;
    double sigma = std::sqrt(1.0 / 12 / n);
    CHECK(std::fabs(mean - 0.5) < 4 * sigma);
}

TEST_CASE("below() is unbiased over a small range") {
    Rng rng(5, 3);
    const int n = 120000;
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) ++counts[rng.below(3)];
    double sigma = std::sqrt((1.0 / 3) * (2.0 / 3) * n);
    for (int c : counts) CHECK(std::fabs(c - n / 3.0) < 4 * sigma);
}

TEST_CASE("bernoulli respects degenerate probabilities") {
    Rng rng(9, 0);
    for (int i = 0; i < 100; ++i) {
        CHECK(rng.bernoulli(1.0));
        CHECK_FALSE(rng.bernoulli(0.0));
    }
}
