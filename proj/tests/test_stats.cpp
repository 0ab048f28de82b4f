#include <doctest.h>

#include <cmath>

#include "siftlab/stats.hpp"

using namespace siftlab;

TEST_CASE("chi-square survival function reference points") {
    // frozen against scipy.stats.chi2.sf
    CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi_square_sf(4.605170185988092, 2) == doctest::Approx(0.10).epsilon(1e-9));
    CHECK(chi_square_sf(11.344866730144373, 3) == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(chi_square_sf(15.086272469388987, 5) == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(chi_square_sf(21.665994333461924, 9) == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(chi_square_sf(1.0, 2) == doctest::Approx(0.6065306597126334).epsilon(1e-12));
    CHECK(chi_square_sf(3.5, 7) == doctest::Approx(0.8352254826100421).epsilon(1e-10));
    CHECK(chi_square_sf(0.0, 2) == doctest::Approx(1.0));
}

TEST_CASE("log_binomial agrees with exact values") {
    CHECK(std::exp(log_binomial(10, 3)) == doctest::Approx(120.0).epsilon(1e-12));
    CHECK(std::exp(log_binomial(60, 30)) ==
          doctest::Approx(118264581564861424.0).epsilon(1e-10));
    CHECK(log_binomial(5, 7) == -std::numeric_limits<double>::infinity());
    CHECK(binomial_d(4, 2) == doctest::Approx(6.0));
    CHECK(binomial_d(0, 0) == doctest::Approx(1.0));
}
