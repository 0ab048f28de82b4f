#pragma once

#include <cstdint>

namespace siftlab {

// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a).
// Series for x < a + 1, Lentz continued fraction otherwise.
double gammq(double a, double x);

// Upper tail of the chi-square distribution with df degrees of freedom.
inline double chi_square_sf(double x, int df) {
    return gammq(0.5 * df, 0.5 * x);
}

// log(n choose k) via lgamma, with a cached log-factorial table.
double log_binomial(int64_t n, int64_t k);

// n choose k as a double (exact for small arguments, exp(log) beyond).
double binomial_d(int64_t n, int64_t k);

} // namespace siftlab
