#include "siftlab/stats.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace siftlab {

namespace {

double gamma_series(double a, double x) {
    // P(a,x) by series; returns Q = 1 - P
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cf(double a, double x) {
    // Q(a,x) by modified Lentz continued fraction
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

constexpr int64_t kLogFactTableSize = 1 << 17;

const std::vector<double>& log_fact_table() {
    static std::vector<double> table;
    static std::once_flag once;
    std::call_once(once, [] {
        table.resize(kLogFactTableSize);
        table[0] = 0.0;
        for (int64_t i = 1; i < kLogFactTableSize; ++i) {
            table[i] = table[i - 1] + std::log(static_cast<double>(i));
        }
    });
    return table;
}

} // namespace

double gammq(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gammq: bad arguments");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? gamma_series(a, x) : gamma_cf(a, x);
}

double log_binomial(int64_t n, int64_t k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    if (n < kLogFactTableSize) {
        const auto& t = log_fact_table();
        return t[n] - t[k] - t[n - k];
    }
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

double binomial_d(int64_t n, int64_t k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    if (n <= 60) {
        double r = 1.0;
        for (int64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / i;
        return r;
    }
    return std::exp(log_binomial(n, k));
}

} // namespace siftlab
