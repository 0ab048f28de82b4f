#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace siftlab {

enum class Basis : uint8_t { X = 0, Z = 1 };

inline char basis_char(Basis b) { return b == Basis::X ? 'X' : 'Z'; }

enum class ParamErrorCode {
    NonPositiveQuota,
    ProbabilityOutOfRange,
    RoundCountTooSmall,
    MissingM,
};

class ParamError : public std::invalid_argument {
public:
    ParamError(ParamErrorCode code, const std::string& what)
        : std::invalid_argument(what), code_(code) {}
    ParamErrorCode code() const { return code_; }

private:
    ParamErrorCode code_;
};

// Unvalidated input record, as parsed from a CLI or config.
struct RawParams {
    int64_t n = 0;
    int64_t k = 0;
    std::optional<int64_t> m;
    double p_x = 0.5;
    double q_tol = 1.0;
};

// Validated protocol parameters. p_z is always derived from p_x, so the
// constraint p_x + p_z = 1 cannot be violated by construction.
class SiftParams {
public:
    int n() const { return n_; }
    int k() const { return k_; }
    int l() const { return n_ + k_; }
    std::optional<int> m() const { return m_; }
    double p_x() const { return p_x_; }
    double p_z() const { return 1.0 - p_x_; }
    double q_tol() const { return q_tol_; }

    friend SiftParams validate_params(const RawParams& raw, bool require_m);

private:
    SiftParams() = default;
    int n_ = 0;
    int k_ = 0;
    std::optional<int> m_;
    double p_x_ = 0.5;
    double q_tol_ = 1.0;
};

// Checks the protocol parameter block: quotas positive, probabilities in
// range, and (when m is given or required) m >= n + k.
SiftParams validate_params(const RawParams& raw, bool require_m = false);

} // namespace siftlab
