#include "siftlab/params.hpp"

#include <limits>

namespace siftlab {

SiftParams validate_params(const RawParams& raw, bool require_m) {
    if (raw.n <= 0 || raw.k <= 0) {
        throw ParamError(ParamErrorCode::NonPositiveQuota,
                         "quotas n and k must be positive integers");
    }
    if (raw.n + raw.k > std::numeric_limits<int>::max() / 4) {
        throw ParamError(ParamErrorCode::NonPositiveQuota, "quotas too large");
    }
    if (!(raw.p_x >= 0.0 && raw.p_x <= 1.0)) {
        throw ParamError(ParamErrorCode::ProbabilityOutOfRange,
                         "p_x must lie in [0, 1]");
    }
    if (!(raw.q_tol >= 0.0 && raw.q_tol <= 1.0)) {
        throw ParamError(ParamErrorCode::ProbabilityOutOfRange,
                         "q_tol must lie in [0, 1]");
    }
    if (require_m && !raw.m.has_value()) {
        throw ParamError(ParamErrorCode::MissingM,
                         "fixed-round sifting requires the round count m");
    }
    if (raw.m && *raw.m < raw.n + raw.k) {
        throw ParamError(ParamErrorCode::RoundCountTooSmall,
                         "m must be at least n + k");
    }

    SiftParams p;
    p.n_ = static_cast<int>(raw.n);
    p.k_ = static_cast<int>(raw.k);
    if (raw.m) p.m_ = static_cast<int>(*raw.m);
    p.p_x_ = raw.p_x;
    p.q_tol_ = raw.q_tol;
    return p;
}

} // namespace siftlab
