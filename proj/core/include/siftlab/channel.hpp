#pragma once

#include <optional>

#include "siftlab/params.hpp"
#include "siftlab/rng.hpp"

namespace siftlab {

struct ChannelOutcome {
    int y;        // Alice's measured bit
    int y_prime;  // Bob's measured bit
    std::optional<int> eve_learned;  // present iff Eve intercepted this round
};

// Draws a basis: X with probability p_x, Z otherwise.
inline Basis sample_basis(double p_x, Rng& rng) {
    return rng.bernoulli(p_x) ? Basis::X : Basis::Z;
}

// Classical outcome law of one entangled pair sent through an optional
// intercept-resend adversary measuring in basis eve_action.
//
//   - no intercept:  y' = y when a = b, independent uniform otherwise
//   - a = b = e:     Eve resends the eigenstate she saw; y' = y, she knows y
//   - a = b != e:    Eve's wrong-basis measurement randomizes Bob's outcome,
//                    so y' = y only with probability 1/2
//   - a != b:        the round is discarded anyway; outcomes independent
ChannelOutcome simulate_round(Basis a, Basis b, std::optional<Basis> eve_action, Rng& rng);

} // namespace siftlab
