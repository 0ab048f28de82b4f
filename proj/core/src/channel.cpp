#include "siftlab/channel.hpp"

namespace siftlab {

ChannelOutcome simulate_round(Basis a, Basis b, std::optional<Basis> eve_action, Rng& rng) {
    ChannelOutcome out;
    out.y = rng.coin();

    if (!eve_action) {
        out.y_prime = (a == b) ? out.y : rng.coin();
        return out;
    }

    if (a != b) {
        out.y_prime = rng.coin();
        out.eve_learned = rng.coin();
        return out;
    }

    if (*eve_action == a) {
        // same basis everywhere: Eve reads the bit and forwards it intact
        out.y_prime = out.y;
        out.eve_learned = out.y;
    } else {
        // wrong-basis intercept: Eve's record is noise and the resent state
        // flips Bob's outcome with probability 1/2
        out.eve_learned = rng.coin();
        out.y_prime = rng.coin();
    }
    return out;
}

} // namespace siftlab
