#include "siftlab/protocols.hpp"

#include <algorithm>
#include <cassert>

namespace siftlab {

namespace {

std::vector<int> sample_subset(const std::vector<int>& pool, int want, Rng& rng) {
    // partial Fisher-Yates, then restore round order
    std::vector<int> work = pool;
    const size_t n = work.size();
    for (int i = 0; i < want; ++i) {
        size_t j = i + static_cast<size_t>(rng.below(n - i));
        std::swap(work[i], work[j]);
    }
    work.resize(want);
    std::sort(work.begin(), work.end());
    return work;
}

struct LoopState {
    std::vector<int> pool_x, pool_z;
    std::vector<int> err_x, err_z;   // s_i ^ t_i per pooled round
    std::vector<int> y_x, y_z;       // Alice's bit per pooled round
    AgreementCounts counts;
    std::optional<Basis> first_agreement;
};

// One quantum round: basis sampling, Eve's decision, channel simulation.
void play_round(int r, double p_x, EvePolicy& eve, const PublicTranscript& transcript,
                LoopState& st, Rng& rng, RoundLog* log, Basis* a_out, Basis* b_out) {
    Basis a = sample_basis(p_x, rng);
    Basis b = sample_basis(p_x, rng);
    std::optional<Basis> e = eve.decide(r, transcript, rng);
    ChannelOutcome out = simulate_round(a, b, e, rng);

    if (a == b) {
        if (!st.first_agreement) st.first_agreement = a;
        if (a == Basis::X) {
            st.pool_x.push_back(r);
            st.err_x.push_back(out.y ^ out.y_prime);
            st.y_x.push_back(out.y);
            ++st.counts.n_x;
        } else {
            st.pool_z.push_back(r);
            st.err_z.push_back(out.y ^ out.y_prime);
            st.y_z.push_back(out.y);
            ++st.counts.n_z;
        }
    } else {
        ++st.counts.n_d;
    }
    if (log) log->push_back(RoundRecord{r, a, b, e, out.y, out.y_prime});
    *a_out = a;
    *b_out = b;
}

SiftResult finalize(const SiftParams& params, LoopState& st, int64_t rounds, Rng& rng) {
    const int n = params.n(), k = params.k(), l = params.l();
    DiscardRecord d = random_discard(st.pool_x, st.pool_z, n, k, rng);

    SiftResult res;
    res.rounds_used = rounds;
    res.counts = st.counts;
    res.first_agreement = st.first_agreement;
    res.s.reserve(l);
    res.t.reserve(l);
    res.theta.reserve(l);
    res.kept_indices.reserve(l);

    // order-preserving relabeling over u ∪ v
    size_t iu = 0, iv = 0;
    while (iu < d.u.size() || iv < d.v.size()) {
        bool take_x = iv == d.v.size() || (iu < d.u.size() && d.u[iu] < d.v[iv]);
        if (take_x) {
            size_t pos = static_cast<size_t>(
                std::lower_bound(st.pool_x.begin(), st.pool_x.end(), d.u[iu]) -
                st.pool_x.begin());
            res.kept_indices.push_back(d.u[iu]);
            res.theta.push_back(0);
            res.s.push_back(static_cast<uint8_t>(st.y_x[pos]));
            res.t.push_back(static_cast<uint8_t>(st.y_x[pos] ^ st.err_x[pos]));
            ++iu;
        } else {
            size_t pos = static_cast<size_t>(
                std::lower_bound(st.pool_z.begin(), st.pool_z.end(), d.v[iv]) -
                st.pool_z.begin());
            res.kept_indices.push_back(d.v[iv]);
            res.theta.push_back(1);
            res.s.push_back(static_cast<uint8_t>(st.y_z[pos]));
            res.t.push_back(static_cast<uint8_t>(st.y_z[pos] ^ st.err_z[pos]));
            ++iv;
        }
    }
    return res;
}

} // namespace

DiscardRecord random_discard(const std::vector<int>& pool_x, const std::vector<int>& pool_z,
                             int n, int k, Rng& rng) {
    if (static_cast<int>(pool_x.size()) < n || static_cast<int>(pool_z.size()) < k) {
        throw PoolTooSmall("agreement pool smaller than quota");
    }
    DiscardRecord d;
    d.u_pool = pool_x;
    d.v_pool = pool_z;
    d.u = sample_subset(pool_x, n, rng);
    d.v = sample_subset(pool_z, k, rng);
    return d;
}

SiftResult run_iterative_sifting(const SiftParams& params, EvePolicy& eve, Rng& rng,
                                 RoundLog* log, int64_t round_cap) {
    LoopState st;
    PublicTranscript transcript;
    int64_t r = 0;
    for (;;) {
        if (r >= round_cap) {
            throw RoundCapExceeded("termination condition not reached within round cap");
        }
        ++r;
        Basis a, b;
        play_round(static_cast<int>(r), params.p_x(), eve, transcript, st, rng, log, &a, &b);
        transcript.append(a, b);  // interim report, after each round
        if (st.counts.n_x >= params.n() && st.counts.n_z >= params.k()) break;
    }
    return finalize(params, st, r, rng);
}

namespace {

SiftResult run_fixed_rounds(const SiftParams& params, EvePolicy& eve, Rng& rng, RoundLog* log,
                            const std::vector<Basis>* basis_schedule) {
    if (!params.m()) {
        throw ParamError(ParamErrorCode::MissingM, "fixed-round sifting requires m");
    }
    const int m = *params.m();
    LoopState st;
    PublicTranscript transcript;  // stays empty: no announcements in the loop
    for (int r = 1; r <= m; ++r) {
        if (basis_schedule) {
            Basis ab = (*basis_schedule)[static_cast<size_t>(r - 1) % basis_schedule->size()];
            std::optional<Basis> e = eve.decide(r, transcript, rng);
            ChannelOutcome out = simulate_round(ab, ab, e, rng);
            if (!st.first_agreement) st.first_agreement = ab;
            if (ab == Basis::X) {
                st.pool_x.push_back(r);
                st.err_x.push_back(out.y ^ out.y_prime);
                st.y_x.push_back(out.y);
                ++st.counts.n_x;
            } else {
                st.pool_z.push_back(r);
                st.err_z.push_back(out.y ^ out.y_prime);
                st.y_z.push_back(out.y);
                ++st.counts.n_z;
            }
            if (log) log->push_back(RoundRecord{r, ab, ab, e, out.y, out.y_prime});
        } else {
            Basis a, b;
            play_round(r, params.p_x(), eve, transcript, st, rng, log, &a, &b);
        }
    }
    if (st.counts.n_x < params.n() || st.counts.n_z < params.k()) {
        SiftResult res;
        res.aborted = true;
        res.rounds_used = m;
        res.counts = st.counts;
        res.first_agreement = st.first_agreement;
        return res;
    }
    return finalize(params, st, m, rng);
}

} // namespace

SiftResult run_lca_sifting(const SiftParams& params, EvePolicy& eve, Rng& rng, RoundLog* log) {
    return run_fixed_rounds(params, eve, rng, log, nullptr);
}

SiftResult run_lca_sifting_scheduled(const SiftParams& params,
                                     const std::vector<Basis>& basis_schedule, EvePolicy& eve,
                                     Rng& rng, RoundLog* log) {
    return run_fixed_rounds(params, eve, rng, log, &basis_schedule);
}

PEResult run_sbpe(const SiftResult& sift, double q_tol) {
    if (sift.aborted) throw SiftAborted("sifting aborted before parameter estimation");
    const int l = static_cast<int>(sift.theta.size());
    int k = 0, errs = 0;
    for (int i = 0; i < l; ++i) {
        if (sift.theta[i]) {
            ++k;
            errs += sift.s[i] ^ sift.t[i];
        }
    }
    PEResult pe;
    pe.lambda_test = Ratio{errs, k};
    if (pe.lambda_test.value() > q_tol) {
        pe.aborted = true;
        return pe;
    }
    for (int i = 0; i < l; ++i) {
        if (!sift.theta[i]) {
            pe.x.push_back(sift.s[i]);
            pe.x_prime.push_back(sift.t[i]);
        }
    }
    return pe;
}

PEResult run_lca_pe(const SiftResult& sift, double q_tol, Rng& rng) {
    if (sift.aborted) throw SiftAborted("sifting aborted before parameter estimation");
    const int l = static_cast<int>(sift.theta.size());
    std::vector<int> xpos;
    int k = 0, z_errs = 0;
    for (int i = 0; i < l; ++i) {
        if (sift.theta[i]) {
            ++k;
            z_errs += sift.s[i] ^ sift.t[i];
        } else {
            xpos.push_back(i);
        }
    }
    const int n = static_cast<int>(xpos.size());
    if (n < k) throw SampleTooLarge("two-rate estimation needs n >= k");

    std::vector<int> xsample = sample_subset(xpos, k, rng);
    int x_errs = 0;
    for (int i : xsample) x_errs += sift.s[i] ^ sift.t[i];

    PEResult pe;
    pe.lambda_test = Ratio{z_errs, k};
    pe.lambda_x = Ratio{x_errs, k};
    if (pe.lambda_test.value() > q_tol || pe.lambda_x->value() > q_tol) {
        pe.aborted = true;
        return pe;
    }
    size_t cursor = 0;
    for (int i : xpos) {
        if (cursor < xsample.size() && xsample[cursor] == i) {
            ++cursor;
            continue;
        }
        pe.x.push_back(sift.s[i]);
        pe.x_prime.push_back(sift.t[i]);
    }
    return pe;
}

double eve_key_knowledge(const RoundLog& log, const SiftResult& result) {
    if (result.aborted) throw ResultAborted("cannot score an aborted sift");
    int n = 0, known = 0;
    for (size_t i = 0; i < result.theta.size(); ++i) {
        if (result.theta[i]) continue;
        ++n;
        const RoundRecord& rec = log[static_cast<size_t>(result.kept_indices[i] - 1)];
        assert(rec.index == result.kept_indices[i]);
        if (rec.eve_basis && *rec.eve_basis == rec.a && rec.a == rec.b) ++known;
    }
    return n == 0 ? 0.0 : static_cast<double>(known) / n;
}

} // namespace siftlab
