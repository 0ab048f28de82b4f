#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace siftlab {

struct VerifyOptions {
    bool quick = false;       // caps Monte Carlo trial counts at 1e5
    uint64_t seed = 20240809; // master seed for every stochastic check
    unsigned workers = 1;
};

struct CheckLine {
    int criterion = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Runs the acceptance checks for the requested criteria (1..7; empty means
// all) and returns one line per sub-check. Deterministic for a fixed
// (seed, quick) pair, independent of the worker count.
std::vector<CheckLine> run_acceptance(const VerifyOptions& opts,
                                      const std::vector<int>& criteria = {});

// Renders the PASS/FAIL table: one line per sub-check plus one summary line
// per criterion. Returns true iff everything passed.
bool render_acceptance(const std::vector<CheckLine>& lines, std::string& out);

} // namespace siftlab
