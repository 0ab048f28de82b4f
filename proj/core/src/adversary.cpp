#include "siftlab/adversary.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace siftlab {

void EvePolicy::reset() {
    scanned_ = 0;
    first_agreement_.reset();
    coin_basis_.reset();
}

void EvePolicy::scan_transcript(const PublicTranscript& transcript) {
    while (scanned_ < transcript.announced.size()) {
        const auto& [a, b] = transcript.announced[scanned_];
        ++scanned_;
        if (a == b && !first_agreement_) {
            first_agreement_ = a;
        }
    }
}

std::optional<Basis> EvePolicy::decide(int round, const PublicTranscript& transcript, Rng& rng) {
    switch (kind_) {
        case EveKind::Passive:
            return std::nullopt;
        case EveKind::FixedBasis:
            return fixed_basis_;
        case EveKind::Schedule: {
            size_t idx = static_cast<size_t>(round - 1);
            if (idx >= schedule_.size()) return std::nullopt;
            return schedule_[idx];
        }
        case EveKind::AttackNonUniform:
            return round == 1 ? Basis::X : Basis::Z;
        case EveKind::AttackLeak: {
            if (!coin_basis_) coin_basis_ = rng.coin() ? Basis::Z : Basis::X;
            scan_transcript(transcript);
            if (first_agreement_) {
                return *first_agreement_ == Basis::X ? Basis::Z : Basis::X;
            }
            return coin_basis_;
        }
        case EveKind::AttackBoth: {
            scan_transcript(transcript);
            if (first_agreement_) {
                return *first_agreement_ == Basis::X ? Basis::Z : Basis::X;
            }
            return Basis::X;
        }
    }
    return std::nullopt;
}

std::vector<std::optional<Basis>> parse_schedule(const std::string& text) {
    std::vector<std::optional<Basis>> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // trim whitespace
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            out.push_back(std::nullopt);
            continue;
        }
        size_t e = line.find_last_not_of(" \t\r");
        std::string tok = line.substr(b, e - b + 1);
        if (tok == "X" || tok == "x") {
            out.push_back(Basis::X);
        } else if (tok == "Z" || tok == "z") {
            out.push_back(Basis::Z);
        } else if (tok == "-") {
            out.push_back(std::nullopt);
        } else {
            throw std::invalid_argument("schedule line " + std::to_string(lineno) +
                                        ": expected X, Z or -, got '" + tok + "'");
        }
    }
    return out;
}

std::vector<std::optional<Basis>> load_schedule_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schedule file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_schedule(ss.str());
}

} // namespace siftlab
