#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace siftlab {

// Machine-readable record of one command invocation. Everything here is a
// pure function of (command, parameters, seed), so serialized reports are
// byte-identical across re-runs and worker counts; wall time is deliberately
// kept out and reported on stderr instead.
struct RunReport {
    std::string command;
    std::vector<std::pair<std::string, std::string>> params;  // resolved, in order
    uint64_t seed = 0;

    struct Metric {
        std::string name;
        double value = 0.0;
        std::optional<double> std_error;
        std::optional<std::string> note;
    };
    std::vector<Metric> metrics;
    std::string version;

    void param(const std::string& key, const std::string& value) {
        params.emplace_back(key, value);
    }
    void metric(const std::string& name, double value,
                std::optional<double> std_error = std::nullopt,
                std::optional<std::string> note = std::nullopt) {
        metrics.push_back({name, value, std_error, note});
    }

    std::string render_json() const;
    std::string render_csv() const;
};

// Shortest-roundtrip decimal rendering, '.' separator, no locale surprises.
std::string format_double(double v);

} // namespace siftlab
