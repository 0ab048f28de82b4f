#include "siftlab/report.hpp"

#include <charconv>

#include <json.hpp>

namespace siftlab {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string RunReport::render_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["seed"] = seed;
    nlohmann::ordered_json p = nlohmann::ordered_json::object();
    for (const auto& [key, value] : params) p[key] = value;
    j["parameters"] = p;
    nlohmann::ordered_json ms = nlohmann::ordered_json::array();
    for (const auto& m : metrics) {
        nlohmann::ordered_json mj;
        mj["name"] = m.name;
        mj["value"] = m.value;
        if (m.std_error) mj["std_error"] = *m.std_error;
        if (m.note) mj["note"] = *m.note;
        ms.push_back(mj);
    }
    j["metrics"] = ms;
    j["version"] = version;
    return j.dump(2) + "\n";
}

std::string RunReport::render_csv() const {
    std::string out = "metric,value,std_error\n";
    for (const auto& m : metrics) {
        out += m.name;
        out += ',';
        out += format_double(m.value);
        out += ',';
        if (m.std_error) out += format_double(*m.std_error);
        out += '\n';
    }
    return out;
}

} // namespace siftlab
