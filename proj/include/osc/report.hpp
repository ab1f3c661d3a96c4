#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"

namespace osc {

// Shortest round-trip decimal form; used for CSV so files are byte-stable.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Finite numbers pass through; NaN/inf become JSON null rather than being
// silently dropped by the serializer.
inline nlohmann::json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

// Uniform verdict envelope shared by every verification routine. `slack` is
// the margin by which the check passes: positive means the measured value
// clears the bound in the required direction. `sigma` is the statistical
// standard error backing the verdict, 0 for deterministic checks.
struct CheckReport {
    std::string check;
    nlohmann::json inputs = nlohmann::json::object();
    double measured = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    double sigma = 0.0;
    bool pass = false;
    nlohmann::json detail = nlohmann::json::object();

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["check"] = check;
        j["inputs"] = inputs;
        j["measured"] = json_number(measured);
        j["bound"] = json_number(bound);
        j["slack"] = json_number(slack);
        j["sigma"] = json_number(sigma);
        j["verdict"] = pass ? "pass" : "fail";
        if (!detail.empty()) j["detail"] = detail;
        return j;
    }
};

}  // namespace osc
