#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace paircorr {

/// Outcome of one concrete lemma / asymptotic check.
/// pass is always abs_error <= tolerance; hypothesis problems are reported
/// separately through hypothesis_ok and notes.
struct VerifierReport {
    std::string name;
    double computed = 0.0;
    double predicted = 0.0;
    double abs_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string notes;
    bool hypothesis_ok = true;
    /// Additional numeric fields serialized alongside the core schema.
    std::map<std::string, double> extra;

    static VerifierReport make(std::string name, double computed, double predicted, double abs_error,
                               double tolerance, std::string notes = {}) {
        VerifierReport r;
        r.name = std::move(name);
        r.computed = computed;
        r.predicted = predicted;
        r.abs_error = abs_error;
        r.tolerance = tolerance;
        r.pass = std::isfinite(abs_error) && abs_error <= tolerance;
        r.notes = std::move(notes);
        return r;
    }
};

inline nlohmann::ordered_json to_json(const VerifierReport& r) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["computed"] = r.computed;
    j["predicted"] = r.predicted;
    j["abs_error"] = r.abs_error;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["notes"] = r.notes;
    j["hypothesis_ok"] = r.hypothesis_ok;
    for (const auto& [k, v] : r.extra) j[k] = v;
    return j;
}

inline nlohmann::ordered_json to_json(const std::vector<VerifierReport>& rs) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rs) arr.push_back(to_json(r));
    return arr;
}

/// Checks that a JSON value carries the report schema with the right types.
inline bool is_valid_report_json(const nlohmann::ordered_json& j) {
    if (!j.is_object()) return false;
    const auto num = [&](const char* k) { return j.contains(k) && j[k].is_number(); };
    return j.contains("name") && j["name"].is_string() && num("computed") && num("predicted") &&
           num("abs_error") && num("tolerance") && j.contains("pass") && j["pass"].is_boolean() &&
           j.contains("notes") && j["notes"].is_string();
}

} // namespace paircorr
