#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace osc {

// Declarative verification run: an input grid (or target/set geometry),
// shared parameters, and an ordered check list. Check vocabulary: sweep,
// thm1, sandwich, density, continuity, open-closed, thm2, contraction,
// derivative, lemma3, coarea. The "expect" map declares checks whose
// hypotheses are intentionally violated; those must raise a HypothesisError
// to count as satisfied.
struct Scenario {
    std::string name;
    std::uint64_t seed = 1;
    std::string output_dir;                     // empty: out/<name>
    nlohmann::json input;                       // generator spec or header path
    nlohmann::json target;                      // {"sites":[...]} or "input-mask"
    nlohmann::json set_region;                  // region JSON ("set" in the file)
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json tolerances = nlohmann::json::object();
    std::vector<std::string> checks;
    std::map<std::string, std::string> expect;  // check -> "hypothesis-error"

    static Scenario from_json(const nlohmann::json& j);
    static Scenario load(const std::filesystem::path& path);
    void validate() const;  // throws ConfigError
};

struct CheckOutcome {
    std::string check;
    std::string verdict;  // pass | fail | expected-error
    std::string file;     // report file name under the output directory
    std::string message;  // hypothesis text for expected-error entries
};

struct ScenarioResult {
    std::filesystem::path output_dir;
    std::vector<CheckOutcome> outcomes;
    bool all_pass = false;
    int exit_code = 0;  // 0 all satisfied, 1 some check failed
    nlohmann::json summary;
};

// Runs the checks in declared order. Writes one <check>.json per check, CSV
// companions for sweep and coarea, summary.json (verdict = conjunction over
// checks and declared expectations), and run_meta.json, the only output that
// carries timestamps; everything else is byte-stable for a fixed seed
// regardless of thread count. base_dir anchors relative paths in the input
// spec. A HypothesisError from a check declared in "expect" is recorded as
// "expected-error" and satisfies the scenario; an undeclared one propagates
// after summary.json is written (the CLI maps it to exit code 2).
ScenarioResult run_scenario(const Scenario& sc, const std::filesystem::path& base_dir,
                            const std::filesystem::path& output_override, int threads);

}  // namespace osc
