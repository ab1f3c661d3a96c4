#pragma once

#include <stdexcept>
#include <string>

namespace osc {

// Invalid inputs: malformed files, bad shapes, out-of-range parameters.
// CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A check was invoked outside the hypothesis of the statement it verifies
// (e.g. delta >= r/(2d+1) where the density bound needs delta < r/(2d+1)).
struct HypothesisError : std::runtime_error {
    explicit HypothesisError(const std::string& what)
        : std::runtime_error("outside lemma hypothesis: " + what) {}
};

// A query point lies on (or numerically on) the target set, where the
// approach-map membership oracle is undefined. Samplers catch this and retry.
struct OnTargetSetError : std::runtime_error {
    explicit OnTargetSetError(const std::string& what)
        : std::runtime_error("on-target-set: " + what) {}
};

}  // namespace osc
