#pragma once

#include <filesystem>

#include "json.hpp"
#include "osc/grid.hpp"

namespace osc {

// Builds a scenario input grid from a generator spec. Shapes of spec:
//   {"generator":"constant", "dim", "shape", "spacing", "origin"?, "value"?}
//       full mask, every value = value (default 3)
//   {"generator":"lattice-indicator", "L", "r", "h"}
//       1-D grid on [0, L]; cells whose centers lie within h/2 of the lattice
//       4rZ carry value 1, the rest 0; full mask
//   {"generator":"disconnected-example", "N", "h"}
//       1-D grid spanning [-N-1, N+1]; mask covers [-N-1,-N+1], the single
//       cell centered at 0, and [N-1, N+1]; the value is the indicator of
//       the center cell. 1/h must be integral so component endpoints and
//       the singleton land exactly on cell centers.
//   {"generator":"random", "seed", "dim", "shape", "spacing", "origin"?,
//    "lo"?, "hi"?, "smooth"?}
//       full mask; plain mode draws each cell uniform in [lo, hi) from the
//       counter generator; smooth mode evaluates a seeded 8-mode cosine sum
//   {"generator":"file", "path"}
//       loads a saved grid header; relative paths resolve against base_dir
// Every generator rejects parameters that would produce an empty mask.
GridFile generate_input(const nlohmann::json& spec, const std::filesystem::path& base_dir = ".");

}  // namespace osc
