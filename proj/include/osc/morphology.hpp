#pragma once

#include <cstdint>
#include <vector>

#include "osc/grid.hpp"

namespace osc {

// Ball convention for r-windows. Offsets k (integers, |k| in cells) enter the
// window by comparing s = |k|^2 against tau = (r/h)^2:
//   open:   s < tau,     closed: s <= tau,
// with the tie band |s - tau| <= 1e-9 * max(1, tau) resolved deterministically
// as "s equals tau": excluded from open, included in closed. The zero offset
// is always included, so windows on masked cells are never empty.
enum class BallMode { open, closed };

inline const char* to_string(BallMode m) { return m == BallMode::open ? "open" : "closed"; }

constexpr std::size_t kDefaultOffsetBudget = std::size_t{1} << 23;

struct BallOffsets {
    double radius = 0.0;
    double spacing = 0.0;
    BallMode mode = BallMode::open;
    int dim = 0;
    std::vector<int> offsets;  // flat, stride = dim, lexicographic order

    std::size_t count() const { return offsets.size() / static_cast<std::size_t>(dim); }
};

// Throws ConfigError if r <= 0, h <= 0, or the offset count exceeds budget.
BallOffsets ball_offsets(double r, double h, int dim, BallMode mode,
                         std::size_t budget = kDefaultOffsetBudget);

// True iff integer squared radius s is inside the mode-r window (tie rule above).
bool offset_included(std::int64_t s, double r, double h, BallMode mode);

// Output is masked exactly where g is; each masked cell takes the extremum of
// g over masked in-grid cells at x + offset. Fast paths: dim 1 monotone-deque
// sliding window, dim 2 per-row ball decomposition; dim >= 3 runs the naive
// stencil. The *_naive variants always use the direct stencil scan and serve
// as the testing oracle; fast and naive agree exactly.
GridFunction dilate(const GridFunction& g, double r, BallMode mode);
GridFunction erode(const GridFunction& g, double r, BallMode mode);
GridFunction dilate_naive(const GridFunction& g, double r, BallMode mode);
GridFunction erode_naive(const GridFunction& g, double r, BallMode mode);

// dilate - erode computed in one fused pass; values are >= 0 on the mask.
GridFunction oscillation(const GridFunction& g, double r, BallMode mode);
GridFunction oscillation_naive(const GridFunction& g, double r, BallMode mode);

}  // namespace osc
