#pragma once

// Shared builders and independent oracles for the test suite. Oracles here are
// written straight from the definitions (direct scans, closed forms), not via
// the library's optimized paths, so they can arbitrate.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "osc/grid.hpp"
#include "osc/morphology.hpp"
#include "osc/rng.hpp"

namespace testutil {

inline osc::GridFunction make_grid_1d(double h, std::int64_t n, double origin = 0.0) {
    osc::GridFunction g;
    g.dim = 1;
    g.shape = {n};
    g.spacing = h;
    g.origin = {origin};
    g.values.assign(static_cast<std::size_t>(n), 0.0);
    g.mask.assign(static_cast<std::size_t>(n), 1);
    return g;
}

inline osc::GridFunction make_grid_2d(double h, std::int64_t ny, std::int64_t nx,
                                      double oy = 0.0, double ox = 0.0) {
    osc::GridFunction g;
    g.dim = 2;
    g.shape = {ny, nx};
    g.spacing = h;
    g.origin = {oy, ox};
    g.values.assign(static_cast<std::size_t>(ny * nx), 0.0);
    g.mask.assign(static_cast<std::size_t>(ny * nx), 1);
    return g;
}

inline osc::GridFunction make_grid_3d(double h, std::int64_t nz, std::int64_t ny, std::int64_t nx) {
    osc::GridFunction g;
    g.dim = 3;
    g.shape = {nz, ny, nx};
    g.spacing = h;
    g.origin = {0.0, 0.0, 0.0};
    g.values.assign(static_cast<std::size_t>(nz * ny * nx), 0.0);
    g.mask.assign(static_cast<std::size_t>(nz * ny * nx), 1);
    return g;
}

inline void fill_random(osc::GridFunction& g, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    osc::CounterRng rng(seed);
    for (std::size_t i = 0; i < g.size(); ++i)
        g.values[i] = g.mask[i] ? rng.uniform(i, lo, hi) : g.values[i];
}

inline void random_mask(osc::GridFunction& g, std::uint64_t seed, double keep_prob) {
    osc::CounterRng rng(seed);
    bool any = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.mask[i] = rng.uniform(i) < keep_prob ? 1 : 0;
        any = any || g.mask[i];
    }
    if (!any) g.mask[0] = 1;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g.mask[i]) g.values[i] = std::numeric_limits<double>::quiet_NaN();
}

// Direct-from-definition windowed extremum: loops every cell of the grid and
// tests the real-space tie rule per offset. Quadratic; keep instances small.
inline osc::GridFunction brute_extremum(const osc::GridFunction& g, double r, osc::BallMode mode,
                                        bool want_max) {
    osc::GridFunction out = g;
    const auto st = g.strides();
    const std::size_t n = g.size();
    std::vector<std::int64_t> idx(static_cast<std::size_t>(g.dim), 0);
    std::vector<std::vector<std::int64_t>> all_idx(n);
    for (std::size_t f = 0; f < n; ++f) {
        all_idx[f] = idx;
        for (int a = g.dim - 1; a >= 0; --a) {
            auto u = static_cast<std::size_t>(a);
            if (++idx[u] < g.shape[u]) break;
            idx[u] = 0;
        }
    }
    (void)st;
    for (std::size_t f = 0; f < n; ++f) {
        if (!g.mask[f]) {
            out.values[f] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double best = want_max ? -std::numeric_limits<double>::infinity()
                               : std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (!g.mask[j]) continue;
            std::int64_t s = 0;
            for (int a = 0; a < g.dim; ++a) {
                const auto u = static_cast<std::size_t>(a);
                const std::int64_t dk = all_idx[j][u] - all_idx[f][u];
                s += dk * dk;
            }
            if (j != f && !osc::offset_included(s, r, g.spacing, mode)) continue;
            best = want_max ? std::max(best, g.values[j]) : std::min(best, g.values[j]);
        }
        out.values[f] = best;
    }
    return out;
}

inline osc::GridFunction brute_oscillation(const osc::GridFunction& g, double r, osc::BallMode mode) {
    osc::GridFunction up = brute_extremum(g, r, mode, true);
    osc::GridFunction lo = brute_extremum(g, r, mode, false);
    for (std::size_t i = 0; i < up.size(); ++i)
        if (up.mask[i]) up.values[i] -= lo.values[i];
    return up;
}

inline bool grids_equal_on_mask(const osc::GridFunction& a, const osc::GridFunction& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.mask[i] != b.mask[i]) return false;
        if (a.mask[i] && a.values[i] != b.values[i]) return false;
    }
    return true;
}

}  // namespace testutil
