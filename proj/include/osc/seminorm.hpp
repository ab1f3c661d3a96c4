#pragma once

#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "osc/grid.hpp"
#include "osc/morphology.hpp"
#include "osc/report.hpp"

namespace osc {

// Radius sweep standing in for the continuum supremum over all window
// radii. Estimates built on it are lower bounds by construction.
struct SweepGrid {
    std::vector<double> deltas;

    static SweepGrid geometric(double dmin, double dmax, double q);
    static SweepGrid from_list(std::vector<double> deltas);
    // 2h up to the masked bounding-box diameter, ratio 2^(1/4)
    static SweepGrid default_for(const GridFunction& g);
    void validate() const;  // nonempty, positive, strictly increasing
};

struct SweepEntry {
    double delta;     // window radius
    double integral;  // I(delta) = integral of the delta-oscillation
    double ratio;     // I(delta) / delta^alpha
};

struct SweepReport {
    double alpha = 1.0;
    double c = 1.0;
    BallMode mode = BallMode::open;
    std::vector<SweepEntry> entries;
    double seminorm = 0.0;  // max ratio over the sweep; a lower-bound estimate
    double argmax_delta = 0.0;
    bool delta_min_flagged = false;  // smallest delta below the 2h recommendation

    nlohmann::json to_json() const;
    // header: delta,I,I_over_delta_alpha
    void write_csv(std::ostream& out) const;
};

// I(delta) for every sweep radius plus the seminorm estimate
// max_delta I(delta)/delta^alpha. alpha in (0,1]; the measure is c * Lebesgue.
SweepReport osc_integral_sweep(const GridFunction& g, BallMode mode, const SweepGrid& sweep,
                               double alpha, double c);
double gen_holder_seminorm(const GridFunction& g, BallMode mode, const SweepGrid& sweep,
                           double alpha, double c);

struct Thm1Report {
    double r = 0.0, alpha = 1.0;
    BallMode mode = BallMode::open;
    double lhs = 0.0;          // seminorm estimate of the r-oscillation of f
    double m_range = 0.0;      // M = sup f - inf f over the mask
    double hull_volume = 0.0;  // Lebesgue volume of the convex hull of the mask
    double rhs = 0.0;          // 2 M (c * hull volume) ((2d+1)/r)^alpha
    double slack = 0.0;        // rhs - lhs
    double rel_tol = 0.0;
    bool pass = false;
    double argmax_delta = 0.0;
    double pre_shift_min = 0.0, pre_shift_max = 0.0;

    nlohmann::json to_json() const;
};

// Verifies |osc_r f|_(alpha;gH) <= 2 M mu(hull) ((2d+1)/r)^alpha where the
// left side is the sweep estimate for the oscillation of f at radius r.
// The input is shifted to [0, M] internally; reported sup/inf are pre-shift.
Thm1Report thm1_check(const GridFunction& g, double r, double alpha, BallMode mode,
                      const SweepGrid& sweep, double c, double rel_tol,
                      std::optional<double> hull_volume_override = std::nullopt);

// Pointwise bound osc_delta(g1) <= h1 - h2 on the hull-extended mask, where
// g1 is the radius-r dilation in the requested mode and h1, h2 are the open
// dilations at r+delta and r-delta. The delta-oscillation uses open windows.
// Exact: all operands are selected input samples and rounding is monotone,
// so the comparison carries zero tolerance.
CheckReport sandwich_check(const GridFunction& g, double r, double delta, BallMode mode);

struct DensityInterval {
    double lo = 0.0, hi = 0.0;  // open interval (lo, hi)
    double mu1 = 0.0, mu2 = 0.0;
};

struct DensityReport {
    double r = 0.0, delta = 0.0;
    double density_bound = 0.0;  // C = 1 / (1 - 2 d delta / (r - delta))
    std::vector<DensityInterval> intervals;
    double measured = 0.0;  // max over intervals of mu1 - C * mu2
    double eps_stat = 0.0;
    bool pass = false;

    nlohmann::json to_json() const;
};

// 3 * c * h^d * (masked cells touching the mask boundary): the default
// discretization allowance for level-set counting checks.
double default_eps_stat(const GridFunction& g, double c);

// 50 uniform-width open intervals partitioning (lo, hi) plus 50 random-width
// ones drawn from the seeded generator.
std::vector<std::pair<double, double>> default_density_intervals(double lo, double hi,
                                                                 std::uint64_t seed);

// For each interval I: mu1(I) = c h^d #{h1 in I} must not exceed
// C * mu2(I) + eps_stat, with h1, h2 the open dilations at r+delta, r-delta.
// Requires delta < r/(2d+1) and a hull-extended input (the density bound is
// proved for convex closed domains).
DensityReport pushforward_density_check(const GridFunction& g, double r, double delta,
                                        const std::vector<std::pair<double, double>>& intervals,
                                        double c,
                                        std::optional<double> eps_stat_override = std::nullopt);

// G1(r+delta) - G1(r-delta) <= (2d+1)(delta/r) M mu(D) + eps_stat with
// G1(rho) the integral of the open rho-dilation; the erosion-side difference
// is checked symmetrically. Requires delta < r/(2d+1) and a hull-extended
// input; the input is shifted to [0, M] internally.
CheckReport continuity_modulus_check(const GridFunction& g, double r, double delta, double c,
                                     std::optional<double> eps_stat_override = std::nullopt);

// Compares open- and closed-window results at radius r: the fraction of
// masked cells where the two oscillations differ, and the relative gap of
// the two seminorm estimates. Passes when the gap is within rel_tol and,
// if a refined grid is supplied, the differing fraction does not grow.
CheckReport open_closed_agreement(const GridFunction& g, double r, const SweepGrid& sweep,
                                  double alpha, double c, double rel_tol,
                                  const GridFunction* refined = nullptr);

}  // namespace osc
