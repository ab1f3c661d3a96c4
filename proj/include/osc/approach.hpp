#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osc/grid.hpp"
#include "osc/report.hpp"
#include "osc/setspec.hpp"

namespace osc {

// Finite point set standing in for the closed target set H. Masks and
// analytic shapes are reduced to site lists before use; the provenance
// string records where the sites came from.
struct TargetSet {
    int dim = 0;
    std::vector<double> sites;  // flat, site i occupies [i*dim, (i+1)*dim)
    std::string provenance = "explicit";

    std::size_t count() const { return dim > 0 ? sites.size() / static_cast<std::size_t>(dim) : 0; }
    std::span<const double> site(std::size_t i) const {
        return {sites.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    // bbox diagonal clamped below by 1; the scale behind every tolerance here
    double tolerance_scale() const;
    Box bounding_box() const;
    void validate() const;  // nonempty, finite, no duplicate sites

    static TargetSet from_points(int dim, std::vector<double> flat);
    static TargetSet from_mask(const GridFunction& g);  // masked cell centers
    static TargetSet from_json(const nlohmann::json& j);  // {"sites": [[...], ...]}
    nlohmann::json to_json() const;
};

struct ProjectionResult {
    std::size_t site = 0;
    double distance = 0.0;
    bool tie = false;  // a second site within 1e-12 relative of the distance
};

// Exact nearest site by squared distance; equal distances resolve to the
// lowest index and set the tie flag.
ProjectionResult project(std::span<const double> x, const TargetSet& H);

// Moves x the distance delta along the segment toward its nearest site, or
// onto that site when it is closer than delta. Identity for delta = 0 and
// for points on the target set.
std::vector<double> approach(std::span<const double> x, const TargetSet& H, double delta);

// True iff x has a preimage in A under the delta-approach map: some site p
// admits y = x + delta*(x-p)/|x-p| whose strict (untied) nearest site is p,
// with d(y,H) > delta and y in A. Points on the target set (distance within
// 1e-12 of the site scale) raise OnTargetSetError so samplers can redraw;
// that set has measure zero.
bool tdelta_image_membership(std::span<const double> x, const TargetSet& H, double delta,
                             const SetSpec& A);

struct PointPair {
    std::vector<double> x, y;
};

// Verifies d(T_delta x, T_delta y) >= ((R-delta)/R) d(x,y) - 1e-9 with
// R the smaller of the two site distances; pairs with R < delta are skipped
// and counted. Reports the worst margin and ratio.
CheckReport contraction_check(const TargetSet& H, double delta,
                              const std::vector<PointPair>& pairs);

// For f(t) = d(T_t x, T_t y): forward differences obey
// (f(s)-f(0))/s >= -f(0)/r - kappa*s for every step s, and the integrated
// ratio f(s)/f(0) >= (R-s)/R - 1e-9. kappa defaults to 10*f(0)/r^2.
// Requires both points at distance >= r from the sites.
CheckReport derivative_check(const TargetSet& H, std::span<const double> x,
                             std::span<const double> y, double r,
                             const std::vector<double>& steps,
                             std::optional<double> kappa = std::nullopt);

// K = floor(r/(2 delta) - 1/2) = max{k : r - (2k+1) delta >= 0}, the two
// forms cross-validated internally with a 1e-12 relative boundary allowance
// (so r = 3 delta lands on K = 1). Requires 0 < delta <= r/3.
int k_max(double r, double delta);

// Label for the step-map decomposition of a set A: points closer than
// r - delta to the sites are "inside collar"; otherwise the 2 delta step map
// runs up to K+1 times and the class is the count of leading iterates that
// stay in A (class k means iterates 1..k in A, iterate k+1 outside); points
// whose K+1 iterates all stay in A form the remainder ("star").
struct AkClass {
    enum class Label { inside_collar, k_class, star };
    Label label = Label::inside_collar;
    int k = -1;  // valid iff label == k_class
    bool tie_seen = false;
    std::vector<std::vector<double>> trail;  // x and every computed iterate

    std::string label_string() const;
};

AkClass ak_classify(std::span<const double> x, const SetSpec& A, const TargetSet& H, double r,
                    double delta);

// Membership in (A intersect collar(r-delta)) union (2 delta)-step image
// of A. Propagates OnTargetSetError from the image oracle.
bool tee_membership(std::span<const double> x, const SetSpec& A, const TargetSet& H, double r,
                    double delta);

}  // namespace osc
