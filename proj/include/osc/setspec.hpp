#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace osc {

struct Box {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double volume() const;
    bool contains(std::span<const double> p) const;
    // smallest box covering both operands (componentwise)
    static Box hull_of(const Box& a, const Box& b);
};

// Decidable region of R^d used as the set A in the measure checks. Boundary
// conventions: balls are open (|p-c| < radius), annuli are half-open
// (inner <= |p-c| < outer), boxes are closed. All boundaries have measure
// zero, so Monte Carlo results do not depend on the convention; the annulus
// convention is the one the step-map classification examples rely on.
struct SetSpec {
    std::string shape;  // ball | annulus | box | union | intersection
    std::vector<double> center;          // ball, annulus
    double radius = 0.0;                 // ball
    double inner = 0.0, outer = 0.0;     // annulus
    std::vector<double> lo, hi;          // box
    std::vector<SetSpec> parts;          // union, intersection

    int dim() const;
    void validate() const;  // throws ConfigError
    bool contains(std::span<const double> p) const;
    // finite box covering the set (for intersections: the tightest
    // componentwise intersection of the members' boxes)
    Box bounding_box() const;

    static SetSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    static SetSpec ball(std::vector<double> c, double r);
    static SetSpec annulus(std::vector<double> c, double inner, double outer);
    static SetSpec box(std::vector<double> lo, std::vector<double> hi);
    static SetSpec union_of(std::vector<SetSpec> parts);
    static SetSpec intersection_of(std::vector<SetSpec> parts);
};

}  // namespace osc
