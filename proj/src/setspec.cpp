#include "osc/setspec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "osc/errors.hpp"

namespace osc {

double Box::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= std::max(hi[i] - lo[i], 0.0);
    return v;
}

bool Box::contains(std::span<const double> p) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
}

Box Box::hull_of(const Box& a, const Box& b) {
    Box out = a;
    for (std::size_t i = 0; i < out.lo.size(); ++i) {
        out.lo[i] = std::min(out.lo[i], b.lo[i]);
        out.hi[i] = std::max(out.hi[i], b.hi[i]);
    }
    return out;
}

namespace {

double dist2(std::span<const double> p, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double d = p[i] - c[i];
        s += d * d;
    }
    return s;
}

}  // namespace

int SetSpec::dim() const {
    if (shape == "ball" || shape == "annulus") return static_cast<int>(center.size());
    if (shape == "box") return static_cast<int>(lo.size());
    if (!parts.empty()) return parts.front().dim();
    return 0;
}

void SetSpec::validate() const {
    if (shape == "ball") {
        if (center.empty()) throw ConfigError("set spec: ball needs a center");
        if (!(radius > 0.0)) throw ConfigError("set spec: ball radius must be positive");
    } else if (shape == "annulus") {
        if (center.empty()) throw ConfigError("set spec: annulus needs a center");
        if (!(inner >= 0.0) || !(outer > inner))
            throw ConfigError("set spec: annulus needs 0 <= inner < outer");
    } else if (shape == "box") {
        if (lo.empty() || lo.size() != hi.size())
            throw ConfigError("set spec: box needs matching lo/hi");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i])) throw ConfigError("set spec: box needs lo < hi on every axis");
    } else if (shape == "union" || shape == "intersection") {
        if (parts.empty()) throw ConfigError("set spec: " + shape + " needs at least one part");
        const int d = parts.front().dim();
        for (const auto& p : parts) {
            p.validate();
            if (p.dim() != d) throw ConfigError("set spec: mixed dimensions in " + shape);
        }
    } else {
        throw ConfigError("set spec: unknown shape '" + shape + "'");
    }
    for (double v : center)
        if (!std::isfinite(v)) throw ConfigError("set spec: non-finite parameter");
    for (double v : lo)
        if (!std::isfinite(v)) throw ConfigError("set spec: non-finite parameter");
    for (double v : hi)
        if (!std::isfinite(v)) throw ConfigError("set spec: non-finite parameter");
    if (!std::isfinite(radius) || !std::isfinite(inner) || !std::isfinite(outer))
        throw ConfigError("set spec: non-finite parameter");
}

bool SetSpec::contains(std::span<const double> p) const {
    if (shape == "ball") return dist2(p, center) < radius * radius;
    if (shape == "annulus") {
        const double d2 = dist2(p, center);
        return d2 >= inner * inner && d2 < outer * outer;
    }
    if (shape == "box") {
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    }
    if (shape == "union") {
        for (const auto& q : parts)
            if (q.contains(p)) return true;
        return false;
    }
    // intersection
    for (const auto& q : parts)
        if (!q.contains(p)) return false;
    return true;
}

Box SetSpec::bounding_box() const {
    Box b;
    if (shape == "ball" || shape == "annulus") {
        const double r = (shape == "ball") ? radius : outer;
        for (double c : center) {
            b.lo.push_back(c - r);
            b.hi.push_back(c + r);
        }
        return b;
    }
    if (shape == "box") {
        b.lo = lo;
        b.hi = hi;
        return b;
    }
    b = parts.front().bounding_box();
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const Box pb = parts[i].bounding_box();
        for (int a = 0; a < b.dim(); ++a) {
            if (shape == "union") {
                b.lo[a] = std::min(b.lo[a], pb.lo[a]);
                b.hi[a] = std::max(b.hi[a], pb.hi[a]);
            } else {
                b.lo[a] = std::max(b.lo[a], pb.lo[a]);
                b.hi[a] = std::min(b.hi[a], pb.hi[a]);
            }
        }
    }
    return b;
}

SetSpec SetSpec::from_json(const nlohmann::json& j) {
    SetSpec s;
    try {
        s.shape = j.at("shape").get<std::string>();
        const auto& prm = j.at("params");
        if (s.shape == "ball") {
            s.center = prm.at("center").get<std::vector<double>>();
            s.radius = prm.at("radius").get<double>();
        } else if (s.shape == "annulus") {
            s.center = prm.at("center").get<std::vector<double>>();
            s.inner = prm.at("inner").get<double>();
            s.outer = prm.at("outer").get<double>();
        } else if (s.shape == "box") {
            s.lo = prm.at("lo").get<std::vector<double>>();
            s.hi = prm.at("hi").get<std::vector<double>>();
        } else if (s.shape == "union" || s.shape == "intersection") {
            for (const auto& p : prm.at("parts")) s.parts.push_back(from_json(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("set spec: malformed JSON: ") + e.what());
    }
    s.validate();
    return s;
}

nlohmann::json SetSpec::to_json() const {
    nlohmann::json prm;
    if (shape == "ball") {
        prm["center"] = center;
        prm["radius"] = radius;
    } else if (shape == "annulus") {
        prm["center"] = center;
        prm["inner"] = inner;
        prm["outer"] = outer;
    } else if (shape == "box") {
        prm["lo"] = lo;
        prm["hi"] = hi;
    } else {
        auto arr = nlohmann::json::array();
        for (const auto& p : parts) arr.push_back(p.to_json());
        prm["parts"] = arr;
    }
    return {{"shape", shape}, {"params", prm}};
}

SetSpec SetSpec::ball(std::vector<double> c, double r) {
    SetSpec s;
    s.shape = "ball";
    s.center = std::move(c);
    s.radius = r;
    s.validate();
    return s;
}

SetSpec SetSpec::annulus(std::vector<double> c, double in, double out) {
    SetSpec s;
    s.shape = "annulus";
    s.center = std::move(c);
    s.inner = in;
    s.outer = out;
    s.validate();
    return s;
}

SetSpec SetSpec::box(std::vector<double> lo, std::vector<double> hi) {
    SetSpec s;
    s.shape = "box";
    s.lo = std::move(lo);
    s.hi = std::move(hi);
    s.validate();
    return s;
}

SetSpec SetSpec::union_of(std::vector<SetSpec> parts) {
    SetSpec s;
    s.shape = "union";
    s.parts = std::move(parts);
    s.validate();
    return s;
}

SetSpec SetSpec::intersection_of(std::vector<SetSpec> parts) {
    SetSpec s;
    s.shape = "intersection";
    s.parts = std::move(parts);
    s.validate();
    return s;
}

}  // namespace osc
