#include "osc/approach.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "osc/errors.hpp"

namespace osc {

namespace {

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

double TargetSet::tolerance_scale() const {
    const auto b = bounding_box();
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double e = b.hi[static_cast<std::size_t>(a)] - b.lo[static_cast<std::size_t>(a)];
        s += e * e;
    }
    return std::max(1.0, std::sqrt(s));
}

Box TargetSet::bounding_box() const {
    Box b;
    b.lo.assign(static_cast<std::size_t>(dim), std::numeric_limits<double>::infinity());
    b.hi.assign(static_cast<std::size_t>(dim), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < count(); ++i) {
        const auto p = site(i);
        for (int a = 0; a < dim; ++a) {
            b.lo[static_cast<std::size_t>(a)] = std::min(b.lo[static_cast<std::size_t>(a)], p[a]);
            b.hi[static_cast<std::size_t>(a)] = std::max(b.hi[static_cast<std::size_t>(a)], p[a]);
        }
    }
    return b;
}

void TargetSet::validate() const {
    if (dim < 1) throw ConfigError("target set: dimension must be at least 1");
    if (sites.empty() || sites.size() % static_cast<std::size_t>(dim) != 0)
        throw ConfigError("target set: site list length must be a positive multiple of dim");
    for (double v : sites)
        if (!std::isfinite(v)) throw ConfigError("target set: non-finite site coordinate");
    // pairwise duplicate scan; quadratic cost is capped, large site lists
    // (mask-derived, distinct by construction) get the exact-match scan only
    const std::size_t n = count();
    const double tol = 1e-12 * tolerance_scale();
    if (n <= 4096) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (dist(site(i), site(j)) <= tol)
                    throw ConfigError("target set: duplicate sites");
    } else {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::lexicographical_compare(site(a).begin(), site(a).end(), site(b).begin(),
                                                site(b).end());
        });
        for (std::size_t i = 1; i < n; ++i)
            if (dist(site(order[i - 1]), site(order[i])) <= tol)
                throw ConfigError("target set: duplicate sites");
    }
}

TargetSet TargetSet::from_points(int dim, std::vector<double> flat) {
    TargetSet t;
    t.dim = dim;
    t.sites = std::move(flat);
    t.validate();
    return t;
}

TargetSet TargetSet::from_mask(const GridFunction& g) {
    g.validate();
    TargetSet t;
    t.dim = g.dim;
    t.provenance = "mask";
    std::vector<std::int64_t> idx(static_cast<std::size_t>(g.dim), 0);
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        if (g.mask[flat]) {
            for (int a = 0; a < g.dim; ++a)
                t.sites.push_back(g.center(a, idx[static_cast<std::size_t>(a)]));
        }
        for (int a = g.dim - 1; a >= 0; --a) {
            auto& v = idx[static_cast<std::size_t>(a)];
            if (++v < g.shape[static_cast<std::size_t>(a)]) break;
            v = 0;
        }
    }
    t.validate();
    return t;
}

TargetSet TargetSet::from_json(const nlohmann::json& j) {
    TargetSet t;
    try {
        const auto& arr = j.at("sites");
        if (!arr.is_array() || arr.empty())
            throw ConfigError("target set: \"sites\" must be a nonempty array");
        t.dim = static_cast<int>(arr.front().size());
        for (const auto& p : arr) {
            if (static_cast<int>(p.size()) != t.dim)
                throw ConfigError("target set: mixed site dimensions");
            for (const auto& v : p) t.sites.push_back(v.get<double>());
        }
        if (j.contains("provenance")) t.provenance = j["provenance"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("target set: malformed JSON: ") + e.what());
    }
    t.validate();
    return t;
}

nlohmann::json TargetSet::to_json() const {
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < count(); ++i) {
        auto p = nlohmann::json::array();
        for (double v : site(i)) p.push_back(v);
        arr.push_back(p);
    }
    return {{"sites", arr}, {"provenance", provenance}};
}

ProjectionResult project(std::span<const double> x, const TargetSet& H) {
    double best2 = std::numeric_limits<double>::infinity();
    double second2 = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t i = 0; i < H.count(); ++i) {
        const auto p = H.site(i);
        double s = 0.0;
        for (int a = 0; a < H.dim; ++a) {
            const double d = x[static_cast<std::size_t>(a)] - p[a];
            s += d * d;
        }
        if (s < best2) {
            second2 = best2;
            best2 = s;
            best = i;
        } else if (s < second2) {
            second2 = s;
        }
    }
    ProjectionResult res;
    res.site = best;
    res.distance = std::sqrt(best2);
    if (std::isfinite(second2)) {
        const double d2 = std::sqrt(second2);
        res.tie = d2 - res.distance <= 1e-12 * std::max(1.0, res.distance);
    }
    return res;
}

namespace {

// step toward the already computed nearest site
std::vector<double> step_toward(std::span<const double> x, const TargetSet& H,
                                const ProjectionResult& proj, double delta) {
    const auto p = H.site(proj.site);
    std::vector<double> out(x.begin(), x.end());
    if (proj.distance <= delta) {
        out.assign(p.begin(), p.end());
        return out;
    }
    const double f = delta / proj.distance;
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += f * (p[a] - x[a]);
    return out;
}

}  // namespace

std::vector<double> approach(std::span<const double> x, const TargetSet& H, double delta) {
    if (!(delta >= 0.0)) throw ConfigError("approach: step must be nonnegative");
    return step_toward(x, H, project(x, H), delta);
}

bool tdelta_image_membership(std::span<const double> x, const TargetSet& H, double delta,
                             const SetSpec& A) {
    if (!(delta >= 0.0)) throw ConfigError("image membership: step must be nonnegative");
    const double tol = 1e-12 * H.tolerance_scale();
    if (project(x, H).distance <= tol)
        throw OnTargetSetError("point coincides with the target set");

    const auto d = static_cast<std::size_t>(H.dim);
    std::vector<double> y(d);
    for (std::size_t s = 0; s < H.count(); ++s) {
        const auto p = H.site(s);
        double n2 = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            const double dv = x[a] - p[a];
            n2 += dv * dv;
        }
        const double nrm = std::sqrt(n2);
        if (nrm <= tol) continue;
        for (std::size_t a = 0; a < d; ++a) y[a] = x[a] + delta * (x[a] - p[a]) / nrm;
        const auto back = project(y, H);
        if (back.site != s || back.tie) continue;
        if (!(back.distance > delta)) continue;
        if (A.contains(y)) return true;
    }
    return false;
}

CheckReport contraction_check(const TargetSet& H, double delta,
                              const std::vector<PointPair>& pairs) {
    if (!(delta >= 0.0)) throw ConfigError("contraction check: step must be nonnegative");
    std::size_t skipped = 0, violations = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (const auto& pr : pairs) {
        const auto px = project(pr.x, H);
        const auto py = project(pr.y, H);
        const double big_r = std::min(px.distance, py.distance);
        if (big_r < delta) {
            ++skipped;
            continue;
        }
        const double before = dist(pr.x, pr.y);
        const auto tx = step_toward(pr.x, H, px, delta);
        const auto ty = step_toward(pr.y, H, py, delta);
        const double after = dist(tx, ty);
        const double factor = big_r > 0.0 ? (big_r - delta) / big_r : 1.0;
        const double margin = after - factor * before;
        worst_margin = std::min(worst_margin, margin);
        if (factor * before > 0.0) worst_ratio = std::min(worst_ratio, after / (factor * before));
        if (margin < -1e-9) ++violations;
    }
    CheckReport rep;
    rep.check = "contraction";
    rep.inputs = {{"delta", delta}, {"pairs", pairs.size()}};
    rep.measured = worst_margin;
    rep.bound = -1e-9;
    rep.slack = worst_margin - rep.bound;
    rep.sigma = 0.0;
    rep.pass = violations == 0;
    rep.detail = {{"skipped", skipped},
                  {"violations", violations},
                  {"worst_ratio", json_number(worst_ratio)}};
    return rep;
}

CheckReport derivative_check(const TargetSet& H, std::span<const double> x,
                             std::span<const double> y, double r,
                             const std::vector<double>& steps, std::optional<double> kappa) {
    if (!(r > 0.0)) throw ConfigError("derivative check: r must be positive");
    const auto px = project(x, H);
    const auto py = project(y, H);
    if (px.distance < r || py.distance < r)
        throw HypothesisError("derivative check needs d(x,H) >= r and d(y,H) >= r");
    const double f0 = dist(x, y);
    if (!(f0 > 0.0)) throw ConfigError("derivative check: the two points must differ");
    const double big_r = std::min(px.distance, py.distance);
    const double kap = kappa ? *kappa : 10.0 * f0 / (r * r);
    const double slope_bound = -f0 / r;

    CheckReport rep;
    rep.check = "derivative";
    rep.inputs = {{"r", r}, {"kappa", kap}, {"steps", steps}};
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_int_margin = std::numeric_limits<double>::infinity();
    auto slopes = nlohmann::json::array();
    double fitted_slope = 0.0, fitted_step = std::numeric_limits<double>::infinity();
    for (double s : steps) {
        if (!(s > 0.0) || !(s < big_r))
            throw ConfigError("derivative check: steps must lie in (0, R)");
        const auto tx = approach(x, H, s);
        const auto ty = approach(y, H, s);
        const double fs = dist(tx, ty);
        const double slope = (fs - f0) / s;
        worst_margin = std::min(worst_margin, slope - (slope_bound - kap * s));
        worst_int_margin =
            std::min(worst_int_margin, fs / f0 - (big_r - s) / big_r);
        if (s < fitted_step) {
            fitted_step = s;
            fitted_slope = slope;
        }
        slopes.push_back({{"step", s}, {"slope", json_number(slope)}, {"f", json_number(fs)}});
    }
    rep.measured = worst_margin;
    rep.bound = 0.0;
    rep.slack = worst_margin;
    rep.sigma = 0.0;
    rep.pass = worst_margin >= 0.0 && worst_int_margin >= -1e-9;
    rep.detail = {{"f0", json_number(f0)},
                  {"R", json_number(big_r)},
                  {"slope_bound", json_number(slope_bound)},
                  {"fitted_slope", json_number(fitted_slope)},
                  {"integrated_worst_margin", json_number(worst_int_margin)},
                  {"slopes", slopes}};
    return rep;
}

int k_max(double r, double delta) {
    if (!(r > 0.0) || !(delta > 0.0) || delta > r / 3.0 * (1.0 + 1e-12))
        throw HypothesisError("k_max needs 0 < delta <= r/3");
    const double tol = 1e-12 * std::max(1.0, r);
    const auto fits = [&](std::int64_t k) {
        return r - static_cast<double>(2 * k + 1) * delta >= -tol;
    };
    std::int64_t k = static_cast<std::int64_t>(std::floor(r / (2.0 * delta) - 0.5));
    if (k < 0) k = 0;
    while (fits(k + 1)) ++k;
    while (k > 0 && !fits(k)) --k;
    if (!fits(k)) throw std::logic_error("k_max: no admissible k");
    // floor form must agree up to the boundary allowance
    const double ratio = r / (2.0 * delta) - 0.5;
    const double rel = 1e-9 * std::max(1.0, std::abs(ratio));
    if (static_cast<double>(k) > ratio + rel || static_cast<double>(k) + 1.0 <= ratio - rel)
        throw std::logic_error("k_max: characterizations disagree");
    return static_cast<int>(k);
}

std::string AkClass::label_string() const {
    switch (label) {
        case Label::inside_collar: return "inside-collar";
        case Label::star: return "star";
        case Label::k_class: break;
    }
    return "class-" + std::to_string(k);
}

AkClass ak_classify(std::span<const double> x, const SetSpec& A, const TargetSet& H, double r,
                    double delta) {
    const int d = H.dim;
    if (!(delta > 0.0) || !(delta < r / static_cast<double>(2 * d + 1)))
        throw HypothesisError("classification needs delta < r/(2d+1)");
    if (!A.contains(x)) throw ConfigError("classification point must lie in A");

    AkClass res;
    res.trail.emplace_back(x.begin(), x.end());
    const auto p0 = project(x, H);
    res.tie_seen = p0.tie;
    if (p0.distance < r - delta) {
        res.label = AkClass::Label::inside_collar;
        return res;
    }
    const int big_k = k_max(r, delta);
    std::vector<double> cur(x.begin(), x.end());
    for (int j = 1; j <= big_k + 1; ++j) {
        const auto proj = project(cur, H);
        res.tie_seen = res.tie_seen || proj.tie;
        cur = step_toward(cur, H, proj, 2.0 * delta);
        res.trail.push_back(cur);
        if (!A.contains(cur)) {
            res.label = AkClass::Label::k_class;
            res.k = j - 1;
            return res;
        }
    }
    res.label = AkClass::Label::star;
    return res;
}

bool tee_membership(std::span<const double> x, const SetSpec& A, const TargetSet& H, double r,
                    double delta) {
    const int d = H.dim;
    if (!(delta > 0.0) || !(delta < r / static_cast<double>(2 * d + 1)))
        throw HypothesisError("step-image membership needs delta < r/(2d+1)");
    if (A.contains(x) && project(x, H).distance < r - delta) return true;
    return tdelta_image_membership(x, H, 2.0 * delta, A);
}

}  // namespace osc
