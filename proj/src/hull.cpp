#include "osc/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "osc/errors.hpp"

namespace osc {
namespace hull_detail {

std::vector<std::size_t> hull2d(const std::vector<std::array<double, 2>>& pts) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pts[a] < pts[b];
    });
    order.erase(std::unique(order.begin(), order.end(),
                            [&](std::size_t a, std::size_t b) { return pts[a] == pts[b]; }),
                order.end());
    const std::size_t m = order.size();
    if (m <= 2) return order;

    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) -
               (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0]);
    };
    std::vector<std::size_t> h(2 * m);
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) {  // lower chain
        while (k >= 2 && cross(h[k - 2], h[k - 1], order[i]) <= 0.0) --k;
        h[k++] = order[i];
    }
    for (std::size_t i = m - 1, t = k + 1; i-- > 0;) {  // upper chain
        while (k >= t && cross(h[k - 2], h[k - 1], order[i]) <= 0.0) --k;
        h[k++] = order[i];
    }
    h.resize(k - 1);  // last point equals the first
    if (h.size() < 3) {
        // collinear input: keep the two extremes
        return {order.front(), order.back()};
    }
    return h;
}

double polygon_area(const std::vector<std::array<double, 2>>& poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % n];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return std::abs(a) / 2.0;
}

namespace {

using P3 = std::array<double, 3>;

P3 sub(const P3& a, const P3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
P3 cross3(const P3& a, const P3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot3(const P3& a, const P3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm3(const P3& a) { return std::sqrt(dot3(a, a)); }

Facet3 make_facet(const std::vector<P3>& pts, std::size_t a, std::size_t b, std::size_t c,
                  const P3& interior) {
    Facet3 f;
    f.v = {a, b, c};
    f.normal = cross3(sub(pts[b], pts[a]), sub(pts[c], pts[a]));
    f.offset = dot3(f.normal, pts[a]);
    if (dot3(f.normal, interior) > f.offset) {  // orient outward
        std::swap(f.v[1], f.v[2]);
        f.normal = {-f.normal[0], -f.normal[1], -f.normal[2]};
        f.offset = -f.offset;
    }
    return f;
}

}  // namespace

std::vector<Facet3> hull3d(const std::vector<P3>& input) {
    // Canonical insert order (sorted, deduped) keeps the result independent of
    // the caller's enumeration order.
    std::vector<P3> pts = input;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 4) return {};

    double scale = 0.0;
    for (const auto& p : pts)
        for (double x : p) scale = std::max(scale, std::abs(x));
    scale = std::max(scale, 1.0);

    // Initial tetrahedron: spread-out affinely independent quadruple.
    std::size_t i0 = 0, i1 = n;
    double best = -1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double d = norm3(sub(pts[i], pts[i0]));
        if (d > best) best = d, i1 = i;
    }
    if (best <= 1e-12 * scale) return {};
    std::size_t i2 = n;
    best = -1.0;
    const P3 e01 = sub(pts[i1], pts[i0]);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == i0 || i == i1) continue;
        const double d = norm3(cross3(e01, sub(pts[i], pts[i0])));
        if (d > best) best = d, i2 = i;
    }
    if (i2 == n || best <= 1e-12 * scale * scale) return {};
    std::size_t i3 = n;
    best = -1.0;
    const P3 nrm = cross3(e01, sub(pts[i2], pts[i0]));
    for (std::size_t i = 0; i < n; ++i) {
        if (i == i0 || i == i1 || i == i2) continue;
        const double d = std::abs(dot3(nrm, sub(pts[i], pts[i0])));
        if (d > best) best = d, i3 = i;
    }
    if (i3 == n || best <= 1e-12 * scale * scale * scale) return {};

    P3 interior = {0, 0, 0};
    for (std::size_t i : {i0, i1, i2, i3})
        for (int a = 0; a < 3; ++a) interior[a] += pts[i][a] / 4.0;

    std::vector<Facet3> facets;
    facets.push_back(make_facet(pts, i0, i1, i2, interior));
    facets.push_back(make_facet(pts, i0, i1, i3, interior));
    facets.push_back(make_facet(pts, i0, i2, i3, interior));
    facets.push_back(make_facet(pts, i1, i2, i3, interior));

    for (std::size_t p = 0; p < n; ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3) continue;
        std::vector<std::size_t> visible;
        for (std::size_t f = 0; f < facets.size(); ++f) {
            const double tol = 1e-10 * std::max(norm3(facets[f].normal), 1.0) * scale;
            if (dot3(facets[f].normal, pts[p]) > facets[f].offset + tol) visible.push_back(f);
        }
        if (visible.empty()) continue;

        // Horizon: directed edges of visible facets whose reverse edge is not
        // itself part of the visible region.
        std::map<std::pair<std::size_t, std::size_t>, int> edges;
        for (std::size_t f : visible) {
            const auto& v = facets[f].v;
            for (int e = 0; e < 3; ++e) {
                const std::size_t a = v[static_cast<std::size_t>(e)];
                const std::size_t b = v[static_cast<std::size_t>((e + 1) % 3)];
                ++edges[{a, b}];
            }
        }
        std::vector<std::pair<std::size_t, std::size_t>> horizon;
        for (const auto& [e, cnt] : edges) {
            (void)cnt;
            if (!edges.count({e.second, e.first})) horizon.push_back(e);
        }
        std::sort(visible.rbegin(), visible.rend());
        for (std::size_t f : visible) facets.erase(facets.begin() + static_cast<std::ptrdiff_t>(f));
        for (const auto& [a, b] : horizon) facets.push_back(make_facet(pts, a, b, p, interior));
    }

    // Remap facet indices back to the caller's point order.
    std::vector<Facet3> out = facets;
    std::vector<std::size_t> back(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto it = std::find(input.begin(), input.end(), pts[i]);
        back[i] = static_cast<std::size_t>(it - input.begin());
    }
    for (auto& f : out)
        for (auto& v : f.v) v = back[v];
    return out;
}

}  // namespace hull_detail

namespace {

std::vector<std::vector<double>> masked_centers(const GridFunction& g) {
    std::vector<std::vector<double>> pts;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(g.dim), 0);
    const std::size_t n = g.size();
    for (std::size_t f = 0; f < n; ++f) {
        if (g.mask[f]) {
            std::vector<double> p(static_cast<std::size_t>(g.dim));
            for (int a = 0; a < g.dim; ++a)
                p[static_cast<std::size_t>(a)] = g.center(a, idx[static_cast<std::size_t>(a)]);
            pts.push_back(std::move(p));
        }
        for (int a = g.dim - 1; a >= 0; --a) {
            auto u = static_cast<std::size_t>(a);
            if (++idx[u] < g.shape[u]) break;
            idx[u] = 0;
        }
    }
    return pts;
}

// Closed-hull membership oracle with relative tolerance on half-space tests.
class HullMembership {
public:
    HullMembership(const GridFunction& g, HullInfo& info) {
        const auto pts = masked_centers(g);
        dim_ = g.dim;
        double lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
        for (int a = 0; a < dim_; ++a) {
            auto u = static_cast<std::size_t>(a);
            lo[u] = hi[u] = pts[0][u];
            for (const auto& p : pts) {
                lo[u] = std::min(lo[u], p[u]);
                hi[u] = std::max(hi[u], p[u]);
            }
        }
        double d2 = 0;
        for (int a = 0; a < dim_; ++a) d2 += (hi[a] - lo[a]) * (hi[a] - lo[a]);
        tol_ = 1e-9 * std::max(1.0, std::sqrt(d2));

        if (dim_ == 1) {
            a_ = lo[0];
            b_ = hi[0];
            info.volume = b_ - a_;
            info.degenerate = !(info.volume > 0.0);
            if (info.degenerate) info.volume = 0.0;
            info.vertices.push_back({a_});
            if (b_ > a_) info.vertices.push_back({b_});
        } else if (dim_ == 2) {
            poly_pts_.reserve(pts.size());
            for (const auto& p : pts) poly_pts_.push_back({p[0], p[1]});
            const auto h = hull_detail::hull2d(poly_pts_);
            for (auto i : h) poly_.push_back(poly_pts_[i]);
            for (auto i : h) info.vertices.push_back({poly_pts_[i][0], poly_pts_[i][1]});
            info.degenerate = poly_.size() < 3;
            info.volume = info.degenerate ? 0.0 : hull_detail::polygon_area(poly_);
            if (info.degenerate) {
                seg_a_ = poly_.front();
                seg_b_ = poly_.back();
            }
        } else {
            pts3_.reserve(pts.size());
            for (const auto& p : pts) pts3_.push_back({p[0], p[1], p[2]});
            facets_ = hull_detail::hull3d(pts3_);
            info.degenerate = facets_.empty();
            if (info.degenerate) {
                info.volume = 0.0;
                planar_fallback(info);
            } else {
                std::vector<std::size_t> vs;
                for (const auto& f : facets_) vs.insert(vs.end(), f.v.begin(), f.v.end());
                std::sort(vs.begin(), vs.end());
                vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
                // The triangulation can retain points that lie flat on a facet
                // plane (added before their enclosing corners). A point is a
                // vertex of the polytope iff its incident facet normals span
                // all three dimensions.
                for (auto i : vs) {
                    std::vector<std::array<double, 3>> ns;
                    for (const auto& f : facets_) {
                        if (f.v[0] != i && f.v[1] != i && f.v[2] != i) continue;
                        const double nn =
                            std::sqrt(f.normal[0] * f.normal[0] + f.normal[1] * f.normal[1] +
                                      f.normal[2] * f.normal[2]);
                        if (!(nn > 0.0)) continue;
                        const std::array<double, 3> u{f.normal[0] / nn, f.normal[1] / nn,
                                                      f.normal[2] / nn};
                        bool dup = false;
                        for (const auto& m : ns)
                            if (u[0] * m[0] + u[1] * m[1] + u[2] * m[2] > 1.0 - 1e-9) {
                                dup = true;
                                break;
                            }
                        if (!dup) ns.push_back(u);
                    }
                    if (normals_span_3d(ns))
                        info.vertices.push_back({pts3_[i][0], pts3_[i][1], pts3_[i][2]});
                }
                double vol6 = 0.0;
                const auto& q = pts3_[facets_[0].v[0]];
                for (const auto& f : facets_) {
                    const auto& a = pts3_[f.v[0]];
                    const auto& b = pts3_[f.v[1]];
                    const auto& c = pts3_[f.v[2]];
                    const double ax = a[0] - q[0], ay = a[1] - q[1], az = a[2] - q[2];
                    const double bx = b[0] - q[0], by = b[1] - q[1], bz = b[2] - q[2];
                    const double cx = c[0] - q[0], cy = c[1] - q[1], cz = c[2] - q[2];
                    vol6 += ax * (by * cz - bz * cy) - ay * (bx * cz - bz * cx) +
                            az * (bx * cy - by * cx);
                }
                info.volume = std::abs(vol6) / 6.0;
            }
        }
    }

    bool contains(std::span<const double> p) const {
        if (dim_ == 1) return p[0] >= a_ - tol_ && p[0] <= b_ + tol_;
        if (dim_ == 2) {
            if (poly_.size() < 3) return near_segment2(p);
            const std::size_t n = poly_.size();
            for (std::size_t i = 0; i < n; ++i) {
                const auto& a = poly_[i];
                const auto& b = poly_[(i + 1) % n];
                const double ex = b[0] - a[0], ey = b[1] - a[1];
                const double cr = ex * (p[1] - a[1]) - ey * (p[0] - a[0]);
                const double len = std::hypot(ex, ey);
                if (cr < -tol_ * std::max(len, 1.0)) return false;
            }
            return true;
        }
        if (facets_.empty()) return near_planar3(p);
        for (const auto& f : facets_) {
            const double nn = std::sqrt(f.normal[0] * f.normal[0] + f.normal[1] * f.normal[1] +
                                        f.normal[2] * f.normal[2]);
            const double d = f.normal[0] * p[0] + f.normal[1] * p[1] + f.normal[2] * p[2] - f.offset;
            if (d > tol_ * std::max(nn, 1.0)) return false;
        }
        return true;
    }

private:
    static bool normals_span_3d(const std::vector<std::array<double, 3>>& ns) {
        for (std::size_t a = 0; a < ns.size(); ++a) {
            for (std::size_t b = a + 1; b < ns.size(); ++b) {
                const double cx = ns[a][1] * ns[b][2] - ns[a][2] * ns[b][1];
                const double cy = ns[a][2] * ns[b][0] - ns[a][0] * ns[b][2];
                const double cz = ns[a][0] * ns[b][1] - ns[a][1] * ns[b][0];
                const double cn = std::sqrt(cx * cx + cy * cy + cz * cz);
                if (cn < 1e-7) continue;
                for (std::size_t c = 0; c < ns.size(); ++c) {
                    if (c == a || c == b) continue;
                    if (std::abs(cx * ns[c][0] + cy * ns[c][1] + cz * ns[c][2]) > 1e-7 * cn)
                        return true;
                }
            }
        }
        return false;
    }

    bool near_segment2(std::span<const double> p) const {
        // degenerate 2-D hull: distance to the extreme segment
        const double ex = seg_b_[0] - seg_a_[0], ey = seg_b_[1] - seg_a_[1];
        const double L2 = ex * ex + ey * ey;
        double t = 0.0;
        if (L2 > 0.0) t = ((p[0] - seg_a_[0]) * ex + (p[1] - seg_a_[1]) * ey) / L2;
        t = std::clamp(t, 0.0, 1.0);
        const double qx = seg_a_[0] + t * ex, qy = seg_a_[1] + t * ey;
        return std::hypot(p[0] - qx, p[1] - qy) <= tol_;
    }

    bool near_planar3(std::span<const double> p) const {
        // degenerate 3-D hull: nearest point among the input set within tol of
        // p along each axis-aligned span; conservative point-set fallback
        for (const auto& q : pts3_) {
            if (std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]) <= tol_) return true;
        }
        return false;
    }

    void planar_fallback(HullInfo& info) {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < pts3_.size(); ++i) keep.push_back(i);
        std::sort(keep.begin(), keep.end(),
                  [&](std::size_t x, std::size_t y) { return pts3_[x] < pts3_[y]; });
        keep.erase(std::unique(keep.begin(), keep.end(),
                               [&](std::size_t x, std::size_t y) { return pts3_[x] == pts3_[y]; }),
                   keep.end());
        info.vertices.clear();
        for (auto i : keep)
            info.vertices.push_back({pts3_[i][0], pts3_[i][1], pts3_[i][2]});
    }

    int dim_ = 0;
    double tol_ = 0.0;
    double a_ = 0.0, b_ = 0.0;  // dim 1
    std::vector<std::array<double, 2>> poly_pts_, poly_;
    std::array<double, 2> seg_a_{}, seg_b_{};
    std::vector<std::array<double, 3>> pts3_;
    std::vector<hull_detail::Facet3> facets_;
};

}  // namespace

HullInfo convex_hull_volume(const GridFunction& g, std::optional<double> volume_override) {
    g.validate();
    HullInfo info;
    if (g.dim > 3) {
        if (!volume_override)
            throw ConfigError("convex hull construction supports dim <= 3; "
                              "supply a volume override for higher dimensions");
        info.volume = *volume_override;
        info.dim_supported = false;
        return info;
    }
    HullMembership membership(g, info);
    if (volume_override) info.volume = *volume_override;
    return info;
}

GridFunction extend_to_hull(const GridFunction& g) {
    g.validate();
    if (g.dim > 3) throw ConfigError("extend_to_hull supports dim <= 3");
    HullInfo info;
    HullMembership membership(g, info);

    GridFunction out = g;
    const double fill = masked_min(g);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(g.dim), 0);
    std::vector<double> p(static_cast<std::size_t>(g.dim));
    const std::size_t n = g.size();
    for (std::size_t f = 0; f < n; ++f) {
        if (!g.mask[f]) {
            for (int a = 0; a < g.dim; ++a)
                p[static_cast<std::size_t>(a)] = g.center(a, idx[static_cast<std::size_t>(a)]);
            if (membership.contains(p)) {
                out.mask[f] = 1;
                out.values[f] = fill;
            }
        }
        for (int a = g.dim - 1; a >= 0; --a) {
            auto u = static_cast<std::size_t>(a);
            if (++idx[u] < g.shape[u]) break;
            idx[u] = 0;
        }
    }
    return out;
}

}  // namespace osc
