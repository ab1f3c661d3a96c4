#include "osc/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "osc/errors.hpp"

namespace osc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct WindowRule {
    double tau;
    double band;
    BallMode mode;

    bool included(std::int64_t s) const {
        const double sd = static_cast<double>(s);
        if (std::abs(sd - tau) <= band) return mode == BallMode::closed;
        return sd < tau;
    }
};

WindowRule make_rule(double r, double h, BallMode mode) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("ball radius must be positive");
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("grid spacing must be positive");
    const double rho = r / h;
    const double tau = rho * rho;
    return WindowRule{tau, 1e-9 * std::max(1.0, tau), mode};
}

// Largest axis offset the rule admits (contiguous because s is monotone in |k|).
std::int64_t axis_extent(const WindowRule& rule) {
    std::int64_t m = static_cast<std::int64_t>(std::floor(std::sqrt(rule.tau) * (1.0 + 2e-9))) + 1;
    while (m > 0 && !rule.included(m * m)) --m;
    while (rule.included((m + 1) * (m + 1))) ++m;
    return m;
}

// Sliding masked extrema over 1-D windows [i-m, i+m] via monotone deques.
// Window slots with no masked cell get +-inf identities.
void slide_minmax(const double* vals, const std::uint8_t* mask, std::int64_t n, std::int64_t m,
                  double* outmax, double* outmin) {
    std::vector<std::int64_t> qmax, qmin;
    qmax.reserve(static_cast<std::size_t>(n));
    qmin.reserve(static_cast<std::size_t>(n));
    std::size_t hmax = 0, hmin = 0;  // deque heads
    std::int64_t pushed = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        for (; pushed <= i + m && pushed < n; ++pushed) {
            if (!mask[pushed]) continue;
            const double v = vals[pushed];
            while (qmax.size() > hmax && vals[qmax.back()] <= v) qmax.pop_back();
            qmax.push_back(pushed);
            while (qmin.size() > hmin && vals[qmin.back()] >= v) qmin.pop_back();
            qmin.push_back(pushed);
        }
        while (qmax.size() > hmax && qmax[hmax] < i - m) ++hmax;
        while (qmin.size() > hmin && qmin[hmin] < i - m) ++hmin;
        outmax[i] = qmax.size() > hmax ? vals[qmax[hmax]] : -kInf;
        outmin[i] = qmin.size() > hmin ? vals[qmin[hmin]] : kInf;
    }
}

struct Extrema {
    GridFunction upper, lower;
};

Extrema extrema_1d(const GridFunction& g, const WindowRule& rule) {
    const std::int64_t n = g.shape[0];
    const std::int64_t m = axis_extent(rule);
    std::vector<double> mx(static_cast<std::size_t>(n)), mn(static_cast<std::size_t>(n));
    slide_minmax(g.values.data(), g.mask.data(), n, m, mx.data(), mn.data());
    Extrema out{g, g};
    for (std::int64_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        out.upper.values[u] = g.mask[u] ? mx[u] : kNaN;
        out.lower.values[u] = g.mask[u] ? mn[u] : kNaN;
    }
    return out;
}

Extrema extrema_2d(const GridFunction& g, const WindowRule& rule) {
    const std::int64_t ny = g.shape[0], nx = g.shape[1];
    const std::int64_t my = axis_extent(rule);
    std::vector<std::int64_t> width(static_cast<std::size_t>(my) + 1, 0);
    for (std::int64_t dy = 0; dy <= my; ++dy) {
        std::int64_t w = 0;
        while (rule.included(dy * dy + (w + 1) * (w + 1))) ++w;
        width[static_cast<std::size_t>(dy)] = w;
    }

    Extrema out{g, g};
    std::vector<double> rowmax(static_cast<std::size_t>(nx)), rowmin(static_cast<std::size_t>(nx));
    std::vector<double> accmax(static_cast<std::size_t>(nx)), accmin(static_cast<std::size_t>(nx));
    for (std::int64_t y0 = 0; y0 < ny; ++y0) {
        std::fill(accmax.begin(), accmax.end(), -kInf);
        std::fill(accmin.begin(), accmin.end(), kInf);
        for (std::int64_t dy = -my; dy <= my; ++dy) {
            const std::int64_t y = y0 + dy;
            if (y < 0 || y >= ny) continue;
            const std::int64_t w = width[static_cast<std::size_t>(std::llabs(dy))];
            const std::size_t base = static_cast<std::size_t>(y * nx);
            slide_minmax(g.values.data() + base, g.mask.data() + base, nx, w, rowmax.data(),
                         rowmin.data());
            for (std::int64_t x = 0; x < nx; ++x) {
                const auto u = static_cast<std::size_t>(x);
                accmax[u] = std::max(accmax[u], rowmax[u]);
                accmin[u] = std::min(accmin[u], rowmin[u]);
            }
        }
        for (std::int64_t x = 0; x < nx; ++x) {
            const std::size_t f = static_cast<std::size_t>(y0 * nx + x);
            out.upper.values[f] = g.mask[f] ? accmax[static_cast<std::size_t>(x)] : kNaN;
            out.lower.values[f] = g.mask[f] ? accmin[static_cast<std::size_t>(x)] : kNaN;
        }
    }
    return out;
}

Extrema extrema_naive(const GridFunction& g, const BallOffsets& offs) {
    const int d = g.dim;
    const auto st = g.strides();
    Extrema out{g, g};
    std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
    const std::size_t n = g.size();
    const std::size_t cnt = offs.count();
    for (std::size_t f = 0; f < n; ++f) {
        if (!g.mask[f]) {
            out.upper.values[f] = kNaN;
            out.lower.values[f] = kNaN;
        } else {
            double mx = -kInf, mn = kInf;
            for (std::size_t o = 0; o < cnt; ++o) {
                std::int64_t nf = static_cast<std::int64_t>(f);
                bool ok = true;
                for (int a = 0; a < d; ++a) {
                    const auto u = static_cast<std::size_t>(a);
                    const int k = offs.offsets[o * static_cast<std::size_t>(d) + u];
                    const std::int64_t j = idx[u] + k;
                    if (j < 0 || j >= g.shape[u]) {
                        ok = false;
                        break;
                    }
                    nf += static_cast<std::int64_t>(k) * st[u];
                }
                if (!ok || !g.mask[static_cast<std::size_t>(nf)]) continue;
                const double v = g.values[static_cast<std::size_t>(nf)];
                mx = std::max(mx, v);
                mn = std::min(mn, v);
            }
            out.upper.values[f] = mx;
            out.lower.values[f] = mn;
        }
        for (int a = d - 1; a >= 0; --a) {
            auto u = static_cast<std::size_t>(a);
            if (++idx[u] < g.shape[u]) break;
            idx[u] = 0;
        }
    }
    return out;
}

Extrema extrema(const GridFunction& g, double r, BallMode mode, bool allow_fast) {
    g.validate();
    const WindowRule rule = make_rule(r, g.spacing, mode);
    if (allow_fast && g.dim == 1) return extrema_1d(g, rule);
    if (allow_fast && g.dim == 2) return extrema_2d(g, rule);
    return extrema_naive(g, ball_offsets(r, g.spacing, g.dim, mode));
}

}  // namespace

bool offset_included(std::int64_t s, double r, double h, BallMode mode) {
    return make_rule(r, h, mode).included(s);
}

BallOffsets ball_offsets(double r, double h, int dim, BallMode mode, std::size_t budget) {
    if (dim < 1) throw ConfigError("ball_offsets: dim must be >= 1");
    const WindowRule rule = make_rule(r, h, mode);
    const std::int64_t m = axis_extent(rule);
    const double grid_bound = std::pow(2.0 * static_cast<double>(m) + 1.0, dim);
    if (grid_bound > 64.0 * static_cast<double>(budget))
        throw ConfigError("ball_offsets: offset count exceeds budget");

    BallOffsets out;
    out.radius = r;
    out.spacing = h;
    out.mode = mode;
    out.dim = dim;

    std::vector<int> k(static_cast<std::size_t>(dim), 0);
    for (auto& v : k) v = static_cast<int>(-m);
    std::size_t count = 0;
    while (true) {
        std::int64_t s = 0;
        for (int a = 0; a < dim; ++a) {
            const std::int64_t kk = k[static_cast<std::size_t>(a)];
            s += kk * kk;
        }
        const bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
        if (zero || rule.included(s)) {
            if (++count > budget) throw ConfigError("ball_offsets: offset count exceeds budget");
            out.offsets.insert(out.offsets.end(), k.begin(), k.end());
        }
        int a = dim - 1;
        for (; a >= 0; --a) {
            auto u = static_cast<std::size_t>(a);
            if (++k[u] <= static_cast<int>(m)) break;
            k[u] = static_cast<int>(-m);
        }
        if (a < 0) break;
    }
    return out;
}

GridFunction dilate(const GridFunction& g, double r, BallMode mode) {
    return extrema(g, r, mode, true).upper;
}

GridFunction erode(const GridFunction& g, double r, BallMode mode) {
    return extrema(g, r, mode, true).lower;
}

GridFunction dilate_naive(const GridFunction& g, double r, BallMode mode) {
    return extrema(g, r, mode, false).upper;
}

GridFunction erode_naive(const GridFunction& g, double r, BallMode mode) {
    return extrema(g, r, mode, false).lower;
}

GridFunction oscillation(const GridFunction& g, double r, BallMode mode) {
    Extrema e = extrema(g, r, mode, true);
    GridFunction out = std::move(e.upper);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = out.mask[i] ? out.values[i] - e.lower.values[i] : kNaN;
    return out;
}

GridFunction oscillation_naive(const GridFunction& g, double r, BallMode mode) {
    Extrema e = extrema(g, r, mode, false);
    GridFunction out = std::move(e.upper);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = out.mask[i] ? out.values[i] - e.lower.values[i] : kNaN;
    return out;
}

}  // namespace osc
