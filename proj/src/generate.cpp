#include "osc/generate.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "osc/errors.hpp"
#include "osc/rng.hpp"

namespace osc {

namespace {

double require_number(const nlohmann::json& j, const char* key, const char* who) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string(who) + ": missing numeric field \"" + key + "\"");
    return j[key].get<double>();
}

std::int64_t require_count(const nlohmann::json& j, const char* key, const char* who) {
    const double v = require_number(j, key, who);
    const auto n = static_cast<std::int64_t>(std::llround(v));
    if (static_cast<double>(n) != v || n < 1)
        throw ConfigError(std::string(who) + ": \"" + key + "\" must be a positive integer");
    return n;
}

// Rounds span/h and insists the quotient is integral: grid geometry in the
// generators is exact by construction, never "close enough".
std::int64_t exact_cells(double span, double h, const char* who) {
    const double q = span / h;
    const auto n = static_cast<std::int64_t>(std::llround(q));
    if (n < 0 || std::abs(q - static_cast<double>(n)) > 1e-9 * std::max(1.0, std::abs(q)))
        throw ConfigError(std::string(who) + ": spacing must divide the span exactly");
    return n;
}

GridFunction shell(const nlohmann::json& spec, const char* who) {
    GridFunction g;
    g.dim = static_cast<int>(require_count(spec, "dim", who));
    if (g.dim < 1 || g.dim > 3) throw ConfigError(std::string(who) + ": dim must be 1..3");
    if (!spec.contains("shape") || !spec["shape"].is_array() ||
        spec["shape"].size() != static_cast<std::size_t>(g.dim))
        throw ConfigError(std::string(who) + ": \"shape\" must be an array of dim entries");
    std::size_t total = 1;
    for (const auto& e : spec["shape"]) {
        if (!e.is_number_integer() || e.get<std::int64_t>() < 1)
            throw ConfigError(std::string(who) + ": shape entries must be positive integers");
        g.shape.push_back(e.get<std::int64_t>());
        total *= static_cast<std::size_t>(g.shape.back());
    }
    g.spacing = require_number(spec, "spacing", who);
    if (!(g.spacing > 0.0)) throw ConfigError(std::string(who) + ": spacing must be positive");
    if (spec.contains("origin")) {
        if (!spec["origin"].is_array() || spec["origin"].size() != static_cast<std::size_t>(g.dim))
            throw ConfigError(std::string(who) + ": \"origin\" must have dim entries");
        for (const auto& e : spec["origin"]) g.origin.push_back(e.get<double>());
    } else {
        g.origin.assign(static_cast<std::size_t>(g.dim), 0.0);
    }
    g.values.assign(total, 0.0);
    g.mask.assign(total, 1);
    return g;
}

GridFile make_constant(const nlohmann::json& spec) {
    GridFile out;
    out.grid = shell(spec, "constant generator");
    const double v = spec.contains("value") ? spec["value"].get<double>() : 3.0;
    for (auto& x : out.grid.values) x = v;
    return out;
}

GridFile make_lattice(const nlohmann::json& spec) {
    const char* who = "lattice-indicator generator";
    const double L = require_number(spec, "L", who);
    const double r = require_number(spec, "r", who);
    const double h = require_number(spec, "h", who);
    if (!(L > 0.0) || !(r > 0.0) || !(h > 0.0))
        throw ConfigError(std::string(who) + ": L, r, h must be positive");
    const std::int64_t n = exact_cells(L, h, who) + 1;

    GridFile out;
    auto& g = out.grid;
    g.dim = 1;
    g.shape = {n};
    g.spacing = h;
    g.origin = {0.0};
    g.values.assign(static_cast<std::size_t>(n), 0.0);
    g.mask.assign(static_cast<std::size_t>(n), 1);
    const double period = 4.0 * r;
    std::size_t marked = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double x = h * static_cast<double>(i);
        const double k = std::round(x / period);
        const double dist = std::abs(x - period * k);
        if (dist <= 0.5 * h * (1.0 + 1e-9)) {
            g.values[static_cast<std::size_t>(i)] = 1.0;
            ++marked;
        }
    }
    if (marked == 0) throw ConfigError(std::string(who) + ": no cell center lands on the lattice");
    return out;
}

GridFile make_disconnected(const nlohmann::json& spec) {
    const char* who = "disconnected-example generator";
    const std::int64_t N = require_count(spec, "N", who);
    const double h = require_number(spec, "h", who);
    if (N < 2) throw ConfigError(std::string(who) + ": N must be at least 2");
    if (!(h > 0.0)) throw ConfigError(std::string(who) + ": h must be positive");
    // Components [-N-1,-N+1], {0}, [N-1,N+1]: endpoints must be cell centers.
    const std::int64_t per_unit = exact_cells(1.0, h, who);
    const std::int64_t half = (N + 1) * per_unit;   // cells from 0 to N+1
    const std::int64_t inner = (N - 1) * per_unit;  // cells from 0 to N-1
    const std::int64_t n = 2 * half + 1;
    if (inner <= 1)
        throw ConfigError(std::string(who) + ": components touch the singleton; shrink h or grow N");

    GridFile out;
    auto& g = out.grid;
    g.dim = 1;
    g.shape = {n};
    g.spacing = h;
    g.origin = {-static_cast<double>(N + 1)};
    g.values.assign(static_cast<std::size_t>(n), 0.0);
    g.mask.assign(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t off = i - half;  // cell center = off * h
        const bool outer_part = std::abs(off) >= inner && std::abs(off) <= half;
        if (outer_part || off == 0) g.mask[static_cast<std::size_t>(i)] = 1;
    }
    g.values[static_cast<std::size_t>(half)] = 1.0;  // indicator of the singleton {0}
    return out;
}

GridFile make_random(const nlohmann::json& spec) {
    const char* who = "random generator";
    GridFile out;
    auto& g = out.grid;
    g = shell(spec, who);
    std::uint64_t seed = 1;
    if (spec.contains("seed")) {
        if (!spec["seed"].is_number_integer() || spec["seed"].get<std::int64_t>() < 0)
            throw ConfigError(std::string(who) + ": \"seed\" must be a nonnegative integer");
        seed = spec["seed"].get<std::uint64_t>();
    }
    const double lo = spec.contains("lo") ? spec["lo"].get<double>() : 0.0;
    const double hi = spec.contains("hi") ? spec["hi"].get<double>() : 1.0;
    if (!(hi > lo)) throw ConfigError(std::string(who) + ": needs hi > lo");
    const bool smooth = spec.contains("smooth") && spec["smooth"].get<bool>();
    CounterRng rng(seed);

    if (!smooth) {
        for (std::size_t i = 0; i < g.values.size(); ++i)
            g.values[i] = rng.uniform(i, lo, hi);
        return out;
    }

    // Seeded cosine sum: 8 modes, integer wavenumbers 1..3 per axis, decaying
    // amplitudes. Smooth at every scale the checks resolve.
    constexpr int kModes = 8;
    const auto d = static_cast<std::size_t>(g.dim);
    std::vector<double> wave(kModes * d);
    std::vector<double> phase(kModes);
    for (int m = 0; m < kModes; ++m) {
        for (std::size_t a = 0; a < d; ++a) {
            const double extent = g.spacing * static_cast<double>(g.shape[a] - 1);
            const double span = extent > 0.0 ? extent : 1.0;
            const auto j = 1 + static_cast<int>(rng.uniform(static_cast<std::uint64_t>(m) * (d + 1) + a) * 3.0);
            wave[static_cast<std::size_t>(m) * d + a] = 2.0 * std::acos(-1.0) * j / span;
        }
        phase[static_cast<std::size_t>(m)] =
            2.0 * std::acos(-1.0) * rng.uniform(static_cast<std::uint64_t>(m) * (d + 1) + d);
    }
    const auto strides = g.strides();
    std::vector<std::int64_t> idx(d, 0);
    for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
        std::size_t rem = flat;
        for (std::size_t a = 0; a < d; ++a) {
            idx[a] = static_cast<std::int64_t>(rem) / strides[a];
            rem %= static_cast<std::size_t>(strides[a]);
        }
        double v = 0.0;
        for (int m = 0; m < kModes; ++m) {
            double arg = phase[static_cast<std::size_t>(m)];
            for (std::size_t a = 0; a < d; ++a)
                arg += wave[static_cast<std::size_t>(m) * d + a] * g.spacing *
                       static_cast<double>(idx[a]);
            v += std::cos(arg) / static_cast<double>(1 + m);
        }
        g.values[flat] = v;
    }
    return out;
}

}  // namespace

GridFile generate_input(const nlohmann::json& spec, const std::filesystem::path& base_dir) {
    if (spec.is_string()) {
        std::filesystem::path p = spec.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        return load_grid_function(p);
    }
    if (!spec.is_object() || !spec.contains("generator") || !spec["generator"].is_string())
        throw ConfigError("input spec must be a path or an object with a \"generator\" field");
    const std::string kind = spec["generator"].get<std::string>();

    GridFile out;
    if (kind == "constant") {
        out = make_constant(spec);
    } else if (kind == "lattice-indicator") {
        out = make_lattice(spec);
    } else if (kind == "disconnected-example") {
        out = make_disconnected(spec);
    } else if (kind == "random") {
        out = make_random(spec);
    } else if (kind == "file") {
        if (!spec.contains("path") || !spec["path"].is_string())
            throw ConfigError("file generator: missing \"path\"");
        std::filesystem::path p = spec["path"].get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        return load_grid_function(p);
    } else {
        throw ConfigError("unknown generator \"" + kind + "\"");
    }
    out.grid.validate();
    if (out.grid.masked_count() == 0)
        throw ConfigError("generator \"" + kind + "\" produced an empty mask");
    return out;
}

}  // namespace osc
