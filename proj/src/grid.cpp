#include "osc/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "osc/errors.hpp"

namespace osc {

static_assert(std::endian::native == std::endian::little,
              "grid payloads are little-endian; big-endian hosts are unsupported");
static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559);

std::size_t GridFunction::size() const {
    std::size_t n = 1;
    for (auto s : shape) n *= static_cast<std::size_t>(s);
    return n;
}

std::size_t GridFunction::masked_count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

std::vector<std::int64_t> GridFunction::strides() const {
    std::vector<std::int64_t> st(static_cast<std::size_t>(dim), 1);
    for (int a = dim - 2; a >= 0; --a)
        st[static_cast<std::size_t>(a)] =
            st[static_cast<std::size_t>(a) + 1] * shape[static_cast<std::size_t>(a) + 1];
    return st;
}

bool GridFunction::in_bounds(std::span<const std::int64_t> idx) const {
    for (int a = 0; a < dim; ++a) {
        auto u = static_cast<std::size_t>(a);
        if (idx[u] < 0 || idx[u] >= shape[u]) return false;
    }
    return true;
}

std::size_t GridFunction::flat_index(std::span<const std::int64_t> idx) const {
    std::size_t f = 0;
    std::size_t mul = 1;
    for (int a = dim - 1; a >= 0; --a) {
        f += static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]) * mul;
        mul *= static_cast<std::size_t>(shape[static_cast<std::size_t>(a)]);
    }
    return f;
}

void GridFunction::validate() const {
    if (dim < 1) throw ConfigError("grid dim must be >= 1");
    if (shape.size() != static_cast<std::size_t>(dim))
        throw ConfigError("grid shape rank does not match dim");
    for (auto s : shape)
        if (s < 1) throw ConfigError("grid shape entries must be >= 1");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw ConfigError("grid spacing must be a positive finite real (h > 0)");
    if (origin.size() != static_cast<std::size_t>(dim))
        throw ConfigError("grid origin rank does not match dim");
    const std::size_t n = size();
    if (values.size() != n) throw ConfigError("grid value length mismatch");
    if (mask.size() != n) throw ConfigError("grid mask length mismatch");
    std::size_t masked = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        ++masked;
        if (!std::isfinite(values[i]))
            throw ConfigError("non-finite value in masked cell " + std::to_string(i));
    }
    if (masked == 0) throw ConfigError("grid mask must select at least one cell");
}

namespace {

std::vector<char> read_all(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + p.string());
    std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return buf;
}

}  // namespace

GridFile load_grid_function(const std::filesystem::path& header_path) {
    nlohmann::json hdr;
    {
        std::ifstream in(header_path);
        if (!in) throw ConfigError("cannot open " + header_path.string());
        try {
            in >> hdr;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("malformed header " + header_path.string() + ": " + e.what());
        }
    }
    GridFile out;
    GridFunction& g = out.grid;
    try {
        g.dim = hdr.at("dim").get<int>();
        g.shape = hdr.at("shape").get<std::vector<std::int64_t>>();
        g.spacing = hdr.at("spacing").get<double>();
        g.origin = hdr.at("origin").get<std::vector<double>>();
        out.measure_scale = hdr.value("c", 1.0);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed header " + header_path.string() + ": " + e.what());
    }
    if (!hdr.contains("data") || !hdr["data"].is_string())
        throw ConfigError("malformed header " + header_path.string() + ": missing data path");

    const auto dir = header_path.parent_path();
    const std::size_t n = g.size();

    const auto raw = read_all(dir / hdr["data"].get<std::string>());
    if (raw.size() != n * sizeof(double))
        throw ConfigError("data length mismatch: expected " + std::to_string(n * sizeof(double)) +
                          " bytes, got " + std::to_string(raw.size()));
    g.values.resize(n);
    std::memcpy(g.values.data(), raw.data(), raw.size());

    const auto mask_field = hdr.value("mask", std::string("full"));
    if (mask_field == "full") {
        g.mask.assign(n, 1);
    } else {
        const auto mraw = read_all(dir / mask_field);
        if (mraw.size() != n)
            throw ConfigError("mask length mismatch: expected " + std::to_string(n) +
                              " bytes, got " + std::to_string(mraw.size()));
        g.mask.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (mraw[i] != 0 && mraw[i] != 1)
                throw ConfigError("mask byte out of range at cell " + std::to_string(i));
            g.mask[i] = static_cast<std::uint8_t>(mraw[i]);
        }
    }
    g.validate();
    return out;
}

void save_grid_function(const GridFunction& g, double c, const std::filesystem::path& header_path) {
    g.validate();
    const auto dir = header_path.parent_path();
    const auto stem = header_path.stem().string();
    const std::string data_name = stem + ".f64";
    const bool full = g.masked_count() == g.size();
    const std::string mask_name = stem + ".mask";

    {
        std::ofstream out(dir / data_name, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + (dir / data_name).string());
        out.write(reinterpret_cast<const char*>(g.values.data()),
                  static_cast<std::streamsize>(g.values.size() * sizeof(double)));
    }
    if (!full) {
        std::ofstream out(dir / mask_name, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + (dir / mask_name).string());
        out.write(reinterpret_cast<const char*>(g.mask.data()),
                  static_cast<std::streamsize>(g.mask.size()));
    }

    nlohmann::json hdr;
    hdr["dim"] = g.dim;
    hdr["shape"] = g.shape;
    hdr["spacing"] = g.spacing;
    hdr["origin"] = g.origin;
    hdr["c"] = c;
    hdr["data"] = data_name;
    hdr["mask"] = full ? std::string("full") : mask_name;
    std::ofstream out(header_path);
    if (!out) throw ConfigError("cannot write " + header_path.string());
    out << hdr.dump(2) << '\n';
}

double integrate(const GridFunction& g, double c) {
    // Neumaier variant: the compensation also absorbs the case |term| > |sum|.
    double sum = 0.0, comp = 0.0;
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!g.mask[i]) continue;
        const double v = g.values[i];
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return c * std::pow(g.spacing, g.dim) * (sum + comp);
}

double mask_measure(const GridFunction& g, double c) {
    return c * std::pow(g.spacing, g.dim) * static_cast<double>(g.masked_count());
}

double masked_min(const GridFunction& g) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.mask[i]) m = std::min(m, g.values[i]);
    return m;
}

double masked_max(const GridFunction& g) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.mask[i]) m = std::max(m, g.values[i]);
    return m;
}

double value_range(const GridFunction& g) { return masked_max(g) - masked_min(g); }

std::size_t perimeter_cell_count(const GridFunction& g) {
    const auto st = g.strides();
    std::vector<std::int64_t> idx(static_cast<std::size_t>(g.dim), 0);
    std::size_t count = 0;
    const std::size_t n = g.size();
    for (std::size_t f = 0; f < n; ++f) {
        if (g.mask[f]) {
            bool boundary = false;
            for (int a = 0; a < g.dim && !boundary; ++a) {
                const auto u = static_cast<std::size_t>(a);
                for (int s : {-1, +1}) {
                    const std::int64_t j = idx[u] + s;
                    if (j < 0 || j >= g.shape[u] ||
                        !g.mask[static_cast<std::size_t>(static_cast<std::int64_t>(f) + s * st[u])]) {
                        boundary = true;
                        break;
                    }
                }
            }
            if (boundary) ++count;
        }
        for (int a = g.dim - 1; a >= 0; --a) {
            auto u = static_cast<std::size_t>(a);
            if (++idx[u] < g.shape[u]) break;
            idx[u] = 0;
        }
    }
    return count;
}

double domain_bbox_diameter(const GridFunction& g) {
    std::vector<std::int64_t> lo(static_cast<std::size_t>(g.dim),
                                 std::numeric_limits<std::int64_t>::max());
    std::vector<std::int64_t> hi(static_cast<std::size_t>(g.dim),
                                 std::numeric_limits<std::int64_t>::min());
    std::vector<std::int64_t> idx(static_cast<std::size_t>(g.dim), 0);
    const std::size_t n = g.size();
    for (std::size_t f = 0; f < n; ++f) {
        if (g.mask[f]) {
            for (int a = 0; a < g.dim; ++a) {
                auto u = static_cast<std::size_t>(a);
                lo[u] = std::min(lo[u], idx[u]);
                hi[u] = std::max(hi[u], idx[u]);
            }
        }
        for (int a = g.dim - 1; a >= 0; --a) {
            auto u = static_cast<std::size_t>(a);
            if (++idx[u] < g.shape[u]) break;
            idx[u] = 0;
        }
    }
    double d2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        auto u = static_cast<std::size_t>(a);
        const double e = g.spacing * static_cast<double>(hi[u] - lo[u]);
        d2 += e * e;
    }
    return std::sqrt(d2);
}

GridFunction shift_to_nonnegative(const GridFunction& g) {
    GridFunction out = g;
    const double m = masked_min(g);
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out.mask[i]) out.values[i] -= m;
    return out;
}

GridFunction refine_nearest(const GridFunction& g) {
    GridFunction out;
    out.dim = g.dim;
    out.spacing = g.spacing / 2.0;
    out.origin = g.origin;
    out.shape.resize(static_cast<std::size_t>(g.dim));
    for (int a = 0; a < g.dim; ++a) {
        auto u = static_cast<std::size_t>(a);
        out.shape[u] = 2 * g.shape[u] - 1;
    }
    const std::size_t n = out.size();
    out.values.resize(n);
    out.mask.resize(n);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(g.dim), 0);
    std::vector<std::int64_t> pidx(static_cast<std::size_t>(g.dim), 0);
    for (std::size_t f = 0; f < n; ++f) {
        for (int a = 0; a < g.dim; ++a) {
            auto u = static_cast<std::size_t>(a);
            pidx[u] = idx[u] / 2;  // ties to the lower-index parent
        }
        const std::size_t pf = g.flat_index(pidx);
        out.values[f] = g.values[pf];
        out.mask[f] = g.mask[pf];
        for (int a = g.dim - 1; a >= 0; --a) {
            auto u = static_cast<std::size_t>(a);
            if (++idx[u] < out.shape[u]) break;
            idx[u] = 0;
        }
    }
    return out;
}

}  // namespace osc
