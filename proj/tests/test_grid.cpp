#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "osc/errors.hpp"
#include "osc/grid.hpp"
#include "osc/hull.hpp"
#include "osc/rng.hpp"

using namespace osc;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto p = fs::temp_directory_path() / "oscn_grid_test";
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("validate rejects bad grids") {
    auto g = testutil::make_grid_1d(0.5, 4);
    CHECK_NOTHROW(g.validate());

    auto bad = g;
    bad.spacing = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = g;
    bad.spacing = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = g;
    bad.values[2] = std::nan("");
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("non-finite value"), ConfigError);

    bad = g;
    bad.values[2] = std::nan("");
    bad.mask[2] = 0;  // NaN allowed once the cell is unmasked
    CHECK_NOTHROW(bad.validate());

    bad = g;
    bad.mask.assign(bad.mask.size(), 0);
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = g;
    bad.values.pop_back();
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("length mismatch"), ConfigError);
}

TEST_CASE("integrate: compensated masked sum") {
    // 1: header {dim:1, shape:[4], spacing:0.5, origin:[0]}, values 1,2,3,4,
    // mask 1,0,1,1, c = 2 -> 2 * 0.5 * (1+3+4) = 8
    auto g = testutil::make_grid_1d(0.5, 4);
    g.values = {1, 2, 3, 4};
    g.mask = {1, 0, 1, 1};
    CHECK(integrate(g, 2.0) == 8.0);

    // linear in c: doubling c exactly doubles the result
    CHECK(integrate(g, 4.0) == 2.0 * integrate(g, 2.0));

    // linear in g for an exact dyadic scale
    auto g2 = g;
    for (auto& v : g2.values) v *= 2.0;
    CHECK(integrate(g2, 2.0) == 2.0 * integrate(g, 2.0));

    // compensated order: adding values spanning many magnitudes stays stable
    auto big = testutil::make_grid_1d(1.0, 3);
    big.values = {1e16, 1.0, -1e16};
    CHECK(integrate(big, 1.0) == 1.0);
}

TEST_CASE("mask_measure and perimeter count") {
    auto g = testutil::make_grid_2d(0.25, 4, 5);
    CHECK(mask_measure(g, 1.0) == doctest::Approx(0.0625 * 20));
    CHECK(perimeter_cell_count(g) == 14);  // all but the 2x3 interior

    g.mask[static_cast<std::size_t>(1 * 5 + 2)] = 0;  // puncture the interior
    CHECK(perimeter_cell_count(g) == 17);              // interior neighbors join
}

TEST_CASE("grid file round-trip is bit-exact") {
    auto dir = temp_dir();
    auto g = testutil::make_grid_2d(0.125, 6, 7, -1.0, 2.0);
    testutil::fill_random(g, 99);
    testutil::random_mask(g, 7, 0.8);
    g.values[3] = 0.1 + 0.2;  // not exactly representable sum
    g.mask[3] = 1;

    save_grid_function(g, 1.5, dir / "grid.json");
    auto loaded = load_grid_function(dir / "grid.json");
    CHECK(loaded.measure_scale == 1.5);
    CHECK(loaded.grid.dim == g.dim);
    CHECK(loaded.grid.shape == g.shape);
    CHECK(loaded.grid.spacing == g.spacing);
    CHECK(loaded.grid.origin == g.origin);
    CHECK(loaded.grid.mask == g.mask);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.mask[i]) continue;
        CHECK(std::memcmp(&loaded.grid.values[i], &g.values[i], sizeof(double)) == 0);
    }
}

TEST_CASE("load errors: malformed header, length mismatch, non-finite, h<=0") {
    auto dir = temp_dir();

    {
        std::ofstream out(dir / "bad.json");
        out << "{not json";
    }
    CHECK_THROWS_WITH_AS(load_grid_function(dir / "bad.json"), doctest::Contains("malformed header"),
                         ConfigError);

    auto g = testutil::make_grid_1d(0.5, 4);
    g.values = {1, 2, 3, 4};
    save_grid_function(g, 1.0, dir / "ok.json");

    {
        std::ofstream out(dir / "ok.f64", std::ios::binary);
        out.write("\0\0\0\0", 4);
    }
    CHECK_THROWS_WITH_AS(load_grid_function(dir / "ok.json"), doctest::Contains("length mismatch"),
                         ConfigError);

    save_grid_function(g, 1.0, dir / "ok.json");
    {
        // poke a NaN into a masked slot
        std::fstream f(dir / "ok.f64", std::ios::binary | std::ios::in | std::ios::out);
        const double nan = std::nan("");
        f.write(reinterpret_cast<const char*>(&nan), sizeof nan);
    }
    CHECK_THROWS_WITH_AS(load_grid_function(dir / "ok.json"), doctest::Contains("non-finite value"),
                         ConfigError);

    save_grid_function(g, 1.0, dir / "ok.json");
    {
        std::ifstream in(dir / "ok.json");
        nlohmann::json hdr;
        in >> hdr;
        in.close();
        hdr["spacing"] = 0.0;
        std::ofstream out(dir / "ok.json");
        out << hdr.dump();
    }
    CHECK_THROWS_AS(load_grid_function(dir / "ok.json"), ConfigError);
}

TEST_CASE("hull volume: 1-D interval") {
    // masked centers {0, 1, 3} -> hull [0,3], volume 3
    auto g = testutil::make_grid_1d(1.0, 4);
    g.mask = {1, 1, 0, 1};
    auto info = convex_hull_volume(g);
    CHECK(info.volume == doctest::Approx(3.0));
    CHECK(info.dim_supported);
    CHECK_FALSE(info.degenerate);

    g.mask = {0, 1, 0, 0};  // single point
    info = convex_hull_volume(g);
    CHECK(info.volume == 0.0);
    CHECK(info.degenerate);
}

TEST_CASE("hull volume: 2-D square, collinear degenerate") {
    // centers of a full 3x3 grid with spacing 1/2 -> unit square area 1
    auto g = testutil::make_grid_2d(0.5, 3, 3);
    auto info = convex_hull_volume(g);
    CHECK(info.volume == doctest::Approx(1.0));
    CHECK(info.vertices.size() == 4);  // edge midpoints are not vertices

    auto line = testutil::make_grid_2d(0.5, 1, 5);
    info = convex_hull_volume(line);
    CHECK(info.volume == 0.0);
    CHECK(info.degenerate);
}

TEST_CASE("hull volume: 3-D cube and coplanar degenerate") {
    auto g = testutil::make_grid_3d(0.5, 3, 3, 3);
    auto info = convex_hull_volume(g);
    CHECK(info.volume == doctest::Approx(1.0));
    CHECK(info.vertices.size() == 8);

    auto flat = testutil::make_grid_3d(0.5, 1, 3, 3);
    info = convex_hull_volume(flat);
    CHECK(info.volume == 0.0);
    CHECK(info.degenerate);
}

TEST_CASE("hull volume: permutation invariance of the point order") {
    std::vector<std::array<double, 3>> pts;
    CounterRng rng(1234);
    for (std::uint64_t i = 0; i < 60; ++i)
        pts.push_back({rng.uniform(3 * i), rng.uniform(3 * i + 1), rng.uniform(3 * i + 2)});
    auto facets_a = hull_detail::hull3d(pts);

    std::vector<std::array<double, 3>> shuffled = pts;
    // deterministic permutation
    for (std::size_t i = shuffled.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.bits(1000 + i) % i);
        std::swap(shuffled[i - 1], shuffled[j]);
    }
    auto facets_b = hull_detail::hull3d(shuffled);

    auto vol = [](const std::vector<hull_detail::Facet3>& fs,
                  const std::vector<std::array<double, 3>>& ps) {
        double v6 = 0;
        if (fs.empty()) return 0.0;
        const auto& q = ps[fs[0].v[0]];
        for (const auto& f : fs) {
            const auto &a = ps[f.v[0]], &b = ps[f.v[1]], &c = ps[f.v[2]];
            const double ax = a[0] - q[0], ay = a[1] - q[1], az = a[2] - q[2];
            const double bx = b[0] - q[0], by = b[1] - q[1], bz = b[2] - q[2];
            const double cx = c[0] - q[0], cy = c[1] - q[1], cz = c[2] - q[2];
            v6 += ax * (by * cz - bz * cy) - ay * (bx * cz - bz * cx) + az * (bx * cy - by * cx);
        }
        return std::abs(v6) / 6.0;
    };
    CHECK(vol(facets_a, pts) == vol(facets_b, shuffled));
}

TEST_CASE("hull volume lower bound: interior cells times h^d") {
    auto g = testutil::make_grid_2d(1.0 / 32, 33, 33);
    // disk mask
    for (std::int64_t y = 0; y < 33; ++y)
        for (std::int64_t x = 0; x < 33; ++x) {
            const double dy = (static_cast<double>(y) - 16) / 32.0;
            const double dx = (static_cast<double>(x) - 16) / 32.0;
            g.mask[static_cast<std::size_t>(y * 33 + x)] = (dy * dy + dx * dx <= 0.25) ? 1 : 0;
        }
    g.validate();
    const auto info = convex_hull_volume(g);
    const double hd = g.spacing * g.spacing;
    const double lower =
        (static_cast<double>(g.masked_count()) - static_cast<double>(perimeter_cell_count(g))) * hd;
    CHECK(info.volume >= lower);
}

TEST_CASE("extend_to_hull: 1-D fill, value = masked min, idempotent") {
    auto g = testutil::make_grid_1d(1.0, 6);
    g.values = {5, 0, 0, 0, 0, 2};
    g.mask = {1, 0, 0, 0, 0, 1};
    auto e = extend_to_hull(g);
    CHECK(e.masked_count() == 6);
    CHECK(e.values[0] == 5);  // originals untouched
    CHECK(e.values[5] == 2);
    for (std::size_t i = 1; i < 5; ++i) CHECK(e.values[i] == 2);  // inf of originals

    auto e2 = extend_to_hull(e);
    CHECK(testutil::grids_equal_on_mask(e, e2));

    // single masked cell stays unchanged
    auto s = testutil::make_grid_1d(1.0, 5);
    s.mask = {0, 0, 1, 0, 0};
    s.values[2] = 7;
    auto es = extend_to_hull(s);
    CHECK(es.masked_count() == 1);
}

TEST_CASE("extend_to_hull: 2-D triangle membership matches a point-in-triangle oracle") {
    // mask three corners of a right triangle; hull = triangle
    const std::int64_t n = 21;
    auto g = testutil::make_grid_2d(1.0 / 20, n, n);
    for (auto& m : g.mask) m = 0;
    auto at = [&](std::int64_t y, std::int64_t x) { return static_cast<std::size_t>(y * n + x); };
    g.mask[at(0, 0)] = g.mask[at(0, 20)] = g.mask[at(20, 0)] = 1;
    g.values[at(0, 0)] = 3;
    g.values[at(0, 20)] = 4;
    g.values[at(20, 0)] = 5;
    g.validate();

    auto e = extend_to_hull(g);
    // oracle: barycentric sign test for triangle (0,0), (0,1), (1,0) in (y,x)
    for (std::int64_t y = 0; y < n; ++y)
        for (std::int64_t x = 0; x < n; ++x) {
            const double py = static_cast<double>(y) / 20, px = static_cast<double>(x) / 20;
            const bool inside = py + px <= 1.0 + 1e-12;
            CHECK(static_cast<bool>(e.mask[at(y, x)]) == inside);
            if (inside && !g.mask[at(y, x)]) CHECK(e.values[at(y, x)] == 3);
        }

    auto e2 = extend_to_hull(e);
    CHECK(testutil::grids_equal_on_mask(e, e2));
}

TEST_CASE("extend_to_hull: 3-D tetrahedron corner fill") {
    const std::int64_t n = 9;
    auto g = testutil::make_grid_3d(1.0 / 8, n, n, n);
    for (auto& m : g.mask) m = 0;
    auto at = [&](std::int64_t z, std::int64_t y, std::int64_t x) {
        return static_cast<std::size_t>((z * n + y) * n + x);
    };
    g.mask[at(0, 0, 0)] = g.mask[at(0, 0, 8)] = g.mask[at(0, 8, 0)] = g.mask[at(8, 0, 0)] = 1;
    g.values[at(0, 0, 0)] = 1;
    g.values[at(0, 0, 8)] = 2;
    g.values[at(0, 8, 0)] = 3;
    g.values[at(8, 0, 0)] = 4;
    g.validate();

    auto e = extend_to_hull(g);
    for (std::int64_t z = 0; z < n; ++z)
        for (std::int64_t y = 0; y < n; ++y)
            for (std::int64_t x = 0; x < n; ++x) {
                const double s = static_cast<double>(x + y + z) / 8.0;
                CHECK(static_cast<bool>(e.mask[at(z, y, x)]) == (s <= 1.0 + 1e-12));
            }
    CHECK(convex_hull_volume(g).volume == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("refine_nearest covers the same extent at half spacing") {
    auto g = testutil::make_grid_1d(0.5, 4);
    g.values = {1, 2, 3, 4};
    auto r = refine_nearest(g);
    CHECK(r.shape[0] == 7);
    CHECK(r.spacing == 0.25);
    CHECK(r.values[0] == 1);
    CHECK(r.values[6] == 4);
    CHECK(r.values[2] == 2);  // coincides with parent cell 1
}
