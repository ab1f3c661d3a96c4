// Acceptance battery: the release-gating claims of this project, one binary,
// one [PASS]/[FAIL] line per criterion. Every tolerance is pinned here, next
// to the claim it guards. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "helpers.hpp"
#include "osc/approach.hpp"
#include "osc/errors.hpp"
#include "osc/generate.hpp"
#include "osc/grid.hpp"
#include "osc/hull.hpp"
#include "osc/measure.hpp"
#include "osc/morphology.hpp"
#include "osc/rng.hpp"
#include "osc/scenario.hpp"
#include "osc/seminorm.hpp"
#include "osc/setspec.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace osc;

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

int failures = 0;

void run_criterion(int id, const char* label,
                   const std::function<std::pair<bool, std::string>()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string note;
    try {
        auto res = body();
        ok = res.first;
        note = std::move(res.second);
    } catch (const std::exception& e) {
        note = std::string("unexpected exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %02d %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, label, note.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Criterion 1 runs the seeded instance battery; criterion 9 reuses the same
// instances, so its outcome is collected here during criterion 1.
struct BatteryStats {
    int total = 0;
    int bound_violations = 0;
    int continuity_violations = 0;
    double worst_bound_frac = 0.0;   // max lhs/rhs, < 1 everywhere when healthy
    double continuity_min_slack = std::numeric_limits<double>::infinity();
    double seconds = 0.0;
};
BatteryStats battery;

std::pair<bool, std::string> crit_bound_battery() {
    const auto t0 = std::chrono::steady_clock::now();
    const int mults[3] = {8, 16, 32};
    for (int i = 0; i < 50; ++i) {
        const int d = i < 25 ? 1 : 2;
        const double h = d == 1 ? 0.015625 : 0.05;
        json spec{{"generator", "random"},
                  {"seed", 4000 + i},
                  {"dim", d},
                  {"spacing", h},
                  {"smooth", i % 2 == 0}};
        if (d == 1) {
            const std::int64_t sizes[3] = {256, 341, 512};
            spec["shape"] = json::array({sizes[i % 3]});
        } else {
            const std::int64_t sides[3] = {48, 64, 96};
            spec["shape"] = json::array({sides[i % 3], sides[i % 3]});
        }
        auto g = generate_input(spec).grid;
        if (i % 5 == 3) testutil::random_mask(g, 4100 + static_cast<std::uint64_t>(i), 0.85);

        const double r = mults[(i / 3) % 3] * h;
        const double alpha = i % 2 == 0 ? 0.5 : 1.0;
        const BallMode mode = (i / 2) % 2 == 0 ? BallMode::open : BallMode::closed;
        const double c = i % 7 == 0 ? 2.0 : 1.0;

        const auto rep = thm1_check(g, r, alpha, mode, SweepGrid::default_for(g), c, 0.0);
        ++battery.total;
        if (!rep.pass) ++battery.bound_violations;
        if (rep.rhs > 0.0) battery.worst_bound_frac = std::max(battery.worst_bound_frac, rep.lhs / rep.rhs);

        // criterion 9 companion: window-radius continuity at delta = h, which
        // sits inside the r/(2d+1) hypothesis for every r >= 8h, d <= 2
        const auto crep = continuity_modulus_check(extend_to_hull(g), r, h, c);
        if (!crep.pass) ++battery.continuity_violations;
        battery.continuity_min_slack = std::min(battery.continuity_min_slack, crep.slack);
    }
    battery.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok =
        battery.total == 50 && battery.bound_violations == 0 && battery.seconds <= 300.0;
    return {ok, fmt("%d instances, %d violations, worst lhs/rhs %.3f, budget 300s",
                    battery.total, battery.bound_violations, battery.worst_bound_frac)};
}

std::pair<bool, std::string> crit_lattice_example() {
    const double r = 0.015625, big_l = 1.0;
    const auto gf = generate_input(
        json{{"generator", "lattice-indicator"}, {"L", big_l}, {"r", r}, {"h", 0.0009765625}});
    const auto w = oscillation(gf.grid, r, BallMode::open);
    const auto sweep = SweepGrid::geometric(0.66 * r, 4.0 * r, std::pow(2.0, 0.25));
    const auto rep = osc_integral_sweep(w, BallMode::open, sweep, 1.0, 1.0);

    int bad = 0;
    double worst_dev = 0.0;
    for (const auto& e : rep.entries) {
        const double oracle = std::min(1.0, e.delta / r) * big_l;
        const double dev = std::abs(e.integral - oracle) / oracle;
        worst_dev = std::max(worst_dev, dev);
        if (dev > 0.10) ++bad;
    }
    const double target = 1.0 / r;  // alpha = 1
    const bool sem_ok = std::abs(rep.seminorm - target) <= 0.15 * target;
    const bool arg_ok = rep.argmax_delta >= r / 2.0 && rep.argmax_delta <= 2.0 * r;
    return {bad == 0 && sem_ok && arg_ok,
            fmt("%zu radii, worst I(delta) deviation %.1f%% (tol 10%%), seminorm %.2f vs %.0f "
                "(tol 15%%), argmax %.2fr",
                rep.entries.size(), worst_dev * 100.0, rep.seminorm, target,
                rep.argmax_delta / r)};
}

std::pair<bool, std::string> crit_disconnected_example() {
    const double target = 4.0;  // continuum measure of the masked domain
    double s1[2], s05[2];
    int idx = 0;
    for (int big_n : {4, 8}) {
        const auto gf = generate_input(
            json{{"generator", "disconnected-example"}, {"N", big_n}, {"h", 0.015625}});
        const auto w = oscillation(gf.grid, static_cast<double>(big_n), BallMode::open);
        const auto sweep = SweepGrid::geometric(0.03125, 1.5, std::pow(2.0, 0.25));
        s1[idx] = gen_holder_seminorm(w, BallMode::open, sweep, 1.0, 1.0);
        s05[idx] = gen_holder_seminorm(w, BallMode::open, sweep, 0.5, 1.0);
        ++idx;
    }
    bool ok = true;
    for (double s : {s1[0], s1[1], s05[0], s05[1]}) ok = ok && std::abs(s - target) <= 0.15 * target;
    ok = ok && std::abs(s1[0] - s1[1]) <= 1e-9 && std::abs(s05[0] - s05[1]) <= 1e-9;
    return {ok, fmt("alpha=1: %.4f (N=4) vs %.4f (N=8); alpha=0.5: %.4f vs %.4f; target 4 "
                    "within 15%%, N-independent to 1e-9",
                    s1[0], s1[1], s05[0], s05[1])};
}

std::pair<bool, std::string> crit_image_volume() {
    const auto H = TargetSet::from_points(2, {0.0, 0.0});
    const double delta = 0.5;

    const double closed_main = 0.24 / 0.44;
    const auto main_rep =
        thm2_check(H, SetSpec::annulus({0.0, 0.0}, 1.0, 1.2), delta, 1000000, 7);
    bool ok = main_rep.pass && std::abs(main_rep.ratio - closed_main) <= 3.0 * main_rep.sigma &&
              main_rep.ratio >= 0.5 && std::abs(main_rep.big_r - 1.0) <= 1e-9;

    const double epses[4] = {0.4, 0.2, 0.1, 0.05};
    const double closed[4] = {0.56 / 0.96, 0.24 / 0.44, 0.11 / 0.21, 0.0525 / 0.1025};
    double ratios[4];
    for (int k = 0; k < 4; ++k) {
        const auto rep = thm2_check(H, SetSpec::annulus({0.0, 0.0}, 1.0, 1.0 + epses[k]), delta,
                                    4000000, 101 + static_cast<std::uint64_t>(k));
        ratios[k] = rep.ratio;
        ok = ok && rep.pass && std::abs(rep.ratio - closed[k]) <= 5.0 * rep.sigma &&
             rep.ratio >= 0.5;
    }
    const bool monotone = ratios[0] > ratios[1] && ratios[1] > ratios[2] && ratios[2] > ratios[3];
    ok = ok && monotone && ratios[3] <= 0.52;
    return {ok, fmt("main %.4f vs %.4f (|z|=%.1f); sweep %.4f > %.4f > %.4f > %.4f -> 0.5 "
                    "monotone=%s",
                    main_rep.ratio, closed_main,
                    std::abs(main_rep.ratio - closed_main) / main_rep.sigma, ratios[0], ratios[1],
                    ratios[2], ratios[3], monotone ? "yes" : "no")};
}

std::pair<bool, std::string> crit_contraction() {
    struct Cfg {
        int dim;
        std::size_t m;
        double delta, site_span, box_span;
        std::uint64_t hseed, pseed;
    };
    const Cfg cfgs[2] = {{2, 60000, 0.8, 4.0, 6.0, 601, 602},
                         {3, 40000, 0.5, 3.0, 5.0, 603, 604}};
    bool ok = true;
    std::size_t total = 0, kept = 0;
    long long viol = 0;
    for (const auto& cfg : cfgs) {
        CounterRng hr(cfg.hseed);
        std::vector<double> flat(16 * static_cast<std::size_t>(cfg.dim));
        for (std::size_t t = 0; t < flat.size(); ++t)
            flat[t] = hr.uniform(t, -cfg.site_span, cfg.site_span);
        const auto H = TargetSet::from_points(cfg.dim, flat);

        CounterRng pr(cfg.pseed);
        std::vector<PointPair> pairs(cfg.m);
        const auto dd = static_cast<std::size_t>(cfg.dim);
        for (std::size_t j = 0; j < cfg.m; ++j) {
            pairs[j].x.resize(dd);
            pairs[j].y.resize(dd);
            for (std::size_t a = 0; a < dd; ++a) {
                pairs[j].x[a] = pr.uniform(j * 2 * dd + a, -cfg.box_span, cfg.box_span);
                pairs[j].y[a] = pr.uniform(j * 2 * dd + dd + a, -cfg.box_span, cfg.box_span);
            }
        }
        const auto rep = contraction_check(H, cfg.delta, pairs);
        const auto skipped = rep.detail["skipped"].get<std::size_t>();
        viol += rep.detail["violations"].get<long long>();
        total += cfg.m;
        kept += cfg.m - skipped;
        ok = ok && rep.pass && cfg.m - skipped >= cfg.m / 2;
    }
    ok = ok && total == 100000 && viol == 0;
    return {ok, fmt("%zu pairs (%zu with both distances >= delta), %lld violations at slack 1e-9",
                    total, kept, viol)};
}

std::pair<bool, std::string> crit_derivative() {
    const std::vector<double> steps{1e-2, 1e-3, 1e-4};
    int fails = 0;
    double worst_slope = std::numeric_limits<double>::infinity();
    double worst_int = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1000; ++k) {
        CounterRng rng(7000 + static_cast<std::uint64_t>(k));
        std::uint64_t ctr = 0;
        const int dim = 2 + (k & 1);
        const auto dd = static_cast<std::size_t>(dim);
        const std::size_t nsites = 1 + static_cast<std::size_t>(k) % 6;
        std::vector<double> flat(nsites * dd);
        for (double& v : flat) v = rng.uniform(ctr++, -3.0, 3.0);
        const auto H = TargetSet::from_points(dim, flat);
        const double r = 0.5 + 1.5 * rng.uniform(ctr++);

        const auto draw_far = [&]() {
            std::vector<double> p(dd);
            for (int attempt = 0; attempt < 256; ++attempt) {
                for (auto& v : p) v = rng.uniform(ctr++, -6.0, 6.0);
                if (project(p, H).distance >= r + 1e-6) return p;
            }
            throw ConfigError("derivative battery: could not place a point clear of the sites");
        };
        const auto x = draw_far();
        const auto y = draw_far();
        const auto rep = derivative_check(H, x, y, r, steps);
        if (!rep.pass) ++fails;
        worst_slope = std::min(worst_slope, rep.measured);
        worst_int = std::min(worst_int, rep.detail["integrated_worst_margin"].get<double>());
    }
    return {fails == 0, fmt("1000 configurations, %d failures, worst slope margin %.3g, worst "
                            "integrated margin %.3g",
                            fails, worst_slope, worst_int)};
}

std::pair<bool, std::string> crit_sandwich() {
    int checks = 0, viol = 0;
    for (int k = 0; k < 200; ++k) {
        CounterRng rng(8000 + static_cast<std::uint64_t>(k));
        std::uint64_t ctr = 0;
        const int dim = 1 + k % 3;
        const double h = 0.02 + 0.08 * rng.uniform(ctr++);
        GridFunction g;
        if (dim == 1) {
            g = testutil::make_grid_1d(h, 64 + static_cast<std::int64_t>(448 * rng.uniform(ctr++)));
        } else if (dim == 2) {
            const auto ny = 12 + static_cast<std::int64_t>(28 * rng.uniform(ctr++));
            const auto nx = 12 + static_cast<std::int64_t>(28 * rng.uniform(ctr++));
            g = testutil::make_grid_2d(h, ny, nx);
        } else {
            const auto nz = 6 + static_cast<std::int64_t>(8 * rng.uniform(ctr++));
            const auto ny = 6 + static_cast<std::int64_t>(8 * rng.uniform(ctr++));
            const auto nx = 6 + static_cast<std::int64_t>(8 * rng.uniform(ctr++));
            g = testutil::make_grid_3d(h, nz, ny, nx);
        }
        const double lo = -2.0 * rng.uniform(ctr++);
        const double hi = 0.5 + 2.0 * rng.uniform(ctr++);
        testutil::fill_random(g, 8100 + static_cast<std::uint64_t>(k), lo, hi);
        if (k % 4 == 1) testutil::random_mask(g, 8200 + static_cast<std::uint64_t>(k), 0.8);
        const double r = (2.0 + 6.0 * rng.uniform(ctr++)) * h;
        const double delta = (0.2 + 0.6 * rng.uniform(ctr++)) * r;
        for (BallMode mode : {BallMode::open, BallMode::closed}) {
            const auto rep = sandwich_check(g, r, delta, mode);
            ++checks;
            if (!rep.pass || rep.detail["violations"].get<long long>() != 0) ++viol;
        }
    }
    return {checks == 400 && viol == 0,
            fmt("200 grids x 2 window modes, %d pointwise violations at zero tolerance", viol)};
}

std::pair<bool, std::string> crit_density() {
    int total_intervals = 0, viol = 0;
    for (int k = 0; k < 20; ++k) {
        CounterRng rng(9500 + static_cast<std::uint64_t>(k));
        const auto gf = generate_input(json{{"generator", "random"},
                                            {"seed", 9000 + k},
                                            {"dim", 2},
                                            {"shape", json::array({41, 41})},
                                            {"spacing", 0.05},
                                            {"smooth", true}});
        const auto g = extend_to_hull(gf.grid);
        const double r = 1.0;
        const double delta = 0.04 + 0.15 * rng.uniform(0);  // always below r/5

        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g.mask[i]) continue;
            lo = std::min(lo, g.values[i]);
            hi = std::max(hi, g.values[i]);
        }
        const auto intervals = default_density_intervals(lo, hi, 500 + static_cast<std::uint64_t>(k));
        const auto rep = pushforward_density_check(g, r, delta, intervals, 1.0);
        total_intervals += static_cast<int>(rep.intervals.size());
        for (const auto& iv : rep.intervals)
            if (iv.mu1 > rep.density_bound * iv.mu2 + rep.eps_stat) ++viol;
        if (!rep.pass) ++viol;
    }
    return {total_intervals == 2000 && viol == 0,
            fmt("20 scenarios x 100 intervals, %d violations of mu1 <= C mu2 + eps", viol)};
}

std::pair<bool, std::string> crit_continuity() {
    const bool ok = battery.total == 50 && battery.continuity_violations == 0;
    return {ok, fmt("same %d-instance battery as criterion 1, %d violations, min slack %.3g",
                    battery.total, battery.continuity_violations, battery.continuity_min_slack)};
}

std::pair<bool, std::string> crit_decomposition() {
    // Step-count formula: the loop form max{k : r - (2k+1) delta >= 0} and the
    // closed form floor(r/(2 delta) - 1/2), re-derived here independently.
    int mismatches = 0;
    CounterRng rng(31337);
    for (std::uint64_t j = 0; j < 10000; ++j) {
        const double r = 0.1 + 10.0 * rng.uniform(2 * j);
        const double v = 1e-3 + (1.0 - 1e-3) * rng.uniform(2 * j + 1);
        const double delta = r / 3.0 * v;
        const int lib = k_max(r, delta);
        int loop_form = 0;
        while (r - (2.0 * (loop_form + 1) + 1.0) * delta >= 0.0) ++loop_form;
        const int closed_form = static_cast<int>(std::floor(r / (2.0 * delta) - 0.5));
        if (lib != loop_form || lib != closed_form) ++mismatches;
    }
    const bool kmax_ok =
        mismatches == 0 && k_max(0.75, 0.25) == 1 && k_max(1.25, 0.25) == 2 && k_max(0.8, 0.25) == 1;

    // Trail consistency: a class-k point's first k step images stay in A, the
    // next one leaves; star points survive all K+1 steps. Every trail entry is
    // recomputed from its predecessor and every membership rechecked.
    struct Scen {
        SetSpec A;
        TargetSet H;
        double r, delta;
    };
    const std::vector<Scen> scens = {
        {SetSpec::annulus({0.0, 0.0}, 1.0, 2.0), TargetSet::from_points(2, {0.0, 0.0}), 0.9, 0.15},
        {SetSpec::ball({0.9, 0.0}, 0.7), TargetSet::from_points(2, {0.0, 0.0}), 0.6, 0.1},
        {SetSpec::box({-2.0, -1.0}, {2.0, 1.0}),
         TargetSet::from_points(2, {-1.0, 0.0, 1.0, 0.0}), 0.75, 0.12},
        {SetSpec::annulus({0.0, 0.0, 0.0}, 0.8, 1.6),
         TargetSet::from_points(3, {0.0, 0.0, 0.0}), 0.9, 0.1},
        {SetSpec::intersection_of({SetSpec::annulus({0.0, 0.0}, 1.0, 2.0),
                                   SetSpec::box({0.0, -2.0}, {2.0, 2.0})}),
         TargetSet::from_points(2, {0.0, 0.0}), 1.2, 0.2}};
    int npts = 0, bad = 0, skipped = 0;
    for (std::size_t s = 0; s < scens.size(); ++s) {
        const auto& sc = scens[s];
        const int big_k = k_max(sc.r, sc.delta);
        const auto pts = sample_set(sc.A, 2000, 650 + s);
        for (const auto& p : pts) {
            ++npts;
            AkClass cls;
            try {
                cls = ak_classify(p, sc.A, sc.H, sc.r, sc.delta);
            } catch (const OnTargetSetError&) {
                ++skipped;
                continue;
            }
            bool good = !cls.trail.empty() && cls.trail[0] == p;
            const double dist = project(p, sc.H).distance;
            if (cls.label == AkClass::Label::inside_collar) {
                good = good && dist < sc.r - sc.delta && cls.trail.size() == 1;
            } else {
                good = good && !(dist < sc.r - sc.delta);
                const std::size_t want = cls.label == AkClass::Label::star
                                             ? static_cast<std::size_t>(big_k) + 2
                                             : static_cast<std::size_t>(cls.k) + 2;
                good = good && cls.trail.size() == want;
                if (cls.label == AkClass::Label::k_class)
                    good = good && cls.k >= 0 && cls.k <= big_k;
                for (std::size_t t = 1; good && t < cls.trail.size(); ++t) {
                    good = approach(cls.trail[t - 1], sc.H, 2.0 * sc.delta) == cls.trail[t];
                    const bool inside = sc.A.contains(cls.trail[t]);
                    if (cls.label == AkClass::Label::star ||
                        t + 1 < cls.trail.size())  // leading iterates stay in A
                        good = good && inside;
                    else  // the first excursion ends the trail
                        good = good && !inside;
                }
            }
            if (!good) ++bad;
        }
    }
    const bool ok = kmax_ok && npts == 10000 && bad == 0 && skipped == 0;
    return {ok, fmt("formula mismatches %d/10000; trail inconsistencies %d/%d across 5 scenarios",
                    mismatches, bad, npts)};
}

std::pair<bool, std::string> crit_coarea() {
    const auto H = TargetSet::from_points(2, {0.0, 0.0});
    const double exact = 3.0 * std::acos(-1.0);  // area of the radius-1-to-2 annulus

    std::vector<double> grid_a(401);
    for (int i = 0; i <= 400; ++i) grid_a[static_cast<std::size_t>(i)] = 1.0 + i * 0.0025;
    const auto rep_a = coarea_check_radial(H, SetSpec::annulus({0.0, 0.0}, 1.0, 2.0), grid_a, 4096,
                                           400000, 77);
    const bool ok_a = rep_a.pass && std::abs(rep_a.integral - exact) <= 0.01 * exact &&
                      std::abs(rep_a.volume.estimate - exact) <= 0.01 * exact &&
                      std::abs(rep_a.integral - rep_a.volume.estimate) <= 0.01 * exact;

    std::vector<double> grid_b(801);
    for (int i = 0; i <= 800; ++i) grid_b[static_cast<std::size_t>(i)] = 1.0 + i * 0.00125;
    const auto quarter = SetSpec::intersection_of(
        {SetSpec::annulus({0.0, 0.0}, 1.0, 2.0), SetSpec::box({0.0, 0.0}, {2.0, 2.0})});
    const auto rep_b = coarea_check_radial(H, quarter, grid_b, 16384, 400000, 78);
    const bool ok_b = rep_b.pass && std::abs(rep_b.integral - exact / 4.0) <= 0.05 * exact / 4.0;

    return {ok_a && ok_b,
            fmt("annulus: slices %.4f vs volume %.4f vs exact %.4f (1%%); quarter: slices %.4f "
                "vs volume %.4f, |z|=%.2f (3 sigma)",
                rep_a.integral, rep_a.volume.estimate, exact, rep_b.integral,
                rep_b.volume.estimate, std::abs(rep_b.z))};
}

std::pair<bool, std::string> crit_open_closed() {
    const double r = 0.015625;
    const auto gf = generate_input(
        json{{"generator", "lattice-indicator"}, {"L", 1.0}, {"r", r}, {"h", 0.0009765625}});
    const auto gf_half = generate_input(
        json{{"generator", "lattice-indicator"}, {"L", 1.0}, {"r", r}, {"h", 0.00048828125}});
    // Sweep radii at 10.56h * 2^(k/4): no squared offset ties, so the two
    // window conventions must produce identical seminorms.
    const auto sweep = SweepGrid::geometric(0.66 * r, 4.0 * r, std::pow(2.0, 0.25));
    const auto rep = open_closed_agreement(gf.grid, r, sweep, 1.0, 1.0, 0.02, &gf_half.grid);

    const auto diff_cells = rep.detail["differing_cells"].get<long long>();
    const auto diff_cells_half = rep.detail["refined_differing_cells"].get<long long>();
    const double frac = rep.detail["differing_fraction"].get<double>();
    const double frac_half = rep.detail["refined_differing_fraction"].get<double>();
    const double halving = frac_half / frac;
    const bool ok = rep.pass && rep.measured <= 0.02 && diff_cells == 32 && diff_cells_half == 32 &&
                    halving >= 0.375 && halving <= 0.625;
    return {ok, fmt("seminorm gap %.3g (tol 2%%); differing cells %lld/1025 -> %lld/2049, "
                    "fraction ratio %.3f in [0.375, 0.625]",
                    rep.measured, diff_cells, diff_cells_half, halving)};
}

std::pair<bool, std::string> crit_reproducibility() {
    const json grid_sc{{"name", "accept-repro-grid"},
                       {"seed", 5},
                       {"input",
                        {{"generator", "random"},
                         {"seed", 5},
                         {"dim", 2},
                         {"shape", json::array({33, 33})},
                         {"spacing", 0.0625},
                         {"smooth", true}}},
                       {"parameters",
                        {{"r", 0.5},
                         {"alpha", 1.0},
                         {"delta", 0.1},
                         {"mode", "open"},
                         {"sweep", {{"dmin", 0.125}, {"dmax", 2.0}, {"q", 1.189207115002721}}}}},
                       {"checks", json::array({"sweep", "thm1", "sandwich"})}};
    const json mc_sc{{"name", "accept-repro-mc"},
                     {"seed", 9},
                     {"target", {{"sites", json::array({json::array({0.0, 0.0})})}}},
                     {"set",
                      {{"shape", "annulus"},
                       {"params",
                        {{"center", json::array({0.0, 0.0})}, {"inner", 1.0}, {"outer", 1.5}}}}},
                     {"parameters", {{"delta", 0.4}, {"n", 100000}, {"pairs", 2000}}},
                     {"checks", json::array({"thm2", "contraction"})}};

    int files_compared = 0, mismatched = 0;
    bool ok = true;
    for (const auto& j : {grid_sc, mc_sc}) {
        const auto sc = Scenario::from_json(j);
        const fs::path base = fs::temp_directory_path() / ("oscn_accept13_" + sc.name);
        fs::remove_all(base);
        const fs::path d1 = base / "t1", d4 = base / "t4", d1b = base / "t1-again";
        ok = ok && run_scenario(sc, ".", d1, 1).exit_code == 0;
        ok = ok && run_scenario(sc, ".", d4, 4).exit_code == 0;
        ok = ok && run_scenario(sc, ".", d1b, 1).exit_code == 0;
        for (const auto& entry : fs::directory_iterator(d1)) {
            const auto name = entry.path().filename().string();
            if (name == "run_meta.json") continue;  // the only file with timestamps
            const auto ref = slurp(entry.path());
            if (ref != slurp(d4 / name) || ref != slurp(d1b / name)) ++mismatched;
            ++files_compared;
        }
    }
    // 5 files from the grid scenario, 3 from the Monte Carlo one
    return {ok && mismatched == 0 && files_compared == 8,
            fmt("2 scenarios x 3 runs (threads 1/4/1), %d/%d report files byte-identical",
                files_compared - mismatched, files_compared)};
}

}  // namespace

int main() {
    std::printf("acceptance battery: 13 criteria\n");
    run_criterion(1, "r-oscillation seminorm bound battery", crit_bound_battery);
    run_criterion(2, "lattice indicator example", crit_lattice_example);
    run_criterion(3, "disconnected domain example", crit_disconnected_example);
    run_criterion(4, "annulus image-volume ratio", crit_image_volume);
    run_criterion(5, "approach-map contraction", crit_contraction);
    run_criterion(6, "distance derivative bounds", crit_derivative);
    run_criterion(7, "oscillation sandwich exactness", crit_sandwich);
    run_criterion(8, "pushforward density comparison", crit_density);
    run_criterion(9, "dilation continuity modulus", crit_continuity);
    run_criterion(10, "step decomposition consistency", crit_decomposition);
    run_criterion(11, "radial coarea identity", crit_coarea);
    run_criterion(12, "open/closed window agreement", crit_open_closed);
    run_criterion(13, "scenario reproducibility", crit_reproducibility);
    std::printf("%d/13 criteria passed\n", 13 - failures);
    return failures;
}
