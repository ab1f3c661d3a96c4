#include "osc/seminorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "osc/errors.hpp"
#include "osc/hull.hpp"
#include "osc/rng.hpp"

namespace osc {

SweepGrid SweepGrid::geometric(double dmin, double dmax, double q) {
    if (!(dmin > 0.0) || !(dmax >= dmin) || !(q > 1.0))
        throw ConfigError("sweep: geometric rule needs 0 < dmin <= dmax and ratio > 1");
    SweepGrid s;
    // relative guard so dmax itself survives accumulated rounding
    for (double v = dmin; v <= dmax * (1.0 + 1e-12); v *= q) s.deltas.push_back(std::min(v, dmax));
    s.validate();
    return s;
}

SweepGrid SweepGrid::from_list(std::vector<double> deltas) {
    SweepGrid s;
    s.deltas = std::move(deltas);
    s.validate();
    return s;
}

SweepGrid SweepGrid::default_for(const GridFunction& g) {
    const double dmin = 2.0 * g.spacing;
    const double dmax = std::max(domain_bbox_diameter(g), dmin);
    return geometric(dmin, dmax, std::pow(2.0, 0.25));
}

void SweepGrid::validate() const {
    if (deltas.empty()) throw ConfigError("sweep: no radii");
    double prev = 0.0;
    for (double d : deltas) {
        if (!(d > prev)) throw ConfigError("sweep: radii must be positive and strictly increasing");
        prev = d;
    }
}

nlohmann::json SweepReport::to_json() const {
    nlohmann::json j;
    j["check"] = "sweep";
    j["inputs"] = {{"alpha", alpha}, {"c", c}, {"mode", to_string(mode)}};
    auto arr = nlohmann::json::array();
    for (const auto& e : entries)
        arr.push_back({{"delta", e.delta},
                       {"I", json_number(e.integral)},
                       {"I_over_delta_alpha", json_number(e.ratio)}});
    j["entries"] = arr;
    j["seminorm"] = json_number(seminorm);
    j["argmax_delta"] = argmax_delta;
    j["seminorm_is_lower_bound"] = true;
    if (delta_min_flagged) j["delta_min_below_2h"] = true;
    return j;
}

void SweepReport::write_csv(std::ostream& out) const {
    out << "delta,I,I_over_delta_alpha\n";
    for (const auto& e : entries)
        out << format_double(e.delta) << ',' << format_double(e.integral) << ','
            << format_double(e.ratio) << '\n';
}

SweepReport osc_integral_sweep(const GridFunction& g, BallMode mode, const SweepGrid& sweep,
                               double alpha, double c) {
    sweep.validate();
    if (!(alpha > 0.0) || !(alpha <= 1.0)) throw ConfigError("sweep: alpha must lie in (0, 1]");
    const double diam = domain_bbox_diameter(g);
    if (diam > 0.0 && sweep.deltas.back() > diam * (1.0 + 1e-9))
        throw ConfigError("sweep: largest radius exceeds the domain diameter");

    SweepReport rep;
    rep.alpha = alpha;
    rep.c = c;
    rep.mode = mode;
    rep.delta_min_flagged = sweep.deltas.front() < 2.0 * g.spacing;
    rep.seminorm = -std::numeric_limits<double>::infinity();
    for (double d : sweep.deltas) {
        SweepEntry e;
        e.delta = d;
        e.integral = integrate(oscillation(g, d, mode), c);
        e.ratio = e.integral / std::pow(d, alpha);
        if (e.ratio > rep.seminorm) {
            rep.seminorm = e.ratio;
            rep.argmax_delta = d;
        }
        rep.entries.push_back(e);
    }
    return rep;
}

double gen_holder_seminorm(const GridFunction& g, BallMode mode, const SweepGrid& sweep,
                           double alpha, double c) {
    return osc_integral_sweep(g, mode, sweep, alpha, c).seminorm;
}

nlohmann::json Thm1Report::to_json() const {
    nlohmann::json j;
    j["check"] = "thm1";
    j["inputs"] = {{"r", r},         {"alpha", alpha},
                   {"mode", to_string(mode)},
                   {"rel_tol", rel_tol},
                   {"sup_f", json_number(pre_shift_max)},
                   {"inf_f", json_number(pre_shift_min)}};
    j["measured"] = json_number(lhs);
    j["bound"] = json_number(rhs);
    j["slack"] = json_number(slack);
    j["sigma"] = 0.0;
    j["verdict"] = pass ? "pass" : "fail";
    j["detail"] = {{"M", json_number(m_range)},
                   {"hull_volume", json_number(hull_volume)},
                   {"argmax_delta", argmax_delta}};
    return j;
}

Thm1Report thm1_check(const GridFunction& g, double r, double alpha, BallMode mode,
                      const SweepGrid& sweep, double c, double rel_tol,
                      std::optional<double> hull_volume_override) {
    if (!(r > 0.0)) throw ConfigError("thm1: radius must be positive");
    Thm1Report rep;
    rep.r = r;
    rep.alpha = alpha;
    rep.mode = mode;
    rep.rel_tol = rel_tol;
    rep.pre_shift_min = masked_min(g);
    rep.pre_shift_max = masked_max(g);
    rep.m_range = rep.pre_shift_max - rep.pre_shift_min;

    const auto hull = convex_hull_volume(g, hull_volume_override);
    rep.hull_volume = hull.volume;

    const auto gs = shift_to_nonnegative(g);
    const auto w = oscillation(gs, r, mode);
    const auto sw = osc_integral_sweep(w, mode, sweep, alpha, c);
    rep.lhs = sw.seminorm;
    rep.argmax_delta = sw.argmax_delta;

    const int d = g.dim;
    rep.rhs = 2.0 * rep.m_range * (c * hull.volume) *
              std::pow(static_cast<double>(2 * d + 1) / r, alpha);
    rep.slack = rep.rhs - rep.lhs;
    rep.pass = rep.lhs <= rep.rhs * (1.0 + rel_tol);
    return rep;
}

CheckReport sandwich_check(const GridFunction& g, double r, double delta, BallMode mode) {
    if (!(delta > 0.0) || !(delta < r))
        throw HypothesisError("sandwich needs 0 < delta < r");
    const auto ge = extend_to_hull(g);
    const auto g1 = dilate(ge, r, mode);
    const auto lhs = oscillation(g1, delta, BallMode::open);
    const auto h1 = dilate(ge, r + delta, BallMode::open);
    const auto h2 = dilate(ge, r - delta, BallMode::open);

    CheckReport rep;
    rep.check = "sandwich";
    rep.inputs = {{"r", r}, {"delta", delta}, {"mode", to_string(mode)}};
    std::size_t violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ge.size(); ++i) {
        if (!ge.mask[i]) continue;
        const double gap = lhs.values[i] - (h1.values[i] - h2.values[i]);
        worst = std::max(worst, gap);
        if (gap > 0.0) ++violations;
    }
    rep.measured = worst;
    rep.bound = 0.0;
    rep.slack = rep.bound - worst;  // 0 - 0 stays +0 in the report
    rep.sigma = 0.0;
    rep.pass = violations == 0;
    rep.detail = {{"violations", violations}, {"cells", ge.masked_count()}};
    return rep;
}

double default_eps_stat(const GridFunction& g, double c) {
    return 3.0 * c * std::pow(g.spacing, g.dim) *
           static_cast<double>(perimeter_cell_count(g));
}

std::vector<std::pair<double, double>> default_density_intervals(double lo, double hi,
                                                                 std::uint64_t seed) {
    std::vector<std::pair<double, double>> out;
    const double w = (hi - lo) / 50.0;
    for (int k = 0; k < 50; ++k)
        out.emplace_back(lo + w * k, lo + w * (k + 1));
    CounterRng rng(seed);
    for (std::uint64_t j = 0; j < 50; ++j) {
        const double u1 = rng.uniform(2 * j, lo, hi);
        const double u2 = rng.uniform(2 * j + 1, lo, hi);
        out.emplace_back(std::min(u1, u2), std::max(u1, u2));
    }
    return out;
}

nlohmann::json DensityReport::to_json() const {
    nlohmann::json j;
    j["check"] = "density";
    j["inputs"] = {{"r", r}, {"delta", delta}, {"intervals", intervals.size()}};
    j["measured"] = json_number(measured);
    j["bound"] = json_number(eps_stat);
    j["slack"] = json_number(eps_stat - measured);
    j["sigma"] = 0.0;
    j["verdict"] = pass ? "pass" : "fail";
    auto arr = nlohmann::json::array();
    for (const auto& iv : intervals)
        arr.push_back({{"lo", json_number(iv.lo)},
                       {"hi", json_number(iv.hi)},
                       {"mu1", json_number(iv.mu1)},
                       {"mu2", json_number(iv.mu2)}});
    j["detail"] = {{"density_bound", json_number(density_bound)}, {"intervals", arr}};
    return j;
}

DensityReport pushforward_density_check(const GridFunction& g, double r, double delta,
                                        const std::vector<std::pair<double, double>>& intervals,
                                        double c, std::optional<double> eps_stat_override) {
    const int d = g.dim;
    if (!(delta > 0.0) || !(delta < r / static_cast<double>(2 * d + 1)))
        throw HypothesisError("pushforward density needs delta < r/(2d+1)");
    if (intervals.empty()) throw ConfigError("density check needs at least one interval");
    for (const auto& [a, b] : intervals)
        if (!std::isfinite(a) || !std::isfinite(b) || a > b)
            throw ConfigError("density check: malformed interval");

    const auto h1 = dilate(g, r + delta, BallMode::open);
    const auto h2 = dilate(g, r - delta, BallMode::open);
    const double cell = c * std::pow(g.spacing, d);

    DensityReport rep;
    rep.r = r;
    rep.delta = delta;
    rep.density_bound = 1.0 / (1.0 - 2.0 * d * delta / (r - delta));
    rep.eps_stat = eps_stat_override ? *eps_stat_override : default_eps_stat(g, c);
    rep.measured = -std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : intervals) {
        std::size_t n1 = 0, n2 = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g.mask[i]) continue;
            if (h1.values[i] > a && h1.values[i] < b) ++n1;
            if (h2.values[i] > a && h2.values[i] < b) ++n2;
        }
        DensityInterval iv;
        iv.lo = a;
        iv.hi = b;
        iv.mu1 = cell * static_cast<double>(n1);
        iv.mu2 = cell * static_cast<double>(n2);
        rep.intervals.push_back(iv);
        rep.measured = std::max(rep.measured, iv.mu1 - rep.density_bound * iv.mu2);
    }
    rep.pass = rep.measured <= rep.eps_stat;
    return rep;
}

CheckReport continuity_modulus_check(const GridFunction& g, double r, double delta, double c,
                                     std::optional<double> eps_stat_override) {
    const int d = g.dim;
    if (!(delta > 0.0) || !(delta < r / static_cast<double>(2 * d + 1)))
        throw HypothesisError("continuity modulus needs delta < r/(2d+1)");

    const auto gs = shift_to_nonnegative(g);
    const double m_range = masked_max(gs);
    const double mu_d = mask_measure(gs, c);
    const double g1_hi = integrate(dilate(gs, r + delta, BallMode::open), c);
    const double g1_lo = integrate(dilate(gs, r - delta, BallMode::open), c);
    const double g2_hi = integrate(erode(gs, r + delta, BallMode::open), c);
    const double g2_lo = integrate(erode(gs, r - delta, BallMode::open), c);

    const double eps = eps_stat_override ? *eps_stat_override : default_eps_stat(g, c);
    const double diff1 = g1_hi - g1_lo;
    const double diff2 = g2_lo - g2_hi;  // erosion shrinks as the radius grows

    CheckReport rep;
    rep.check = "continuity";
    rep.inputs = {{"r", r}, {"delta", delta}, {"c", c}};
    rep.measured = std::max(diff1, diff2);
    rep.bound = static_cast<double>(2 * d + 1) * (delta / r) * m_range * mu_d + eps;
    rep.slack = rep.bound - rep.measured;
    rep.sigma = 0.0;
    rep.pass = rep.measured <= rep.bound;
    rep.detail = {{"G1_diff", json_number(diff1)},
                  {"G2_diff", json_number(diff2)},
                  {"I_diff", json_number((g1_hi - g2_hi) - (g1_lo - g2_lo))},
                  {"M", json_number(m_range)},
                  {"mu_D", json_number(mu_d)},
                  {"eps_stat", json_number(eps)}};
    return rep;
}

CheckReport open_closed_agreement(const GridFunction& g, double r, const SweepGrid& sweep,
                                  double alpha, double c, double rel_tol,
                                  const GridFunction* refined) {
    const auto diff_fraction = [r](const GridFunction& grid) {
        const auto a = oscillation(grid, r, BallMode::open);
        const auto b = oscillation(grid, r, BallMode::closed);
        std::size_t diff = 0, total = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!grid.mask[i]) continue;
            ++total;
            if (a.values[i] != b.values[i]) ++diff;
        }
        return std::pair<std::size_t, std::size_t>(diff, total);
    };

    const auto [diff, total] = diff_fraction(g);
    const double frac = static_cast<double>(diff) / static_cast<double>(total);
    const double sem_open = gen_holder_seminorm(g, BallMode::open, sweep, alpha, c);
    const double sem_closed = gen_holder_seminorm(g, BallMode::closed, sweep, alpha, c);
    const double scale = std::max(std::abs(sem_open), std::abs(sem_closed));
    const double rel_diff = scale > 0.0 ? std::abs(sem_open - sem_closed) / scale : 0.0;

    CheckReport rep;
    rep.check = "open_closed";
    rep.inputs = {{"r", r}, {"alpha", alpha}, {"rel_tol", rel_tol}};
    rep.measured = rel_diff;
    rep.bound = rel_tol;
    rep.slack = rel_tol - rel_diff;
    rep.sigma = 0.0;
    rep.detail = {{"seminorm_open", json_number(sem_open)},
                  {"seminorm_closed", json_number(sem_closed)},
                  {"differing_cells", diff},
                  {"cells", total},
                  {"differing_fraction", json_number(frac)}};
    bool refinement_ok = true;
    if (refined != nullptr) {
        const auto [diff2, total2] = diff_fraction(*refined);
        const double frac2 = static_cast<double>(diff2) / static_cast<double>(total2);
        refinement_ok = frac2 <= frac + 1e-15;
        rep.detail["refined_differing_cells"] = diff2;
        rep.detail["refined_cells"] = total2;
        rep.detail["refined_differing_fraction"] = json_number(frac2);
        rep.detail["refined_spacing"] = refined->spacing;
    }
    rep.pass = rel_diff <= rel_tol && refinement_ok;
    return rep;
}

}  // namespace osc
