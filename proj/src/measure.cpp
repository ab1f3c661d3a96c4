#include "osc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "osc/errors.hpp"
#include "osc/parallel.hpp"
#include "osc/rng.hpp"

namespace osc {

namespace {

constexpr std::uint64_t kChunks = 256;
constexpr std::uint64_t kRetries = 8;

void draw(const CounterRng& rng, const Box& box, std::uint64_t sample, std::uint64_t attempt,
          std::uint64_t n, std::vector<double>& out) {
    const auto d = static_cast<std::size_t>(box.dim());
    const std::uint64_t base = (attempt * n + sample) * d;
    for (std::size_t a = 0; a < d; ++a)
        out[a] = rng.uniform(base + a, box.lo[a], box.hi[a]);
}

}  // namespace

nlohmann::json VolumeEstimate::to_json() const {
    return {{"estimate", json_number(estimate)},
            {"stderr", json_number(stderr_val)},
            {"samples", samples},
            {"hits", hits},
            {"discarded", discarded},
            {"exhausted", exhausted},
            {"seed", seed},
            {"box_lo", box.lo},
            {"box_hi", box.hi}};
}

VolumeEstimate mc_volume(const Membership& member, const Box& box, std::uint64_t n,
                         std::uint64_t seed, int threads) {
    if (n < 1) throw ConfigError("volume estimate: need at least one sample");
    if (box.dim() < 1) throw ConfigError("volume estimate: box must have dimension >= 1");
    for (int a = 0; a < box.dim(); ++a)
        if (!(box.lo[static_cast<std::size_t>(a)] < box.hi[static_cast<std::size_t>(a)]))
            throw ConfigError("volume estimate: degenerate box");

    const CounterRng rng(seed);
    struct ChunkTally {
        std::uint64_t hits = 0, discarded = 0, exhausted = 0;
    };
    std::vector<ChunkTally> tally(kChunks);
    parallel_chunks(kChunks, threads, [&](std::size_t chunk) {
        const std::uint64_t lo = n * chunk / kChunks;
        const std::uint64_t hi = n * (chunk + 1) / kChunks;
        std::vector<double> p(static_cast<std::size_t>(box.dim()));
        auto& t = tally[chunk];
        for (std::uint64_t i = lo; i < hi; ++i) {
            bool resolved = false;
            for (std::uint64_t a = 0; a < kRetries && !resolved; ++a) {
                draw(rng, box, i, a, n, p);
                try {
                    if (member(p)) ++t.hits;
                    resolved = true;
                } catch (const OnTargetSetError&) {
                    ++t.discarded;
                }
            }
            if (!resolved) ++t.exhausted;
        }
    });

    VolumeEstimate est;
    est.samples = n;
    est.seed = seed;
    est.box = box;
    for (const auto& t : tally) {
        est.hits += t.hits;
        est.discarded += t.discarded;
        est.exhausted += t.exhausted;
    }
    const double vol = box.volume();
    const double p_hat = static_cast<double>(est.hits) / static_cast<double>(n);
    est.estimate = vol * p_hat;
    est.stderr_val = vol * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
    return est;
}

std::vector<std::vector<double>> sample_set(const SetSpec& A, std::size_t m, std::uint64_t seed) {
    A.validate();
    const Box box = A.bounding_box();
    for (int a = 0; a < box.dim(); ++a)
        if (!(box.lo[static_cast<std::size_t>(a)] < box.hi[static_cast<std::size_t>(a)]))
            throw ConfigError("set sampling: degenerate bounding box");
    const CounterRng rng(seed);
    const auto d = static_cast<std::size_t>(box.dim());
    std::vector<std::vector<double>> out;
    out.reserve(m);
    std::vector<double> p(d);
    const std::uint64_t budget = 256 * static_cast<std::uint64_t>(m);
    for (std::uint64_t a = 0; a < budget && out.size() < m; ++a) {
        for (std::size_t t = 0; t < d; ++t)
            p[t] = rng.uniform(a * d + t, box.lo[t], box.hi[t]);
        if (A.contains(p)) out.push_back(p);
    }
    if (out.size() < m)
        throw ConfigError("set sampling: acceptance rate too low inside the bounding box");
    return out;
}

double annulus_ratio_exact(int d, double big_r, double delta, double eps) {
    if (d < 1 || !(big_r > 0.0) || !(delta >= 0.0) || delta > big_r || !(eps > 0.0))
        throw ConfigError("annulus ratio: need d >= 1, 0 <= delta <= R, eps > 0");
    const auto dd = static_cast<double>(d);
    const double num = std::pow(big_r - delta + eps, dd) - std::pow(big_r - delta, dd);
    const double den = std::pow(big_r + eps, dd) - std::pow(big_r, dd);
    return num / den;
}

double annulus_ratio_limit(int d, double big_r, double delta) {
    if (d < 1 || !(big_r > 0.0) || !(delta >= 0.0) || delta > big_r)
        throw ConfigError("annulus ratio: need d >= 1, 0 <= delta <= R");
    return std::pow((big_r - delta) / big_r, static_cast<double>(d - 1));
}

namespace {

// clearance inf over A of the site distance, from boundary-biased samples:
// each rejection sample is pushed toward its nearest site by bisection on
// "still inside A", which can only lower the measured minimum while staying
// inside A. The sampled infimum upper-bounds nothing: missing the true inf
// only raises R, which tightens the verdict's bound.
double measure_clearance(const TargetSet& H, const SetSpec& A, std::uint64_t seed) {
    const auto pts = sample_set(A, 10000, seed);
    double best = std::numeric_limits<double>::infinity();
    const auto d = static_cast<std::size_t>(H.dim);
    std::vector<double> probe(d);
    for (const auto& y : pts) {
        const auto proj = project(y, H);
        best = std::min(best, proj.distance);
        if (!(proj.distance > 0.0)) continue;
        const auto site = H.site(proj.site);
        double lo = 0.0, hi = proj.distance;
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double f = mid / proj.distance;
            for (std::size_t a = 0; a < d; ++a) probe[a] = y[a] + f * (site[a] - y[a]);
            if (A.contains(probe)) lo = mid;
            else hi = mid;
        }
        best = std::min(best, proj.distance - lo);
    }
    return best;
}

double ratio_sigma(const VolumeEstimate& num, const VolumeEstimate& den) {
    if (!(den.estimate > 0.0)) return std::numeric_limits<double>::infinity();
    const double a = num.stderr_val / den.estimate;
    const double b = num.estimate * den.stderr_val / (den.estimate * den.estimate);
    return std::sqrt(a * a + b * b);
}

}  // namespace

nlohmann::json Thm2Report::to_json() const {
    nlohmann::json j;
    j["check"] = "thm2";
    j["inputs"] = {{"target", target},
                   {"set", set_spec},
                   {"delta", delta},
                   {"R", json_number(big_r)},
                   {"R_pinned", big_r_pinned}};
    j["measured"] = json_number(ratio);
    j["bound"] = json_number(bound);
    j["slack"] = json_number(ratio - bound);
    j["sigma"] = json_number(sigma);
    j["verdict"] = pass ? "pass" : "fail";
    j["detail"] = {{"volume_A", vol_a.to_json()},
                   {"volume_image", vol_image.to_json()},
                   {"z", json_number(z)}};
    return j;
}

Thm2Report thm2_check(const TargetSet& H, const SetSpec& A, double delta, std::uint64_t n,
                      std::uint64_t seed, int threads, std::optional<double> pin_big_r) {
    H.validate();
    A.validate();
    if (A.dim() != H.dim) throw ConfigError("image-volume check: dimension mismatch");
    if (!(delta >= 0.0)) throw ConfigError("image-volume check: step must be nonnegative");

    Thm2Report rep;
    rep.target = H.to_json();
    rep.set_spec = A.to_json();
    rep.delta = delta;
    rep.big_r_pinned = pin_big_r.has_value();
    rep.big_r = pin_big_r ? *pin_big_r : measure_clearance(H, A, seed + 2);
    if (rep.big_r < delta)
        throw HypothesisError("image-volume check needs clearance R >= delta");

    rep.vol_a = mc_volume([&](std::span<const double> p) { return A.contains(p); },
                          A.bounding_box(), n, seed, threads);
    const Box image_box = Box::hull_of(A.bounding_box(), H.bounding_box());
    rep.vol_image = mc_volume(
        [&](std::span<const double> p) { return tdelta_image_membership(p, H, delta, A); },
        image_box, n, seed + 1, threads);
    if (!(rep.vol_a.estimate > 0.0))
        throw ConfigError("image-volume check: set A measured zero volume");

    rep.ratio = rep.vol_image.estimate / rep.vol_a.estimate;
    rep.bound = annulus_ratio_limit(H.dim, rep.big_r, delta);
    rep.sigma = ratio_sigma(rep.vol_image, rep.vol_a);
    rep.z = rep.sigma > 0.0 ? (rep.ratio - rep.bound) / rep.sigma
                            : std::numeric_limits<double>::infinity();
    rep.pass = rep.ratio >= rep.bound - 3.0 * rep.sigma;
    return rep;
}

nlohmann::json CoareaReport::to_json() const {
    nlohmann::json j;
    j["check"] = "coarea";
    j["inputs"] = {{"slices", slices.size()}, {"volume_samples", volume.samples}};
    j["measured"] = json_number(integral);
    j["bound"] = json_number(volume.estimate);
    j["slack"] = json_number(3.0 * sigma - std::abs(integral - volume.estimate));
    j["sigma"] = json_number(sigma);
    j["verdict"] = pass ? "pass" : "fail";
    j["detail"] = {{"integral_stderr", json_number(integral_stderr)},
                   {"volume", volume.to_json()},
                   {"z", json_number(z)}};
    return j;
}

void CoareaReport::write_csv(std::ostream& out) const {
    out << "t,length,stderr\n";
    for (const auto& s : slices)
        out << format_double(s.t) << ',' << format_double(s.length) << ','
            << format_double(s.stderr_val) << '\n';
}

CoareaReport coarea_check_radial(const TargetSet& H, const SetSpec& A,
                                 const std::vector<double>& t_grid,
                                 std::uint64_t angular_samples, std::uint64_t volume_samples,
                                 std::uint64_t seed, int threads) {
    H.validate();
    A.validate();
    if (H.count() != 1 || H.dim != 2)
        throw HypothesisError("radial slice check needs a single 2-D site");
    if (t_grid.size() < 2) throw ConfigError("radial slice check: need at least two radii");
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        if (!(t >= 0.0) || !(t > prev))
            throw ConfigError("radial slice check: radii must be nonnegative and increasing");
        prev = t;
    }
    if (angular_samples < 1) throw ConfigError("radial slice check: need angular samples");

    const auto site = H.site(0);
    const CounterRng rng(seed + 3);
    CoareaReport rep;
    rep.slices.resize(t_grid.size());
    const double two_pi = 2.0 * std::acos(-1.0);
    parallel_chunks(t_grid.size(), threads, [&](std::size_t j) {
        const double t = t_grid[j];
        std::uint64_t hits = 0;
        double p[2];
        for (std::uint64_t k = 0; k < angular_samples; ++k) {
            const double theta = rng.uniform(j * angular_samples + k, 0.0, two_pi);
            p[0] = site[0] + t * std::cos(theta);
            p[1] = site[1] + t * std::sin(theta);
            if (A.contains(p)) ++hits;
        }
        const double frac = static_cast<double>(hits) / static_cast<double>(angular_samples);
        rep.slices[j].t = t;
        rep.slices[j].length = two_pi * t * frac;
        rep.slices[j].stderr_val =
            two_pi * t * std::sqrt(frac * (1.0 - frac) / static_cast<double>(angular_samples));
    });

    double integral = 0.0, var = 0.0;
    std::vector<double> w(t_grid.size(), 0.0);
    for (std::size_t j = 0; j + 1 < t_grid.size(); ++j) {
        const double dt = t_grid[j + 1] - t_grid[j];
        w[j] += 0.5 * dt;
        w[j + 1] += 0.5 * dt;
    }
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        integral += w[j] * rep.slices[j].length;
        var += w[j] * w[j] * rep.slices[j].stderr_val * rep.slices[j].stderr_val;
    }
    rep.integral = integral;
    rep.integral_stderr = std::sqrt(var);

    rep.volume = mc_volume([&](std::span<const double> p) { return A.contains(p); },
                           A.bounding_box(), volume_samples, seed, threads);
    rep.sigma = std::sqrt(rep.integral_stderr * rep.integral_stderr +
                          rep.volume.stderr_val * rep.volume.stderr_val);
    const double gap = std::abs(rep.integral - rep.volume.estimate);
    rep.z = rep.sigma > 0.0 ? gap / rep.sigma : std::numeric_limits<double>::infinity();
    rep.pass = gap <= 3.0 * rep.sigma;
    return rep;
}

CheckReport lemma3_ratio_check(const TargetSet& H, const SetSpec& A, double r, double delta,
                               std::uint64_t n, std::uint64_t seed, int threads) {
    H.validate();
    A.validate();
    const int d = H.dim;
    if (A.dim() != d) throw ConfigError("step-image ratio check: dimension mismatch");
    if (!(delta > 0.0) || !(delta < r / static_cast<double>(2 * d + 1)))
        throw HypothesisError("step-image ratio check needs delta < r/(2d+1)");

    // A must sit inside the r+delta collar of the sites
    const auto probes = sample_set(A, 10000, seed + 4);
    for (const auto& y : probes) {
        if (project(y, H).distance >= (r + delta) * (1.0 + 1e-9))
            throw HypothesisError("step-image ratio check needs A inside the r+delta collar");
    }

    const auto vol_a = mc_volume([&](std::span<const double> p) { return A.contains(p); },
                                 A.bounding_box(), n, seed, threads);
    const Box image_box = Box::hull_of(A.bounding_box(), H.bounding_box());
    const auto vol_tee = mc_volume(
        [&](std::span<const double> p) { return tee_membership(p, A, H, r, delta); }, image_box,
        n, seed + 1, threads);
    if (!(vol_a.estimate > 0.0))
        throw ConfigError("step-image ratio check: set A measured zero volume");

    const double factor = 1.0 - 2.0 * d * delta / (r - delta);
    const double ratio = vol_tee.estimate / vol_a.estimate;
    const double sigma = ratio_sigma(vol_tee, vol_a);

    // decomposition tallies over classified samples
    std::map<std::string, std::uint64_t> labels;
    std::uint64_t ties = 0;
    for (const auto& y : probes) {
        const auto cls = ak_classify(y, A, H, r, delta);
        ++labels[cls.label_string()];
        if (cls.tie_seen) ++ties;
    }
    nlohmann::json label_counts = nlohmann::json::object();
    for (const auto& [k, v] : labels) label_counts[k] = v;

    CheckReport rep;
    rep.check = "lemma3";
    rep.inputs = {{"r", r}, {"delta", delta}, {"samples", n}, {"seed", seed}};
    rep.measured = ratio;
    rep.bound = factor;
    rep.slack = ratio - factor;
    rep.sigma = sigma;
    rep.pass = ratio >= factor - 3.0 * sigma;
    rep.detail = {{"volume_A", vol_a.to_json()},
                  {"volume_tee", vol_tee.to_json()},
                  {"z", json_number(sigma > 0.0 ? (ratio - factor) / sigma
                                                : std::numeric_limits<double>::infinity())},
                  {"class_counts", label_counts},
                  {"classified_samples", probes.size()},
                  {"tie_count", ties}};
    return rep;
}

}  // namespace osc
