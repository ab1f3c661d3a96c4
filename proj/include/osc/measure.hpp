#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "osc/approach.hpp"
#include "osc/report.hpp"
#include "osc/setspec.hpp"

namespace osc {

using Membership = std::function<bool(std::span<const double>)>;

struct VolumeEstimate {
    double estimate = 0.0;
    double stderr_val = 0.0;  // box_vol * sqrt(p(1-p)/n)
    std::uint64_t samples = 0;
    std::uint64_t hits = 0;
    std::uint64_t discarded = 0;  // on-target-set redraws
    std::uint64_t exhausted = 0;  // samples whose redraw budget ran out (count as misses)
    std::uint64_t seed = 0;
    Box box;

    nlohmann::json to_json() const;
};

// Box-sampling hit-fraction volume estimator on the counter PRNG: a fixed
// seed gives an identical sample stream and identical result on every
// platform and thread count (sampling splits into fixed chunks merged in
// order). Membership may throw OnTargetSetError; the sample is redrawn from
// a fresh counter block, up to 8 attempts.
VolumeEstimate mc_volume(const Membership& member, const Box& box, std::uint64_t n,
                         std::uint64_t seed, int threads = 1);

// Up to m points of A by rejection from its bounding box; deterministic for
// a fixed seed. Fails (ConfigError) if the acceptance rate collapses.
std::vector<std::vector<double>> sample_set(const SetSpec& A, std::size_t m, std::uint64_t seed);

// ((R-delta+eps)^d - (R-delta)^d) / ((R+eps)^d - R^d): the shell-volume
// ratio showing the image bound is sharp on annuli.
double annulus_ratio_exact(int d, double big_r, double delta, double eps);
// Its eps -> 0 limit ((R-delta)/R)^(d-1), the bound of the image-volume theorem.
double annulus_ratio_limit(int d, double big_r, double delta);

struct Thm2Report {
    nlohmann::json target, set_spec;
    double delta = 0.0;
    double big_r = 0.0;  // measured (or pinned) clearance inf over A of d(.,H)
    bool big_r_pinned = false;
    VolumeEstimate vol_a, vol_image;
    double ratio = 0.0;
    double bound = 0.0;  // ((R-delta)/R)^(d-1)
    double sigma = 0.0;  // combined standard error of the ratio
    double z = 0.0;
    bool pass = false;

    nlohmann::json to_json() const;
};

// Verifies Leb(T_delta A) >= ((R-delta)/R)^(d-1) Leb(A) by Monte Carlo on
// the image-membership oracle. R is the minimum site distance over 10^4
// boundary-biased samples of A unless pinned. Verdict allows 3 combined
// standard errors; the z-score makes marginal cases visible.
Thm2Report thm2_check(const TargetSet& H, const SetSpec& A, double delta, std::uint64_t n,
                      std::uint64_t seed, int threads = 1,
                      std::optional<double> pin_big_r = std::nullopt);

struct CoareaSlice {
    double t = 0.0;
    double length = 0.0;  // 2 pi t * angular hit fraction
    double stderr_val = 0.0;
};

struct CoareaReport {
    std::vector<CoareaSlice> slices;
    double integral = 0.0;  // trapezoid over the t grid
    double integral_stderr = 0.0;
    VolumeEstimate volume;
    double sigma = 0.0;  // combined
    double z = 0.0;
    bool pass = false;

    nlohmann::json to_json() const;
    void write_csv(std::ostream& out) const;  // header: t,length,stderr
};

// Radial level-slice decomposition around a single 2-D site: the integral
// over t of the length of {x in A : d(x, site) = t} must reproduce the
// Monte Carlo area of A within 3 combined standard errors.
CoareaReport coarea_check_radial(const TargetSet& H, const SetSpec& A,
                                 const std::vector<double>& t_grid,
                                 std::uint64_t angular_samples, std::uint64_t volume_samples,
                                 std::uint64_t seed, int threads = 1);

// Verifies Leb of (A intersect collar(r-delta)) union (2 delta)-step image
// of A against the factor (1 - 2 d delta/(r-delta)) times Leb(A), with 3
// sigma allowance; samples of A are classified by the step decomposition
// and the per-label counts reported. Requires A inside the r+delta collar.
CheckReport lemma3_ratio_check(const TargetSet& H, const SetSpec& A, double r, double delta,
                               std::uint64_t n, std::uint64_t seed, int threads = 1);

}  // namespace osc
