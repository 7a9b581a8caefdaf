#pragma once

#include "sectorfhc/sector.hpp"
#include "sectorfhc/sector_set.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sectorfhc {

/// card(S ∩ [0, N]) / (N + 1) for a sorted, duplicate-free integer set.
double integer_density_prefix(std::span<const std::uint64_t> sorted_set, std::uint64_t horizon);

/// Same ratio for a set given by a membership test, enumerated over [0, N].
double integer_density_prefix(const std::function<bool(std::uint64_t)>& member, std::uint64_t horizon);

/// How sector_lower_density evaluates m(A ∩ Delta_t).
struct EstimationMethod {
    enum class Kind { exact, monte_carlo };

    Kind kind = Kind::exact;
    std::uint64_t seed = 0;
    std::size_t samples = 0;      // per horizon
    std::size_t strata_per_axis = 16;
    unsigned workers = 0;         // 0 selects the hardware concurrency

    static EstimationMethod exact(unsigned workers = 0);
    static EstimationMethod monte_carlo(std::uint64_t seed, std::size_t samples, unsigned workers = 0);
};

/// Finite-horizon view of the lower density m(A ∩ Delta_t) / (alpha t^2).
struct DensityEstimate {
    std::vector<double> horizons;
    std::vector<double> ratios;
    std::vector<double> halfwidths; // zero for exact evaluation
    double liminf_proxy = 0.0;      // min over the last ceil(m/3) ratios
    EstimationMethod method;

    /// RFC-4180 CSV with header "horizon,ratio,halfwidth".
    std::string to_csv() const;
};

/// t_i = t0 * 2^(i/4), i = 0..count-1.
std::vector<double> geometric_horizons(double t0, std::size_t count);

/// Number of trailing horizons that feed the liminf proxy, ceil(m/3).
std::size_t liminf_window(std::size_t horizon_count) noexcept;

/// Estimates the ratios m(A ∩ Delta_t) / (alpha t^2) over a strictly increasing
/// schedule. Exact sets are evaluated by exact area with pairwise
/// inclusion-exclusion; predicate sets by stratified sampling that is uniform
/// in (r^2, theta). Sampling results depend only on the seed, never on the
/// worker count.
DensityEstimate sector_lower_density(const SectorSet& set, std::span<const double> horizons,
                                     const EstimationMethod& method);

/// Union areas m(A ∩ Delta_t) for an exact set, one per horizon.
std::vector<double> exact_union_areas(const SectorSet& set, std::span<const double> horizons, unsigned workers = 0);

/// Pairwise disjoint integer sets A(l, r_l) with the separation
/// n >= r_l and |n - m| >= r_l + r_k, plus the point sets
/// B(l, r_l) obtained by spacing points r_l apart on the vertical cuts at
/// each n in A(l, r_l). Levels are numbered from 1.
class SeparatedFamily {
public:
    const Sector& sector() const noexcept { return sector_; }
    std::size_t levels() const noexcept { return separations_.size(); }
    std::uint64_t separation(std::size_t level) const { return separations_.at(level - 1); }
    const std::vector<std::uint64_t>& separations() const noexcept { return separations_; }
    std::uint64_t integer_horizon() const noexcept { return integer_horizon_; }

    /// A(l, r_l) ∩ [0, N*], sorted.
    const std::vector<std::uint64_t>& integer_set(std::size_t level) const { return integer_sets_.at(level - 1); }

    /// Certified finite-horizon density proxy d_l > 0.
    double density_bound(std::size_t level) const { return density_bounds_.at(level - 1); }
    const std::vector<double>& density_bounds() const noexcept { return density_bounds_; }

    /// Whether the vertical cut at n is long enough to carry points at level l.
    bool carries_points(std::size_t level, std::uint64_t n) const;

    /// B(l, r_l) ∩ {|b| <= max_modulus}, ordered by abscissa then by
    /// decreasing imaginary part.
    std::vector<SectorPoint> points(std::size_t level, double max_modulus) const;

private:
    friend SeparatedFamily build_separated_family(std::span<const std::uint64_t>, std::uint64_t, const Sector&);
    explicit SeparatedFamily(const Sector& sector) : sector_(sector) {}

    Sector sector_;
    std::vector<std::uint64_t> separations_;
    std::uint64_t integer_horizon_ = 0;
    std::vector<std::vector<std::uint64_t>> integer_sets_;
    std::vector<double> density_bounds_;
};

/// Dyadic-block allocation: block [2^j, 2^{j+1}) belongs to level
/// min(v2(j) + 1, L); inside an owned block the level takes
/// 2^j + R + 2 R i up to 2^{j+1} - R, with R = max r_l.
/// Throws HorizonTooSmall when some level receives no element below N*.
SeparatedFamily build_separated_family(std::span<const std::uint64_t> separations, std::uint64_t integer_horizon,
                                       const Sector& sector);

struct ReturnSetBound {
    double bound = 0.0; // d_l delta^2 tan(alpha) / r_l
    SectorSet set;      // B(l, r_l) + Delta_delta, anchors with |b| <= point_horizon
};

/// Closed-form lower bound on the density of B(l, r_l) + Delta_delta and the
/// exact set itself for direct evaluation at horizons up to point_horizon.
ReturnSetBound return_set_density_bound(const SeparatedFamily& family, std::size_t level, double delta,
                                        double point_horizon);

} // namespace sectorfhc
