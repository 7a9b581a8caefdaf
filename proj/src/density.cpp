#include "sectorfhc/density.hpp"

#include "sectorfhc/error.hpp"
#include "sectorfhc/sampling.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

namespace sectorfhc {

double integer_density_prefix(std::span<const std::uint64_t> sorted_set, std::uint64_t horizon)
{
    const auto end = std::upper_bound(sorted_set.begin(), sorted_set.end(), horizon);
    const auto count = static_cast<double>(std::distance(sorted_set.begin(), end));
    return count / (static_cast<double>(horizon) + 1.0);
}

double integer_density_prefix(const std::function<bool(std::uint64_t)>& member, std::uint64_t horizon)
{
    std::uint64_t count = 0;
    for (std::uint64_t n = 0; n <= horizon; ++n) {
        if (member(n))
            ++count;
        if (n == UINT64_MAX)
            break;
    }
    return static_cast<double>(count) / (static_cast<double>(horizon) + 1.0);
}

EstimationMethod EstimationMethod::exact(unsigned workers)
{
    EstimationMethod m;
    m.kind = Kind::exact;
    m.workers = workers;
    return m;
}

EstimationMethod EstimationMethod::monte_carlo(std::uint64_t seed, std::size_t samples, unsigned workers)
{
    EstimationMethod m;
    m.kind = Kind::monte_carlo;
    m.seed = seed;
    m.samples = samples;
    m.workers = workers;
    return m;
}

std::string DensityEstimate::to_csv() const
{
    std::string out = "horizon,ratio,halfwidth\r\n";
    char line[128];
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\r\n", horizons[i], ratios[i], halfwidths[i]);
        out += line;
    }
    return out;
}

std::vector<double> geometric_horizons(double t0, std::size_t count)
{
    if (!(t0 > 0.0) || !std::isfinite(t0))
        throw InputError("initial horizon must be positive");
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(t0 * std::exp2(static_cast<double>(i) / 4.0));
    return out;
}

std::size_t liminf_window(std::size_t horizon_count) noexcept
{
    return (horizon_count + 2) / 3;
}

namespace {

void validate_horizons(std::span<const double> horizons)
{
    if (horizons.empty())
        throw InputError("horizon schedule is empty");
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (!(horizons[i] > 0.0) || !std::isfinite(horizons[i]))
            throw InputError("horizons must be positive and finite");
        if (i > 0 && !(horizons[i] > horizons[i - 1]))
            throw InputError("horizons must be strictly increasing");
    }
}

std::uint64_t cell_key(std::int64_t i, std::int64_t j)
{
    return (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(j));
}

// Pairs of primitives whose bounding boxes overlap with positive area;
// unbounded primitives pair with everything.
std::vector<std::pair<std::size_t, std::size_t>> candidate_pairs(const SectorSet& set)
{
    const std::size_t n = set.primitives().size();
    std::vector<std::size_t> unbounded;
    std::vector<std::array<double, 4>> boxes(n);
    std::vector<bool> bounded(n, false);
    double cell = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (auto b = set.bounds(i)) {
            boxes[i] = *b;
            bounded[i] = true;
            cell = std::max({cell, (*b)[2] - (*b)[0], (*b)[3] - (*b)[1]});
        } else {
            unbounded.push_back(i);
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t u : unbounded)
        for (std::size_t j = 0; j < n; ++j)
            if (j != u && (bounded[j] || j > u))
                pairs.emplace_back(std::min(u, j), std::max(u, j));

    if (cell > 0.0) {
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
        auto index = [&](double v) { return static_cast<std::int64_t>(std::floor(v / cell)); };
        for (std::size_t i = 0; i < n; ++i) {
            if (!bounded[i])
                continue;
            const auto& b = boxes[i];
            for (auto gx = index(b[0]); gx <= index(b[2]); ++gx)
                for (auto gy = index(b[1]); gy <= index(b[3]); ++gy)
                    grid[cell_key(gx, gy)].push_back(i);
        }
        for (const auto& [key, members] : grid) {
            for (std::size_t a = 0; a < members.size(); ++a)
                for (std::size_t b = a + 1; b < members.size(); ++b) {
                    const auto& p = boxes[members[a]];
                    const auto& q = boxes[members[b]];
                    if (p[0] < q[2] && q[0] < p[2] && p[1] < q[3] && q[1] < p[3])
                        pairs.emplace_back(std::min(members[a], members[b]), std::max(members[a], members[b]));
                }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

} // namespace

std::vector<double> exact_union_areas(const SectorSet& set, std::span<const double> horizons, unsigned workers)
{
    if (!set.is_exact())
        throw InputError("exact evaluation requires an exact sector set");
    validate_horizons(horizons);
    const std::size_t n = set.primitives().size();
    const double t_max = horizons.back();

    // Overlapping pairs at the largest horizon; areas only grow with t.
    auto pairs = candidate_pairs(set);
    std::vector<double> pair_max(pairs.size());
    parallel_for(pairs.size(), workers,
                 [&](std::size_t k) { pair_max[k] = set.pair_area(pairs[k].first, pairs[k].second, t_max); });
    std::vector<double> prim_max(n);
    parallel_for(n, workers, [&](std::size_t i) { prim_max[i] = set.primitive_area(i, t_max); });

    std::vector<std::pair<std::size_t, std::size_t>> overlapping;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        if (pair_max[k] > 1e-12 * std::min(prim_max[i], prim_max[j]))
            overlapping.push_back(pairs[k]);
    }

    // Pairwise inclusion-exclusion is exact only without triple overlaps.
    if (overlapping.size() > 1) {
        std::unordered_map<std::size_t, std::vector<std::size_t>> adjacency;
        for (const auto& [i, j] : overlapping)
            adjacency[i].push_back(j);
        for (auto& [i, list] : adjacency)
            std::sort(list.begin(), list.end());
        for (const auto& [i, j] : overlapping) {
            const auto& ni = adjacency[i];
            const auto it = adjacency.find(j);
            if (it == adjacency.end())
                continue;
            for (std::size_t k : it->second) {
                if (!std::binary_search(ni.begin(), ni.end(), k))
                    continue;
                const double triple = set.triple_area(i, j, k, t_max);
                const double scale = std::min({prim_max[i], prim_max[j], prim_max[k]});
                if (triple > 1e-12 * scale)
                    throw GeometryError("three primitives overlap with positive area; pairwise "
                                        "inclusion-exclusion would be inexact");
            }
        }
    }

    std::vector<double> out(horizons.size(), 0.0);
    std::vector<double> prim(n);
    std::vector<double> pair(overlapping.size());
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        const double t = horizons[h];
        parallel_for(n, workers, [&](std::size_t i) { prim[i] = h + 1 == horizons.size() ? prim_max[i] : set.primitive_area(i, t); });
        parallel_for(overlapping.size(), workers, [&](std::size_t k) {
            pair[k] = set.pair_area(overlapping[k].first, overlapping[k].second, t);
        });
        double total = 0.0;
        for (double a : prim)
            total += a;
        for (double a : pair)
            total -= a;
        out[h] = std::max(0.0, total);
    }
    return out;
}

DensityEstimate sector_lower_density(const SectorSet& set, std::span<const double> horizons,
                                     const EstimationMethod& method)
{
    validate_horizons(horizons);
    const Sector& sector = set.sector();
    DensityEstimate est;
    est.method = method;
    est.horizons.assign(horizons.begin(), horizons.end());
    est.ratios.resize(horizons.size());
    est.halfwidths.assign(horizons.size(), 0.0);

    if (method.kind == EstimationMethod::Kind::exact) {
        if (!set.is_exact())
            throw InputError("exact estimation requested for a predicate set; use monte_carlo");
        const auto areas = exact_union_areas(set, horizons, method.workers);
        for (std::size_t h = 0; h < horizons.size(); ++h)
            est.ratios[h] = areas[h] / sector.truncated_area(horizons[h]);
    } else {
        if (method.samples == 0)
            throw InputError("monte-carlo estimation needs a positive sample count");
        if (method.strata_per_axis == 0)
            throw InputError("monte-carlo estimation needs at least one stratum per axis");
        const std::size_t k = method.strata_per_axis;
        const std::size_t strata = k * k;
        const double alpha = sector.alpha();
        std::vector<std::uint64_t> hits(strata);
        for (std::size_t h = 0; h < horizons.size(); ++h) {
            const double t = horizons[h];
            parallel_for(strata, method.workers, [&](std::size_t s) {
                const std::size_t share = method.samples / strata + (s < method.samples % strata ? 1 : 0);
                const double iu = static_cast<double>(s / k);
                const double iv = static_cast<double>(s % k);
                Stream rng(substream_seed(method.seed, {h, s}));
                std::uint64_t count = 0;
                for (std::size_t q = 0; q < share; ++q) {
                    const double u = (iu + rng.uniform()) / static_cast<double>(k);
                    const double v = (iv + rng.uniform()) / static_cast<double>(k);
                    const double r = t * std::sqrt(u);
                    const double theta = -alpha + 2.0 * alpha * v;
                    if (set.contains({r * std::cos(theta), r * std::sin(theta)}))
                        ++count;
                }
                hits[s] = count;
            });
            const auto total = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
            const double n = static_cast<double>(method.samples);
            const double p = static_cast<double>(total) / n;
            est.ratios[h] = p;
            est.halfwidths[h] = 3.0 * std::sqrt(p * (1.0 - p)) / std::sqrt(n);
        }
    }
    const std::size_t window = liminf_window(est.ratios.size());
    est.liminf_proxy = *std::min_element(est.ratios.end() - static_cast<std::ptrdiff_t>(window), est.ratios.end());
    return est;
}

bool SeparatedFamily::carries_points(std::size_t level, std::uint64_t n) const
{
    const double r = static_cast<double>(separation(level));
    return sector_.segment_length(static_cast<double>(n)) * (1.0 + Sector::kBoundaryTolerance) >= r;
}

std::vector<SectorPoint> SeparatedFamily::points(std::size_t level, double max_modulus) const
{
    const double r = static_cast<double>(separation(level));
    std::vector<SectorPoint> out;
    for (std::uint64_t n : integer_set(level)) {
        if (static_cast<double>(n) > max_modulus)
            break;
        if (!carries_points(level, n))
            continue;
        for (const auto& b : sector_.segment_points(static_cast<double>(n), r))
            if (b.modulus() <= max_modulus)
                out.push_back(b);
    }
    return out;
}

SeparatedFamily build_separated_family(std::span<const std::uint64_t> separations, std::uint64_t integer_horizon,
                                       const Sector& sector)
{
    if (separations.empty())
        throw InputError("separated family needs at least one level");
    for (auto r : separations)
        if (r < 1)
            throw InputError("separations must be positive integers");
    if (integer_horizon > (std::uint64_t{1} << 62))
        throw InputError("integer horizon too large");

    const std::size_t levels = separations.size();
    const std::uint64_t reach = *std::max_element(separations.begin(), separations.end());

    SeparatedFamily family(sector);
    family.separations_.assign(separations.begin(), separations.end());
    family.integer_horizon_ = integer_horizon;
    family.integer_sets_.resize(levels);

    for (unsigned j = 1; j < 63 && (std::uint64_t{1} << j) <= integer_horizon; ++j) {
        const std::size_t level = std::min<std::size_t>(static_cast<std::size_t>(std::countr_zero(j)) + 1, levels);
        const std::uint64_t start = std::uint64_t{1} << j;
        if (start < separations[level - 1])
            continue;
        if (start < 2 * reach)
            continue;
        const std::uint64_t stop = std::min(2 * start - reach, integer_horizon);
        for (std::uint64_t n = start + reach; n <= stop; n += 2 * reach)
            family.integer_sets_[level - 1].push_back(n);
    }

    for (std::size_t l = 1; l <= levels; ++l)
        if (family.integer_sets_[l - 1].empty())
            throw HorizonTooSmall(l, "level " + std::to_string(l) + " has no element up to the integer horizon " +
                                         std::to_string(integer_horizon));

    // Separation certificate: with every set sorted, checking neighbours in
    // the merged order covers all pairs since gaps add up.
    std::vector<std::pair<std::uint64_t, std::size_t>> merged;
    for (std::size_t l = 1; l <= levels; ++l)
        for (auto n : family.integer_sets_[l - 1]) {
            if (n < separations[l - 1])
                throw ConstructionFailed("element below its level separation");
            merged.emplace_back(n, l);
        }
    std::sort(merged.begin(), merged.end());
    for (std::size_t i = 1; i < merged.size(); ++i) {
        const auto [n, l] = merged[i - 1];
        const auto [m, k] = merged[i];
        if (m == n)
            throw ConstructionFailed("integer sets are not disjoint");
        if (m - n < separations[l - 1] + separations[k - 1])
            throw ConstructionFailed("integer sets violate the separation |n - m| >= r_l + r_k");
    }

    for (std::size_t l = 1; l <= levels; ++l) {
        const auto& set = family.integer_sets_[l - 1];
        double bound = integer_density_prefix(set, integer_horizon);
        for (unsigned e = 0; e < 63 && (std::uint64_t{1} << e) <= integer_horizon; ++e) {
            const std::uint64_t checkpoint = std::uint64_t{1} << e;
            if (checkpoint >= set.front())
                bound = std::min(bound, integer_density_prefix(set, checkpoint));
        }
        if (!(bound > 0.0))
            throw HorizonTooSmall(l, "level " + std::to_string(l) + " has zero density bound");
        family.density_bounds_.push_back(bound);
    }
    return family;
}

ReturnSetBound return_set_density_bound(const SeparatedFamily& family, std::size_t level, double delta,
                                        double point_horizon)
{
    if (level < 1 || level > family.levels())
        throw InputError("level out of range");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw InputError("delta must lie in (0, 1)");
    const Sector& sector = family.sector();
    const double bound =
        family.density_bound(level) * delta * delta * sector.tan_alpha() / static_cast<double>(family.separation(level));
    std::vector<Primitive> copies;
    for (const auto& b : family.points(level, point_horizon))
        copies.emplace_back(AnchoredCopy{b, delta});
    return {bound, SectorSet::exact(sector, std::move(copies))};
}

} // namespace sectorfhc
