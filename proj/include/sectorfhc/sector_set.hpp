#pragma once

#include "sectorfhc/region.hpp"
#include "sectorfhc/sector.hpp"

#include <array>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <variant>
#include <vector>

namespace sectorfhc {

/// {theta_min <= arg t <= theta_max}, clipped to the ambient sector.
struct Subsector {
    double theta_min = 0.0;
    double theta_max = 0.0;
};

/// anchor + Delta_delta, a small copy of the truncated sector with its apex at `anchor`.
struct AnchoredCopy {
    SectorPoint anchor;
    double delta = 0.0;
};

struct DiscPrimitive {
    SectorPoint center;
    double radius = 0.0;
};

/// {a x + b y <= c} intersected with the ambient sector.
struct HalfPlaneCut {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

using Primitive = std::variant<Subsector, AnchoredCopy, DiscPrimitive, HalfPlaneCut>;

using MembershipPredicate = std::function<bool(const SectorPoint&)>;

/// A measurable subset of a sector, given exactly as a finite union of
/// primitives or implicitly through a deterministic membership oracle.
class SectorSet {
public:
    static SectorSet exact(const Sector& sector, std::vector<Primitive> primitives);
    static SectorSet predicate(const Sector& sector, MembershipPredicate member);
    static SectorSet full(const Sector& sector);
    static SectorSet ray(const Sector& sector, double theta);

    const Sector& sector() const noexcept { return sector_; }
    bool is_exact() const noexcept { return !member_; }
    const std::vector<Primitive>& primitives() const noexcept { return primitives_; }

    /// Membership; for exact sets a point belongs if it lies in any primitive.
    bool contains(const SectorPoint& p) const;

    /// Area of primitive i intersected with the truncation Delta_t.
    double primitive_area(std::size_t i, double t) const;

    /// Area of primitives i and j together intersected with Delta_t.
    double pair_area(std::size_t i, std::size_t j, double t) const;

    /// Area of primitives i, j, k together intersected with Delta_t.
    double triple_area(std::size_t i, std::size_t j, std::size_t k, double t) const;

    /// Axis-aligned bounds of primitive i, or nullopt when it is unbounded.
    std::optional<std::array<double, 4>> bounds(std::size_t i) const;

    nlohmann::json to_json() const;
    static SectorSet from_json(const nlohmann::json& doc);

private:
    SectorSet(const Sector& sector, std::vector<Primitive> primitives, MembershipPredicate member);

    ConvexRegion region_of(std::size_t i) const;
    ConvexRegion truncation(double t) const;

    Sector sector_;
    std::vector<Primitive> primitives_;
    MembershipPredicate member_;
};

} // namespace sectorfhc
