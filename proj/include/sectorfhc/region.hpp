#pragma once

#include "sectorfhc/sector.hpp"

#include <vector>

namespace sectorfhc {

/// Closed half-plane {(x, y) : a x + b y <= c}.
struct HalfPlane {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

struct Disc {
    SectorPoint center;
    double radius = 0.0;
};

/// A bounded convex region given as an intersection of half-planes and discs.
///
/// The area is computed exactly (up to rounding) by integrating x dy - y dx
/// along the boundary: every constraint contributes the part of its boundary
/// curve that lies inside all other constraints, which is a segment for a
/// line and a union of arcs for a circle. At least one disc is required so
/// that the region is bounded.
class ConvexRegion {
public:
    ConvexRegion() = default;

    ConvexRegion& add(const HalfPlane& h);
    ConvexRegion& add(const Disc& d);
    ConvexRegion& add(const ConvexRegion& other);

    const std::vector<HalfPlane>& half_planes() const noexcept { return planes_; }
    const std::vector<Disc>& discs() const noexcept { return discs_; }

    double area() const;

private:
    std::vector<HalfPlane> planes_;
    std::vector<Disc> discs_;
};

/// Half-planes whose intersection is the closed wedge theta_min <= arg <= theta_max
/// (requires 0 <= theta_max - theta_min <= pi), with apex at `apex`.
std::vector<HalfPlane> wedge_half_planes(double theta_min, double theta_max, SectorPoint apex = {});

} // namespace sectorfhc
