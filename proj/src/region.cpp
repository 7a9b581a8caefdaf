#include "sectorfhc/region.hpp"

#include "sectorfhc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace sectorfhc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Half-plane n . p <= h with |n| = 1, expressed in shifted coordinates.
struct UnitPlane {
    double nx, ny, h;
};

struct Circle {
    double cx, cy, r;
};

using Interval = std::pair<double, double>;

// Intersect a sorted list of disjoint intervals with [lo, hi].
std::vector<Interval> clip(const std::vector<Interval>& set, double lo, double hi)
{
    std::vector<Interval> out;
    for (const auto& [a, b] : set) {
        const double s = std::max(a, lo);
        const double e = std::min(b, hi);
        if (s <= e)
            out.emplace_back(s, e);
    }
    return out;
}

// Intersect the angular set with the circular arc [start, start + length].
std::vector<Interval> intersect_arc(const std::vector<Interval>& set, double start, double length)
{
    if (length >= kTwoPi)
        return set;
    double s = std::fmod(start, kTwoPi);
    if (s < 0.0)
        s += kTwoPi;
    const double e = s + length;
    if (e <= kTwoPi)
        return clip(set, s, e);
    auto first = clip(set, 0.0, e - kTwoPi);
    auto second = clip(set, s, kTwoPi);
    first.insert(first.end(), second.begin(), second.end());
    return first;
}

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

} // namespace

ConvexRegion& ConvexRegion::add(const HalfPlane& h)
{
    planes_.push_back(h);
    return *this;
}

ConvexRegion& ConvexRegion::add(const Disc& d)
{
    discs_.push_back(d);
    return *this;
}

ConvexRegion& ConvexRegion::add(const ConvexRegion& other)
{
    planes_.insert(planes_.end(), other.planes_.begin(), other.planes_.end());
    discs_.insert(discs_.end(), other.discs_.begin(), other.discs_.end());
    return *this;
}

double ConvexRegion::area() const
{
    if (discs_.empty())
        throw GeometryError("convex region needs at least one disc to be bounded");
    for (const auto& d : discs_)
        if (!(d.radius > 0.0))
            return 0.0;

    const double ox = discs_.front().center.x;
    const double oy = discs_.front().center.y;

    double scale = 0.0;
    std::vector<Circle> circles;
    for (const auto& d : discs_) {
        Circle c{d.center.x - ox, d.center.y - oy, d.radius};
        scale = std::max(scale, std::hypot(c.cx, c.cy) + c.r);
        const bool duplicate = std::any_of(circles.begin(), circles.end(), [&](const Circle& o) {
            return o.cx == c.cx && o.cy == c.cy && o.r == c.r;
        });
        if (!duplicate)
            circles.push_back(c);
    }
    const double tol = 1e-13 * scale;

    std::vector<UnitPlane> planes;
    for (const auto& p : planes_) {
        const double norm = std::hypot(p.a, p.b);
        if (norm == 0.0) {
            if (p.c < 0.0)
                return 0.0;
            continue;
        }
        UnitPlane u{p.a / norm, p.b / norm, p.c / norm};
        u.h -= u.nx * ox + u.ny * oy;
        const bool duplicate = std::any_of(planes.begin(), planes.end(), [&](const UnitPlane& o) {
            return std::abs(o.nx - u.nx) < 1e-14 && std::abs(o.ny - u.ny) < 1e-14 &&
                   std::abs(o.h - u.h) <= tol;
        });
        if (!duplicate)
            planes.push_back(u);
    }

    double twice_area = 0.0;

    // Straight boundary pieces.
    for (std::size_t i = 0; i < planes.size(); ++i) {
        const UnitPlane& L = planes[i];
        const double px = L.h * L.nx, py = L.h * L.ny; // foot of the line
        const double dx = -L.ny, dy = L.nx;            // counter-clockwise direction
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        bool empty = false;
        for (std::size_t j = 0; j < planes.size() && !empty; ++j) {
            if (j == i)
                continue;
            const UnitPlane& M = planes[j];
            const double slope = M.nx * dx + M.ny * dy;
            const double base = M.nx * px + M.ny * py;
            if (std::abs(slope) < 1e-15) {
                if (base > M.h + tol)
                    empty = true;
                continue;
            }
            const double s = (M.h - base) / slope;
            if (slope > 0.0)
                hi = std::min(hi, s);
            else
                lo = std::max(lo, s);
        }
        for (const auto& C : circles) {
            if (empty)
                break;
            const double wx = px - C.cx, wy = py - C.cy;
            const double wd = wx * dx + wy * dy;
            const double disc = wd * wd - (wx * wx + wy * wy - C.r * C.r);
            if (disc < 0.0) {
                empty = true;
                break;
            }
            const double root = std::sqrt(disc);
            lo = std::max(lo, -wd - root);
            hi = std::min(hi, -wd + root);
        }
        if (empty || !(lo < hi))
            continue;
        twice_area += cross(px + lo * dx, py + lo * dy, px + hi * dx, py + hi * dy);
    }

    // Circular boundary pieces.
    for (std::size_t k = 0; k < circles.size(); ++k) {
        const Circle& C = circles[k];
        std::vector<Interval> arcs{{0.0, kTwoPi}};
        for (const auto& P : planes) {
            if (arcs.empty())
                break;
            const double kappa = (P.h - (P.nx * C.cx + P.ny * C.cy)) / C.r;
            if (kappa >= 1.0)
                continue;
            if (kappa <= -1.0) {
                arcs.clear();
                break;
            }
            const double half = std::acos(kappa);
            const double phi = std::atan2(P.ny, P.nx);
            arcs = intersect_arc(arcs, phi + half, kTwoPi - 2.0 * half);
        }
        for (std::size_t m = 0; m < circles.size() && !arcs.empty(); ++m) {
            if (m == k)
                continue;
            const Circle& D = circles[m];
            const double ddx = D.cx - C.cx, ddy = D.cy - C.cy;
            const double dist = std::hypot(ddx, ddy);
            if (dist == 0.0) {
                if (C.r > D.r)
                    arcs.clear();
                continue;
            }
            const double kappa = (dist * dist + C.r * C.r - D.r * D.r) / (2.0 * C.r * dist);
            if (kappa <= -1.0)
                continue;
            if (kappa >= 1.0) {
                arcs.clear();
                break;
            }
            const double half = std::acos(kappa);
            arcs = intersect_arc(arcs, std::atan2(ddy, ddx) - half, 2.0 * half);
        }
        for (const auto& [a, b] : arcs) {
            if (!(b > a))
                continue;
            twice_area += C.r * C.r * (b - a) +
                          C.r * (C.cx * (std::sin(b) - std::sin(a)) - C.cy * (std::cos(b) - std::cos(a)));
        }
    }
    return std::max(0.0, 0.5 * twice_area);
}

std::vector<HalfPlane> wedge_half_planes(double theta_min, double theta_max, SectorPoint apex)
{
    if (!(theta_max >= theta_min) || theta_max - theta_min > std::numbers::pi + 1e-15)
        throw InputError("wedge must have opening in [0, pi]");
    const double s1 = std::sin(theta_min), c1 = std::cos(theta_min);
    const double s2 = std::sin(theta_max), c2 = std::cos(theta_max);
    // Left of the ray at theta_min, right of the ray at theta_max.
    HalfPlane lower{s1, -c1, s1 * apex.x - c1 * apex.y};
    HalfPlane upper{-s2, c2, -s2 * apex.x + c2 * apex.y};
    return {lower, upper};
}

} // namespace sectorfhc
