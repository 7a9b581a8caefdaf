#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace sectorfhc {

struct SectorPoint {
    double x = 0.0;
    double y = 0.0;

    double modulus() const noexcept { return std::hypot(x, y); }

    friend SectorPoint operator+(SectorPoint a, SectorPoint b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend SectorPoint operator-(SectorPoint a, SectorPoint b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend bool operator==(const SectorPoint&, const SectorPoint&) = default;
};

/// The closed complex sector {r e^{i theta} : r >= 0, |theta| <= alpha},
/// 0 < alpha <= pi/2.
class Sector {
public:
    // Relative slack applied to the boundary rays so that points computed
    // as n + i n tan(alpha) land inside despite rounding in tan.
    static constexpr double kBoundaryTolerance = 1e-12;

    explicit Sector(double alpha);

    double alpha() const noexcept { return alpha_; }
    double tan_alpha() const noexcept { return tan_alpha_; }
    bool is_half_plane() const noexcept { return half_plane_; }

    /// Membership in the closed sector; throws InputError on non-finite input.
    bool contains(SectorPoint p) const;

    /// Lebesgue measure of the truncation {s in sector : |s| <= t}, i.e. alpha t^2.
    double truncated_area(double t) const;

    /// Length 2 n tan(alpha) of the vertical cut {x + iy in sector : x = n}.
    double segment_length(double n) const;

    /// Evenly spaced points n + i(n tan(alpha) - j r), j = 0..floor(R_n / r).
    /// Throws PreconditionError when the segment is shorter than r.
    std::vector<SectorPoint> segment_points(double n, double spacing) const;

    /// Number of points segment_points(n, spacing) would return.
    std::size_t segment_point_count(double n, double spacing) const;

    friend bool operator==(const Sector& a, const Sector& b) noexcept { return a.alpha_ == b.alpha_; }

private:
    double alpha_;
    double tan_alpha_;
    bool half_plane_;
};

} // namespace sectorfhc
