#include "sectorfhc/sector.hpp"

#include "sectorfhc/error.hpp"

#include <string>

namespace sectorfhc {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
// Cap on segment_points output; larger requests are almost surely a
// half-plane sector or a typo in the spacing.
constexpr double kMaxSegmentPoints = 1e8;
} // namespace

Sector::Sector(double alpha) : alpha_(alpha), tan_alpha_(0.0), half_plane_(false)
{
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha > kHalfPi)
        throw InputError("sector half-angle must lie in (0, pi/2], got " + std::to_string(alpha));
    half_plane_ = alpha == kHalfPi;
    tan_alpha_ = std::tan(alpha);
}

bool Sector::contains(SectorPoint p) const
{
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw InputError("sector membership test on non-finite point");
    const double slack = kBoundaryTolerance * (std::abs(p.x) + std::abs(p.y));
    if (p.x < -slack)
        return false;
    if (half_plane_)
        return true;
    return std::abs(p.y) <= p.x * tan_alpha_ + slack;
}

double Sector::truncated_area(double t) const
{
    if (!(t >= 0.0) || !std::isfinite(t))
        throw InputError("truncation radius must be finite and non-negative");
    return alpha_ * t * t;
}

double Sector::segment_length(double n) const
{
    if (half_plane_)
        throw PreconditionError("vertical segments of the half-plane sector are unbounded");
    return 2.0 * n * tan_alpha_;
}

std::size_t Sector::segment_point_count(double n, double spacing) const
{
    if (!std::isfinite(n) || n <= 0.0)
        throw InputError("segment abscissa must be positive");
    if (!std::isfinite(spacing) || spacing <= 0.0)
        throw InputError("segment spacing must be positive");
    const double ratio = segment_length(n) / spacing;
    // Length equal to the spacing is accepted (two endpoints); the tolerance
    // absorbs the rounding of tan(alpha).
    const double widened = ratio * (1.0 + kBoundaryTolerance);
    if (widened < 1.0)
        throw PreconditionError("segment length " + std::to_string(segment_length(n)) +
                                " is shorter than the spacing " + std::to_string(spacing));
    if (widened > kMaxSegmentPoints)
        throw PreconditionError("segment would hold more than 1e8 points");
    return static_cast<std::size_t>(std::floor(widened)) + 1;
}

std::vector<SectorPoint> Sector::segment_points(double n, double spacing) const
{
    const std::size_t count = segment_point_count(n, spacing);
    const double top = n * tan_alpha_;
    std::vector<SectorPoint> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j)
        out.push_back({n, top - static_cast<double>(j) * spacing});
    return out;
}

} // namespace sectorfhc
