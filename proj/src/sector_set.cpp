#include "sectorfhc/sector_set.hpp"

#include "sectorfhc/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sectorfhc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* field)
{
    if (!std::isfinite(v))
        throw InputError(std::string("non-finite primitive field '") + field + "'");
}

} // namespace

SectorSet::SectorSet(const Sector& sector, std::vector<Primitive> primitives, MembershipPredicate member)
    : sector_(sector), primitives_(std::move(primitives)), member_(std::move(member))
{
}

SectorSet SectorSet::exact(const Sector& sector, std::vector<Primitive> primitives)
{
    const double alpha = sector.alpha();
    for (auto& prim : primitives) {
        std::visit(overloaded{
                       [&](Subsector& s) {
                           require_finite(s.theta_min, "theta_min");
                           require_finite(s.theta_max, "theta_max");
                           if (s.theta_min > s.theta_max)
                               throw InputError("subsector with theta_min > theta_max");
                           s.theta_min = std::clamp(s.theta_min, -alpha, alpha);
                           s.theta_max = std::clamp(s.theta_max, -alpha, alpha);
                       },
                       [&](AnchoredCopy& a) {
                           require_finite(a.delta, "delta");
                           if (!(a.delta > 0.0))
                               throw InputError("anchored copy needs delta > 0");
                           if (!sector.contains(a.anchor))
                               throw InputError("anchored copy apex lies outside the sector");
                       },
                       [&](DiscPrimitive& d) {
                           require_finite(d.center.x, "x");
                           require_finite(d.center.y, "y");
                           require_finite(d.radius, "radius");
                           if (d.radius < 0.0)
                               throw InputError("disc radius must be non-negative");
                       },
                       [&](HalfPlaneCut& h) {
                           require_finite(h.a, "a");
                           require_finite(h.b, "b");
                           require_finite(h.c, "c");
                       },
                   },
                   prim);
    }
    return SectorSet(sector, std::move(primitives), nullptr);
}

SectorSet SectorSet::predicate(const Sector& sector, MembershipPredicate member)
{
    if (!member)
        throw InputError("predicate set needs a membership function");
    return SectorSet(sector, {}, std::move(member));
}

SectorSet SectorSet::full(const Sector& sector)
{
    return exact(sector, {Subsector{-sector.alpha(), sector.alpha()}});
}

SectorSet SectorSet::ray(const Sector& sector, double theta)
{
    return exact(sector, {Subsector{theta, theta}});
}

bool SectorSet::contains(const SectorPoint& p) const
{
    if (member_)
        return member_(p);
    if (!sector_.contains(p))
        return false;
    for (const auto& prim : primitives_) {
        const bool inside = std::visit(
            overloaded{
                [&](const Subsector& s) {
                    if (p.x == 0.0 && p.y == 0.0)
                        return true;
                    const double arg = std::atan2(p.y, p.x);
                    return arg >= s.theta_min && arg <= s.theta_max;
                },
                [&](const AnchoredCopy& a) {
                    const SectorPoint q = p - a.anchor;
                    return q.modulus() <= a.delta && sector_.contains(q);
                },
                [&](const DiscPrimitive& d) { return (p - d.center).modulus() <= d.radius; },
                [&](const HalfPlaneCut& h) { return h.a * p.x + h.b * p.y <= h.c; },
            },
            prim);
        if (inside)
            return true;
    }
    return false;
}

ConvexRegion SectorSet::truncation(double t) const
{
    ConvexRegion r;
    r.add(Disc{{0.0, 0.0}, t});
    return r;
}

ConvexRegion SectorSet::region_of(std::size_t i) const
{
    ConvexRegion r;
    const double alpha = sector_.alpha();
    std::visit(overloaded{
                   [&](const Subsector& s) {
                       for (const auto& h : wedge_half_planes(s.theta_min, s.theta_max))
                           r.add(h);
                   },
                   [&](const AnchoredCopy& a) {
                       for (const auto& h : wedge_half_planes(-alpha, alpha, a.anchor))
                           r.add(h);
                       r.add(Disc{a.anchor, a.delta});
                   },
                   [&](const DiscPrimitive& d) {
                       for (const auto& h : wedge_half_planes(-alpha, alpha))
                           r.add(h);
                       r.add(Disc{d.center, d.radius});
                   },
                   [&](const HalfPlaneCut& h) {
                       for (const auto& w : wedge_half_planes(-alpha, alpha))
                           r.add(w);
                       r.add(HalfPlane{h.a, h.b, h.c});
                   },
               },
               primitives_.at(i));
    return r;
}

double SectorSet::primitive_area(std::size_t i, double t) const
{
    if (!is_exact())
        throw InputError("primitive areas are only defined for exact sets");
    if (!(t >= 0.0))
        throw InputError("truncation radius must be non-negative");
    const Primitive& prim = primitives_.at(i);
    if (const auto* s = std::get_if<Subsector>(&prim))
        return (s->theta_max - s->theta_min) * t * t / 2.0;
    if (const auto* a = std::get_if<AnchoredCopy>(&prim)) {
        const double reach = a->anchor.modulus();
        if (reach + a->delta <= t)
            return sector_.truncated_area(a->delta);
        if (reach - a->delta >= t)
            return 0.0;
    }
    if (t == 0.0)
        return 0.0;
    return region_of(i).add(truncation(t)).area();
}

double SectorSet::pair_area(std::size_t i, std::size_t j, double t) const
{
    if (!is_exact())
        throw InputError("pair areas are only defined for exact sets");
    const auto* si = std::get_if<Subsector>(&primitives_.at(i));
    const auto* sj = std::get_if<Subsector>(&primitives_.at(j));
    if (si && sj) {
        const double lo = std::max(si->theta_min, sj->theta_min);
        const double hi = std::min(si->theta_max, sj->theta_max);
        return hi > lo ? (hi - lo) * t * t / 2.0 : 0.0;
    }
    if (t == 0.0)
        return 0.0;
    return region_of(i).add(region_of(j)).add(truncation(t)).area();
}

double SectorSet::triple_area(std::size_t i, std::size_t j, std::size_t k, double t) const
{
    if (!is_exact())
        throw InputError("triple areas are only defined for exact sets");
    if (t == 0.0)
        return 0.0;
    return region_of(i).add(region_of(j)).add(region_of(k)).add(truncation(t)).area();
}

std::optional<std::array<double, 4>> SectorSet::bounds(std::size_t i) const
{
    const Primitive& prim = primitives_.at(i);
    if (const auto* a = std::get_if<AnchoredCopy>(&prim)) {
        const double rise = a->delta * std::sin(sector_.alpha());
        return std::array<double, 4>{a->anchor.x, a->anchor.y - rise, a->anchor.x + a->delta, a->anchor.y + rise};
    }
    if (const auto* d = std::get_if<DiscPrimitive>(&prim))
        return std::array<double, 4>{d->center.x - d->radius, d->center.y - d->radius, d->center.x + d->radius,
                                     d->center.y + d->radius};
    return std::nullopt;
}

nlohmann::json SectorSet::to_json() const
{
    if (!is_exact())
        throw InputError("predicate sets cannot be serialized");
    nlohmann::json prims = nlohmann::json::array();
    for (const auto& prim : primitives_) {
        prims.push_back(std::visit(
            overloaded{
                [](const Subsector& s) {
                    return nlohmann::json{{"kind", "subsector"}, {"theta_min", s.theta_min}, {"theta_max", s.theta_max}};
                },
                [](const AnchoredCopy& a) {
                    return nlohmann::json{{"kind", "anchored"}, {"x", a.anchor.x}, {"y", a.anchor.y}, {"delta", a.delta}};
                },
                [](const DiscPrimitive& d) {
                    return nlohmann::json{{"kind", "disc"}, {"x", d.center.x}, {"y", d.center.y}, {"radius", d.radius}};
                },
                [](const HalfPlaneCut& h) {
                    return nlohmann::json{{"kind", "halfplane"}, {"a", h.a}, {"b", h.b}, {"c", h.c}};
                },
            },
            prim));
    }
    return {{"alpha", sector_.alpha()}, {"primitives", prims}};
}

SectorSet SectorSet::from_json(const nlohmann::json& doc)
{
    try {
        const Sector sector(doc.at("alpha").get<double>());
        std::vector<Primitive> prims;
        for (const auto& p : doc.at("primitives")) {
            const auto kind = p.at("kind").get<std::string>();
            if (kind == "subsector")
                prims.emplace_back(Subsector{p.at("theta_min").get<double>(), p.at("theta_max").get<double>()});
            else if (kind == "anchored")
                prims.emplace_back(AnchoredCopy{{p.at("x").get<double>(), p.at("y").get<double>()}, p.at("delta").get<double>()});
            else if (kind == "disc")
                prims.emplace_back(DiscPrimitive{{p.at("x").get<double>(), p.at("y").get<double>()}, p.at("radius").get<double>()});
            else if (kind == "halfplane")
                prims.emplace_back(HalfPlaneCut{p.at("a").get<double>(), p.at("b").get<double>(), p.at("c").get<double>()});
            else
                throw InputError("unknown primitive kind '" + kind + "'");
        }
        return exact(sector, std::move(prims));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed sector set document: ") + e.what());
    }
}

} // namespace sectorfhc
