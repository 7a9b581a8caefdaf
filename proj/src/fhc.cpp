#include "sectorfhc/fhc.hpp"

#include "sectorfhc/error.hpp"
#include "sectorfhc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sectorfhc {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string point_str(SectorPoint p)
{
    return "(" + num(p.x) + ", " + num(p.y) + ")";
}

double power(double mag, double p)
{
    return p == 1.0 ? mag : p == 2.0 ? mag * mag : std::pow(mag, p);
}

double root(double sum, double p)
{
    return p == 1.0 ? sum : p == 2.0 ? std::sqrt(sum) : std::pow(sum, 1.0 / p);
}

double distance(const GridFunction& a, const GridFunction& b, const LpContext& ctx)
{
    const std::vector<GridFunction> fs{a, b};
    const double coeffs[] = {1.0, -1.0};
    return norm(lincomb(coeffs, fs), ctx);
}

GridFunction sum_of(const std::vector<GridFunction>& parts, const Sector& sector, Dyadic h)
{
    if (parts.empty())
        return GridFunction(sector, h);
    const std::vector<double> ones(parts.size(), 1.0);
    return lincomb(ones, parts);
}

void require_plan_match(const FhcVector& v, const CriterionPlan& plan)
{
    if (v.plan_digest != plan.digest())
        throw InputError("vector was not built from this plan (digest " + v.plan_digest + " vs " + plan.digest() +
                         ")");
}

} // namespace

std::uint64_t cover_multiplicity(const GridFunction& y)
{
    return static_cast<std::uint64_t>(std::floor(2.0 * y.support_radius())) + 1;
}

std::uint64_t tail_radius(const GridFunction& y, const LpContext& ctx, double eps)
{
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw InputError("tail tolerance must be positive");
    if (!(y.sector() == ctx.weight.sector()))
        throw InputError("target and weight live on different sectors");
    if (!ctx.weight.has_radial_tail()) {
        const auto integral = integrate_weight(ctx.weight, 1e-8);
        if (integral.status != IntegralStatus::finite)
            throw CriterionInapplicable("weight '" + ctx.weight.name() + "' is not integrable over the sector");
    }
    if (y.empty())
        return 0;
    const double s = y.support_radius();
    const double threshold = eps / (y.sup_norm() * static_cast<double>(cover_multiplicity(y)));
    auto ok = [&](std::uint64_t R) {
        const double g = tail_mass(ctx.weight, std::max(0.0, static_cast<double>(R) - s));
        return root(g, ctx.p) < threshold;
    };
    if (ok(0))
        return 0;
    std::uint64_t hi = 1;
    while (!ok(hi)) {
        if (hi > (std::uint64_t{1} << 40))
            throw CriterionInapplicable("weight tail does not fall below " + num(threshold));
        hi *= 2;
    }
    std::uint64_t lo = hi / 2; // fails (or is 0, which failed above)
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

nlohmann::json CriterionPlan::to_json() const
{
    nlohmann::json targets_doc = nlohmann::json::array();
    for (const auto& y : targets)
        targets_doc.push_back(y.to_json());
    return {{"alpha", ctx.weight.sector().alpha()},
            {"p", ctx.p},
            {"weight", ctx.weight.name()},
            {"targets", targets_doc},
            {"radii", radii},
            {"multiplicities", multiplicities},
            {"integer_horizon", family.integer_horizon()}};
}

std::string CriterionPlan::digest() const
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : to_json().dump()) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

CriterionPlan plan_criterion(std::vector<GridFunction> targets, const LpContext& ctx, std::uint64_t integer_horizon)
{
    if (targets.empty())
        throw InputError("the criterion needs at least one target");
    for (const auto& y : targets) {
        if (!y.same_grid(targets.front()))
            throw InputError("targets live on different grids");
        if (!(y.sector() == ctx.weight.sector()))
            throw InputError("targets and weight live on different sectors");
    }
    const auto sufficient = check_sufficient(ctx.weight, 1e-6);
    if (sufficient.status != Verdict::pass)
        throw CriterionInapplicable("weight '" + ctx.weight.name() + "' fails the integrability condition");

    std::vector<std::uint64_t> radii;
    std::vector<std::uint64_t> multiplicities;
    std::uint64_t running = 1;
    for (std::size_t l = 1; l <= targets.size(); ++l) {
        const double eps = 1.0 / (static_cast<double>(l) * std::ldexp(1.0, static_cast<int>(l)));
        for (std::size_t j = 0; j < l; ++j)
            running = std::max(running, tail_radius(targets[j], ctx, eps));
        radii.push_back(running);
        multiplicities.push_back(cover_multiplicity(targets[l - 1]));
    }
    auto family = build_separated_family(radii, integer_horizon, ctx.weight.sector());
    return CriterionPlan{ctx, std::move(targets), std::move(radii), std::move(multiplicities), std::move(family)};
}

SectorPoint snap_into_sector(SectorPoint b, const Sector& sector, Dyadic h)
{
    SectorPoint snapped = snap_to_grid(b, h);
    const double step = h.value();
    for (int k = 0; k < 4 && !sector.contains(snapped); ++k)
        snapped.y += snapped.y > 0.0 ? -step : step;
    if (!sector.contains(snapped))
        throw GeometryError("cannot place " + point_str(b) + " on the grid inside the sector");
    return snapped;
}

nlohmann::json FhcVector::to_json() const
{
    nlohmann::json terms_doc = nlohmann::json::array();
    for (const auto& t : terms)
        terms_doc.push_back({{"b", {t.b.x, t.b.y}}, {"level", t.level}, {"target", t.target}});
    return {{"plan_digest", plan_digest},
            {"truncation_horizon", truncation_horizon},
            {"terms", terms_doc},
            {"x", x.to_json()}};
}

nlohmann::json FhcVector::ledger_json() const
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : ledger)
        rows.push_back(
            {{"level", r.level}, {"subset", r.subset}, {"terms", r.terms}, {"norm", r.norm}, {"bound", r.bound}});
    return {{"plan_digest", plan_digest}, {"truncation_horizon", truncation_horizon}, {"step_one", rows}};
}

FhcVector FhcVector::from_json(const nlohmann::json& doc)
{
    try {
        FhcVector v{GridFunction::from_json(doc.at("x")), {}, doc.at("truncation_horizon").get<double>(),
                    doc.at("plan_digest").get<std::string>(), {}};
        for (const auto& t : doc.at("terms")) {
            const auto& b = t.at("b");
            v.terms.push_back({{b.at(0).get<double>(), b.at(1).get<double>()},
                               t.at("level").get<std::size_t>(),
                               t.at("target").get<std::size_t>()});
        }
        return v;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed vector document: ") + e.what());
    }
}

namespace {

std::vector<Term> collect_terms(const CriterionPlan& plan, double horizon)
{
    const auto& family = plan.family;
    const auto& sector = family.sector();
    const Dyadic h = plan.targets.front().pitch();
    struct Keyed {
        double n;
        std::size_t order;
        Term term;
    };
    std::vector<Keyed> keyed;
    for (std::size_t l = 1; l <= plan.levels(); ++l) {
        const auto points = family.points(l, horizon);
        for (std::size_t k = 0; k < points.size(); ++k) {
            const SectorPoint b = snap_into_sector(points[k], sector, h);
            if (b.modulus() <= horizon)
                keyed.push_back({points[k].x, k, {b, l, l}});
        }
    }
    // Cuts at distinct n never share a level, so (n, order) is a total order.
    std::sort(keyed.begin(), keyed.end(),
              [](const Keyed& a, const Keyed& b) { return a.n != b.n ? a.n < b.n : a.order < b.order; });
    std::vector<Term> terms;
    terms.reserve(keyed.size());
    for (auto& k : keyed)
        terms.push_back(k.term);
    return terms;
}

std::vector<GridFunction> shifted_terms(const CriterionPlan& plan, const std::vector<Term>& terms)
{
    std::vector<GridFunction> parts;
    parts.reserve(terms.size());
    for (const auto& t : terms) {
        if (t.target == 0 || t.target > plan.levels())
            throw InputError("term refers to a missing target");
        parts.push_back(backshift(plan.target(t.target), t.b));
    }
    return parts;
}

} // namespace

FhcVector construct_vector(const CriterionPlan& plan, const ConstructOptions& options)
{
    if (!(options.horizon >= 0.0) || !std::isfinite(options.horizon))
        throw InputError("construction horizon must be finite and non-negative");
    const auto& sector = plan.family.sector();
    const Dyadic h = plan.targets.front().pitch();

    FhcVector v{GridFunction(sector, h), collect_terms(plan, options.horizon), 0.0, plan.digest(), {}};
    const auto parts = shifted_terms(plan, v.terms);
    v.x = sum_of(parts, sector, h);
    for (const auto& t : v.terms)
        v.truncation_horizon = std::max(v.truncation_horizon, t.b.modulus());

    for (std::size_t l = 1; l <= plan.levels(); ++l) {
        const double bound = 2.0 / std::ldexp(1.0, static_cast<int>(l)) * options.slack;
        const double r = static_cast<double>(plan.radii[l - 1]);
        std::vector<std::size_t> tail;
        for (std::size_t k = 0; k < v.terms.size(); ++k)
            if (v.terms[k].b.modulus() >= r)
                tail.push_back(k);

        auto record = [&](std::string name, const std::vector<std::size_t>& subset) {
            std::vector<GridFunction> chosen;
            chosen.reserve(subset.size());
            for (const std::size_t k : subset)
                chosen.push_back(parts[k]);
            const double value = norm(sum_of(chosen, sector, h), plan.ctx);
            v.ledger.push_back({l, name, subset.size(), value, bound});
            if (!(value <= bound))
                throw ConstructionFailed("level " + std::to_string(l) + " partial sum over subset '" + name +
                                         "' has norm " + num(value) + " above " + num(bound));
        };

        record("tail", tail);
        for (std::size_t j = 1; j <= plan.levels(); ++j) {
            std::vector<std::size_t> subset;
            for (const std::size_t k : tail)
                if (v.terms[k].level == j)
                    subset.push_back(k);
            record("level-" + std::to_string(j), subset);
        }
        std::vector<std::size_t> upper(tail.begin() + static_cast<std::ptrdiff_t>(tail.size() / 2), tail.end());
        record("upper-half", upper);
        for (std::size_t s = 0; s < options.subset_trials; ++s) {
            Stream stream(substream_seed(options.seed, {l, s}));
            std::vector<std::size_t> subset;
            for (const std::size_t k : tail)
                if (stream.next() >> 63)
                    subset.push_back(k);
            record("random-" + std::to_string(s), subset);
        }
    }
    return v;
}

GridFunction resum(const FhcVector& v, const CriterionPlan& plan)
{
    return sum_of(shifted_terms(plan, v.terms), plan.family.sector(), plan.targets.front().pitch());
}

nlohmann::json ReturnReport::to_json() const
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : samples)
        rows.push_back({{"t", {s.t.x, s.t.y}}, {"error", s.error}});
    return {{"level", level},     {"bound", bound}, {"admissible", admissible}, {"excluded", excluded},
            {"worst", worst},     {"pass", pass},   {"samples", rows}};
}

ReturnReport verify_return(const FhcVector& v, const CriterionPlan& plan, std::size_t level, std::size_t sample_count,
                           double slack, bool throw_on_failure)
{
    if (level == 0 || level > plan.levels())
        throw InputError("level " + std::to_string(level) + " is outside the plan");
    require_plan_match(v, plan);
    const GridFunction& y = plan.target(level);
    const double limit = v.truncation_horizon - y.support_radius();

    ReturnReport report;
    report.level = level;
    report.bound = 3.0 / std::ldexp(1.0, static_cast<int>(level)) * slack;
    std::vector<SectorPoint> admissible;
    for (const auto& t : v.terms) {
        if (t.level != level)
            continue;
        if (t.b.modulus() <= limit)
            admissible.push_back(t.b);
        else
            ++report.excluded;
    }
    report.admissible = admissible.size();

    std::vector<SectorPoint> chosen;
    if (sample_count >= admissible.size() || admissible.empty()) {
        chosen = admissible;
    } else {
        for (std::size_t k = 0; k < sample_count; ++k)
            chosen.push_back(admissible[k * admissible.size() / sample_count]);
    }
    report.samples.resize(chosen.size());
    parallel_for(chosen.size(), 0, [&](std::size_t k) {
        report.samples[k] = {chosen[k], distance(translate(v.x, chosen[k]), y, plan.ctx)};
    });
    SectorPoint worst_t;
    for (const auto& s : report.samples)
        if (s.error >= report.worst) {
            report.worst = s.error;
            worst_t = s.t;
        }
    report.pass = report.worst <= report.bound;
    if (!report.pass && throw_on_failure)
        throw VerificationFailed("return error " + num(report.worst) + " at t = " + point_str(worst_t) +
                                 " exceeds " + num(report.bound));
    return report;
}

OrbitProbe::OrbitProbe(const GridFunction& x, const GridFunction& y, const LpContext& ctx)
    : x_(&x), y_(&y), ctx_(&ctx)
{
    if (!x.same_grid(y))
        throw InputError("vector and target live on different grids");
    const double area = y.h() * y.h();
    y_weights_.reserve(y.cells().size());
    for (const auto& cv : y.cells())
        y_weights_.push_back(ctx.weight(y.center(cv.cell)) * area);
}

double OrbitProbe::cutoff_distance_power(Cell shift, double cutoff) const
{
    const double p = ctx_->p;
    double sum = 0.0;
    const auto& ycells = y_->cells();
    for (std::size_t k = 0; k < ycells.size(); ++k) {
        const Cell q = ycells[k].cell;
        const double xv = x_->coefficient({q.i + shift.i, q.j + shift.j});
        sum += power(std::abs(xv - ycells[k].coefficient), p) * y_weights_[k];
    }
    if (sum >= cutoff)
        return sum;
    const double area = y_->h() * y_->h();
    for (const auto& cv : x_->cells()) {
        const Cell q{cv.cell.i - shift.i, cv.cell.j - shift.j};
        if (!x_->center_in_sector(q) || y_->coefficient(q) != 0.0)
            continue;
        sum += power(std::abs(cv.coefficient), p) * ctx_->weight(x_->center(q)) * area;
    }
    return sum;
}

double OrbitProbe::distance_power(SectorPoint t) const
{
    if (!x_->sector().contains(t))
        throw InputError("translation vector lies outside the sector");
    return cutoff_distance_power(grid_offset(t, x_->pitch()), std::numeric_limits<double>::infinity());
}

bool OrbitProbe::within(SectorPoint t, double radius) const
{
    if (!x_->sector().contains(t))
        return false;
    const double cutoff = power(radius, ctx_->p);
    return cutoff_distance_power(grid_offset(t, x_->pitch()), cutoff) < cutoff;
}

namespace {

void require_horizons(std::span<const double> horizons, double limit)
{
    if (horizons.empty())
        throw InputError("at least one horizon is required");
    if (horizons.back() > limit)
        throw InputError("horizon " + num(horizons.back()) + " exceeds the usable truncation " + num(limit));
}

nlohmann::json estimate_json(const DensityEstimate& e)
{
    return {{"ratios", e.ratios},
            {"halfwidths", e.halfwidths},
            {"liminf_proxy", e.liminf_proxy},
            {"seed", e.method.seed},
            {"samples", e.method.samples},
            {"csv", e.to_csv()}};
}

} // namespace

nlohmann::json OrbitReport::to_json() const
{
    nlohmann::json doc = estimate_json(estimate);
    doc["delta0"] = delta0;
    doc["analytic_bound"] = analytic_bound;
    doc["level"] = level ? nlohmann::json(*level) : nlohmann::json(nullptr);
    return doc;
}

OrbitReport orbit_density(const FhcVector& v, const CriterionPlan& plan, const GridFunction& y, double radius,
                          std::span<const double> horizons, const EstimationMethod& method)
{
    if (!(radius > 0.0))
        throw InputError("ball radius must be positive");
    require_plan_match(v, plan);
    require_horizons(horizons, v.truncation_horizon - y.support_radius());
    if (method.kind != EstimationMethod::Kind::monte_carlo)
        throw InputError("orbit densities are estimated by sampling");

    const OrbitProbe probe(v.x, y, plan.ctx);
    const Dyadic h = v.x.pitch();
    const Sector& sector = v.x.sector();
    const auto set = SectorSet::predicate(sector, [&](const SectorPoint& t) {
        const SectorPoint s = snap_to_grid(t, h);
        return sector.contains(s) && probe.within(s, radius);
    });

    OrbitReport report{sector_lower_density(set, horizons, method), std::nullopt, h.value(), 0.0};
    for (std::size_t l = 1; l <= plan.levels(); ++l)
        if (plan.target(l) == y) {
            report.level = l;
            report.analytic_bound = return_set_density_bound(plan.family, l, report.delta0, 0.0).bound;
            break;
        }
    return report;
}

nlohmann::json TransitionReport::to_json() const
{
    nlohmann::json doc = conclusive ? estimate_json(estimate) : nlohmann::json::object();
    doc["conclusive"] = conclusive;
    doc["t0"] = t0 ? nlohmann::json::array({t0->x, t0->y}) : nlohmann::json(nullptr);
    doc["inclusion_checks"] = inclusion_checks;
    doc["inclusion_holds"] = inclusion_holds;
    return doc;
}

TransitionReport transition_density(const FhcVector& v, const CriterionPlan& plan, const GridFunction& u_center,
                                    double u_radius, const GridFunction& v_center, double v_radius,
                                    std::span<const double> horizons, const EstimationMethod& method)
{
    if (!(u_radius > 0.0) || !(v_radius > 0.0))
        throw InputError("ball radii must be positive");
    require_plan_match(v, plan);
    const double reach = v.truncation_horizon - std::max(u_center.support_radius(), v_center.support_radius());
    require_horizons(horizons, reach);
    if (method.kind != EstimationMethod::Kind::monte_carlo)
        throw InputError("transition densities are estimated by sampling");

    TransitionReport report;
    const OrbitProbe u_probe(v.x, u_center, plan.ctx);
    std::vector<SectorPoint> candidates{{0.0, 0.0}};
    for (const auto& t : v.terms)
        candidates.push_back(t.b);
    const double t0_limit = reach - horizons.back();
    for (const auto& c : candidates)
        if (c.modulus() <= t0_limit && u_probe.within(c, u_radius)) {
            report.t0 = c;
            break;
        }
    if (!report.t0)
        return report;
    report.conclusive = true;

    const SectorPoint t0 = *report.t0;
    const OrbitProbe v_probe(v.x, v_center, plan.ctx);
    const Dyadic h = v.x.pitch();
    const Sector& sector = v.x.sector();
    auto member = [&](const SectorPoint& s) {
        const SectorPoint snapped = snap_to_grid(s, h);
        return sector.contains(snapped) && v_probe.within(snapped + t0, v_radius);
    };
    report.estimate = sector_lower_density(SectorSet::predicate(sector, member), horizons, method);

    // Spot-check that sampled members s satisfy T_s (T_t0 x) in V, so s lies in N(U, V).
    const GridFunction hit = translate(v.x, t0);
    Stream stream(substream_seed(method.seed, {0x7472616e73ULL}));
    const double T = horizons.back();
    for (std::size_t draw = 0; draw < 20000 && report.inclusion_checks < 16; ++draw) {
        const double r = T * std::sqrt(stream.uniform());
        const double theta = sector.alpha() * (2.0 * stream.uniform() - 1.0);
        const SectorPoint s = snap_to_grid({r * std::cos(theta), r * std::sin(theta)}, h);
        if (!member(s))
            continue;
        ++report.inclusion_checks;
        const GridFunction moved = translate(hit, s);
        if (!(moved == translate(v.x, s + t0)) || !(distance(moved, v_center, plan.ctx) < v_radius))
            report.inclusion_holds = false;
    }
    return report;
}

} // namespace sectorfhc
