#include "sectorfhc/weights.hpp"

#include "sectorfhc/error.hpp"
#include "sectorfhc/sampling.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

namespace sectorfhc {

WeightFn::WeightFn(std::string name, const Sector& sector, Evaluator evaluator, Admissibility admissibility,
                   RadialTail radial_tail)
    : name_(std::move(name)), sector_(sector), evaluator_(std::move(evaluator)), admissibility_(admissibility),
      radial_tail_(std::move(radial_tail))
{
    if (!evaluator_)
        throw InputError("weight needs an evaluator");
    if (!(admissibility_.M >= 1.0) || !std::isfinite(admissibility_.omega))
        throw InputError("admissibility constants need M >= 1 and finite omega");
}

double WeightFn::radial_tail(double radius) const
{
    if (!radial_tail_)
        throw InputError("weight '" + name_ + "' has no closed-form radial tail");
    return radial_tail_(std::max(radius, 0.0));
}

std::vector<std::string> catalog_names()
{
    return {"gauss", "exp", "cubic", "chaouchi"};
}

WeightFn catalog_weight(std::string_view name, const Sector& sector)
{
    const double alpha = sector.alpha();
    if (name == "gauss") {
        // e^{-|t|^2} satisfies no growth bound with finite (M, omega) on an
        // unbounded sector; (1, 0) is recorded so that sampling exposes it.
        return WeightFn(
            "gauss", sector, [](const SectorPoint& p) { return std::exp(-(p.x * p.x + p.y * p.y)); }, {1.0, 0.0},
            [alpha](double R) { return alpha * std::exp(-R * R); });
    }
    if (name == "exp") {
        return WeightFn(
            "exp", sector, [](const SectorPoint& p) { return std::exp(-p.modulus()); }, {1.0, 1.0},
            [alpha](double R) { return 2.0 * alpha * (R + 1.0) * std::exp(-R); });
    }
    if (name == "cubic") {
        // (max(1,|t+t'|) / max(1,|t|))^3 <= (1 + |t'|)^3 <= e^{3|t'|}.
        return WeightFn(
            "cubic", sector,
            [](const SectorPoint& p) {
                const double r = p.modulus();
                return r <= 1.0 ? 1.0 : 1.0 / (r * r * r);
            },
            {1.0, 3.0},
            [alpha](double R) { return R >= 1.0 ? 2.0 * alpha / R : alpha * (1.0 - R * R) + 2.0 * alpha; });
    }
    if (name == "chaouchi") {
        if (alpha != std::numbers::pi / 4.0)
            throw CatalogError("the chaouchi weight is only defined on the sector of half-angle pi/4");
        // Exponent loss along t' is at most sqrt(2|t'|) <= 1/2 + |t'|.
        return WeightFn(
            "chaouchi", sector,
            [](const SectorPoint& p) {
                const double lift = std::sqrt(std::max(0.0, p.x - p.y));
                const double sum = p.x + p.y;
                return sum >= lift ? 1.0 : std::exp(sum - lift);
            },
            {std::exp(0.5), 1.0});
    }
    throw CatalogError("unknown weight '" + std::string(name) + "'");
}

WeightFn catalog_weight(std::string_view name)
{
    return catalog_weight(name, Sector(std::numbers::pi / 4.0));
}

AdmissibilityResult check_admissibility(const WeightFn& w, std::uint64_t seed, std::size_t count, double T)
{
    if (count == 0)
        throw InputError("admissibility check needs at least one sample");
    if (!(T > 0.0))
        throw InputError("admissibility sampling radius must be positive");
    const double alpha = w.sector().alpha();
    Stream rng(substream_seed(seed, {0xad}));
    auto draw = [&]() {
        const double r = T * std::sqrt(rng.uniform());
        const double theta = -alpha + 2.0 * alpha * rng.uniform();
        return SectorPoint{r * std::cos(theta), r * std::sin(theta)};
    };
    const auto [M, omega] = w.admissibility();
    AdmissibilityResult result;
    result.samples = count;
    result.worst_ratio = -1.0;
    for (std::size_t i = 0; i < count; ++i) {
        const SectorPoint t = draw();
        const SectorPoint tp = draw();
        const double lhs = w(t);
        const double rhs = M * std::exp(omega * tp.modulus()) * w(t + tp);
        const double ratio = lhs / rhs;
        if (ratio > result.worst_ratio) {
            result.worst_ratio = ratio;
            result.worst_t = t;
            result.worst_t_prime = tp;
        }
    }
    // One ulp-scale allowance for the exact identities of the exp and cubic weights.
    result.pass = result.worst_ratio <= 1.0 + 1e-12;
    return result;
}

double integrate_annulus(const WeightFn& w, double r_inner, double r_outer, double rel_tol)
{
    using boost::math::quadrature::gauss_kronrod;
    const double alpha = w.sector().alpha();
    auto radial = [&](double theta) {
        const double c = std::cos(theta), s = std::sin(theta);
        auto f = [&](double r) {
            const SectorPoint p{r * c, r * s};
            const double v = w(p);
            if (!std::isfinite(v))
                throw EvaluationError(p.x, p.y, "weight '" + w.name() + "' is not finite at a quadrature node");
            return v * r;
        };
        return gauss_kronrod<double, 15>::integrate(f, r_inner, r_outer, 12, rel_tol);
    };
    return gauss_kronrod<double, 15>::integrate(radial, -alpha, alpha, 12, rel_tol);
}

IntegralResult integrate_weight(const WeightFn& w, double tol, const IntegrationOptions& options)
{
    if (!(tol > 0.0))
        throw InputError("integration tolerance must be positive");
    if (!(options.initial_radius > 0.0))
        throw InputError("initial radius must be positive");
    const double quad_tol = std::min(1e-10, tol * 1e-3);

    IntegralResult result;
    double inner = 0.0;
    double outer = options.initial_radius;
    double partial = 0.0;
    double previous_increment = -1.0;
    std::size_t small_run = 0;
    std::size_t growth_run = 0;
    for (std::size_t d = 0; d <= options.max_doublings; ++d) {
        const double increment = integrate_annulus(w, inner, outer, quad_tol);
        partial += increment;
        result.partials.emplace_back(outer, partial);
        result.radius = outer;
        result.value = partial;
        if (w.has_radial_tail()) {
            const double tail = w.radial_tail(outer);
            if (tail < tol * partial) {
                result.status = IntegralStatus::finite;
                result.value = partial + tail / 2.0;
                result.error_bound = tail;
                return result;
            }
        } else {
            small_run = increment < tol * partial ? small_run + 1 : 0;
            if (small_run >= 2) {
                result.status = IntegralStatus::finite;
                result.error_bound = increment;
                return result;
            }
            if (previous_increment >= 0.0)
                growth_run = increment >= previous_increment ? growth_run + 1 : 0;
            if (growth_run >= options.divergence_run) {
                result.status = IntegralStatus::divergent;
                return result;
            }
        }
        previous_increment = increment;
        inner = outer;
        outer *= 2.0;
    }
    return result;
}

double tail_mass(const WeightFn& w, double radius)
{
    if (w.has_radial_tail())
        return w.radial_tail(radius);
    double inner = std::max(radius, 0.0);
    double outer = std::max(2.0 * inner, 1.0);
    double total = 0.0;
    double previous = -1.0;
    std::size_t growth = 0;
    for (int d = 0; d < 64; ++d) {
        const double inc = integrate_annulus(w, inner, outer, 1e-10);
        total += inc;
        if (inc <= 1e-12 * total || (total == 0.0 && inc == 0.0))
            return total;
        growth = previous >= 0.0 && inc >= previous ? growth + 1 : 0;
        if (growth >= 6)
            throw CriterionInapplicable("weight '" + w.name() + "' has a divergent tail integral");
        previous = inc;
        inner = outer;
        outer *= 2.0;
    }
    throw CriterionInapplicable("tail integral of weight '" + w.name() + "' did not settle");
}

SectorSet sublevel_set(const WeightFn& w, double epsilon)
{
    if (!(epsilon > 0.0))
        throw InputError("sublevel threshold must be positive");
    return SectorSet::predicate(w.sector(), [w, epsilon](const SectorPoint& p) { return w(p) <= epsilon; });
}

std::vector<SectorPoint> erosion_cover(const Sector& sector, double compact_radius)
{
    if (!(compact_radius > 0.0))
        throw InputError("compact radius must be positive");
    const double pitch = compact_radius / 8.0;
    const double alpha = sector.alpha();
    std::vector<SectorPoint> nodes{{0.0, 0.0}};
    for (int i = 1; i <= 8; ++i) {
        const double rho = pitch * i;
        const auto gaps = static_cast<int>(std::max(1.0, std::ceil(2.0 * alpha * rho / pitch)));
        for (int k = 0; k <= gaps; ++k) {
            const double theta = -alpha + 2.0 * alpha * k / gaps;
            nodes.push_back({rho * std::cos(theta), rho * std::sin(theta)});
        }
    }
    return nodes;
}

SectorSet erosion_set(const WeightFn& w, double epsilon, double compact_radius)
{
    if (!(epsilon > 0.0))
        throw InputError("sublevel threshold must be positive");
    auto cover = erosion_cover(w.sector(), compact_radius);
    return SectorSet::predicate(w.sector(), [w, epsilon, cover = std::move(cover)](const SectorPoint& t) {
        for (const auto& n : cover)
            if (!(w(t + n) <= epsilon))
                return false;
        return true;
    });
}

std::string_view to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::pass:
        return "pass";
    case Verdict::fail:
        return "fail";
    default:
        return "inconclusive";
    }
}

SufficientVerdict check_sufficient(const WeightFn& w, double tol)
{
    SufficientVerdict v;
    v.integral = integrate_weight(w, tol);
    switch (v.integral.status) {
    case IntegralStatus::finite:
        v.status = Verdict::pass;
        break;
    case IntegralStatus::divergent:
        v.status = Verdict::fail;
        break;
    default:
        v.status = Verdict::inconclusive;
    }
    return v;
}

bool is_non_increasing(const DensityEstimate& e)
{
    for (std::size_t i = 1; i < e.ratios.size(); ++i)
        if (e.ratios[i] > e.ratios[i - 1] + e.halfwidths[i] + e.halfwidths[i - 1])
            return false;
    return true;
}

bool is_strictly_decreasing(const DensityEstimate& e)
{
    for (std::size_t i = 1; i < e.ratios.size(); ++i)
        if (!(e.ratios[i] + e.halfwidths[i] + e.halfwidths[i - 1] < e.ratios[i - 1]))
            return false;
    return true;
}

NecessaryVerdict check_necessary(const WeightFn& w, const NecessaryOptions& options)
{
    if (options.epsilons.empty() || options.erosion_radii.empty())
        throw InputError("necessary check needs epsilons and erosion radii");
    const double smallest = *std::min_element(options.erosion_radii.begin(), options.erosion_radii.end());
    const auto method = EstimationMethod::monte_carlo(options.seed, options.samples, options.workers);

    NecessaryVerdict verdict;
    bool all_pass = true;
    for (std::size_t e = 0; e < options.epsilons.size(); ++e) {
        const double eps = options.epsilons[e];
        for (std::size_t k = 0; k < options.erosion_radii.size(); ++k) {
            const double radius = options.erosion_radii[k];
            EstimationMethod m = method;
            m.seed = substream_seed(options.seed, {e, k});
            auto est = sector_lower_density(erosion_set(w, eps, radius), options.horizons, m);
            if (est.liminf_proxy <= options.pass_threshold)
                all_pass = false;
            if (radius == smallest && !verdict.failing_epsilon && is_non_increasing(est) &&
                est.ratios.back() < options.fail_threshold)
                verdict.failing_epsilon = eps;
            verdict.curves.push_back({eps, radius, std::move(est)});
        }
    }
    if (verdict.failing_epsilon)
        verdict.status = Verdict::fail;
    else if (all_pass)
        verdict.status = Verdict::pass;
    else
        verdict.status = Verdict::inconclusive;
    return verdict;
}

namespace {

std::string_view to_string(IntegralStatus s)
{
    switch (s) {
    case IntegralStatus::finite:
        return "finite";
    case IntegralStatus::divergent:
        return "divergent";
    default:
        return "undecided";
    }
}

} // namespace

nlohmann::json WeightVerdict::to_json() const
{
    nlohmann::json partials = nlohmann::json::array();
    for (const auto& [R, v] : sufficient.integral.partials)
        partials.push_back({R, v});
    nlohmann::json suff{{"status", to_string(sufficient.status)},
                        {"integral", to_string(sufficient.integral.status)},
                        {"value", sufficient.integral.value},
                        {"error_bound", sufficient.integral.error_bound},
                        {"radius", sufficient.integral.radius},
                        {"partials", partials}};
    nlohmann::json curves = nlohmann::json::array();
    for (const auto& c : necessary.curves)
        curves.push_back({{"epsilon", c.epsilon},
                          {"erosion_radius", c.erosion_radius},
                          {"liminf_proxy", c.estimate.liminf_proxy},
                          {"seed", c.estimate.method.seed},
                          {"samples", c.estimate.method.samples},
                          {"csv", c.estimate.to_csv()}});
    nlohmann::json nec{{"status", to_string(necessary.status)}, {"curves", curves}};
    if (necessary.failing_epsilon)
        nec["failing_epsilon"] = *necessary.failing_epsilon;
    return {{"name", name}, {"sufficient", suff}, {"necessary", nec}, {"evidence", evidence}};
}

double cone_complement_density(double k, double t)
{
    const Sector quarter(std::numbers::pi / 4.0);
    const auto set = SectorSet::exact(quarter, {HalfPlaneCut{-k, 1.0, 0.0}});
    const double horizon[] = {t};
    return sector_lower_density(set, horizon, EstimationMethod::exact(1)).ratios.front();
}

} // namespace sectorfhc
