#pragma once

#include "sectorfhc/density.hpp"
#include "sectorfhc/sector.hpp"
#include "sectorfhc/sector_set.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sectorfhc {

/// Claimed constants of the growth condition rho(t) <= M e^{omega |t'|} rho(t + t').
struct Admissibility {
    double M = 1.0;
    double omega = 0.0;
};

/// A positive weight on a sector together with its claimed admissibility
/// constants and, when known, the closed-form radial tail
/// G(R) = integral of rho over {tau in sector : |tau| >= R}.
class WeightFn {
public:
    using Evaluator = std::function<double(const SectorPoint&)>;
    using RadialTail = std::function<double(double)>;

    WeightFn(std::string name, const Sector& sector, Evaluator evaluator, Admissibility admissibility,
             RadialTail radial_tail = nullptr);

    double operator()(const SectorPoint& p) const { return evaluator_(p); }

    const std::string& name() const noexcept { return name_; }
    const Sector& sector() const noexcept { return sector_; }
    const Admissibility& admissibility() const noexcept { return admissibility_; }
    bool has_radial_tail() const noexcept { return static_cast<bool>(radial_tail_); }
    double radial_tail(double radius) const;

private:
    std::string name_;
    Sector sector_;
    Evaluator evaluator_;
    Admissibility admissibility_;
    RadialTail radial_tail_;
};

/// Catalog: "gauss" e^{-|t|^2}, "exp" e^{-|t|}, "cubic" (1 on |t| <= 1, |t|^-3
/// beyond) and "chaouchi" (only on the sector of half-angle pi/4).
WeightFn catalog_weight(std::string_view name, const Sector& sector);
WeightFn catalog_weight(std::string_view name);

std::vector<std::string> catalog_names();

struct AdmissibilityResult {
    bool pass = true;
    std::size_t samples = 0;
    double worst_ratio = 0.0; // max of rho(t) / (M e^{omega|t'|} rho(t + t'))
    SectorPoint worst_t;
    SectorPoint worst_t_prime;
};

/// Samples (t, t') uniformly in Delta_T x Delta_T and checks the growth
/// condition. Passing is evidence only.
AdmissibilityResult check_admissibility(const WeightFn& w, std::uint64_t seed, std::size_t count, double T = 8.0);

enum class IntegralStatus { finite, divergent, undecided };

struct IntegralResult {
    IntegralStatus status = IntegralStatus::undecided;
    double value = 0.0;       // best estimate when finite, last partial otherwise
    double error_bound = 0.0;
    double radius = 0.0;      // outermost radius integrated
    std::vector<std::pair<double, double>> partials; // (R, integral over Delta_R)
};

struct IntegrationOptions {
    double initial_radius = 1.0;
    std::size_t max_doublings = 64;
    std::size_t divergence_run = 6;
};

/// Integral of rho over the sector in polar coordinates over doubling radii.
IntegralResult integrate_weight(const WeightFn& w, double tol, const IntegrationOptions& options = {});

/// Integral of rho over the annulus {R_inner <= |tau| <= R_outer} of the sector.
double integrate_annulus(const WeightFn& w, double r_inner, double r_outer, double rel_tol);

/// G(R): the closed form when available, otherwise summed annuli. Throws
/// CriterionInapplicable when the tail does not settle.
double tail_mass(const WeightFn& w, double radius);

/// {t : rho(t) <= epsilon} as a predicate set.
SectorSet sublevel_set(const WeightFn& w, double epsilon);

/// {t : t + K ⊆ sublevel(epsilon)} with K = Delta_{R_K} replaced by a polar
/// cover of pitch R_K / 8.
SectorSet erosion_set(const WeightFn& w, double epsilon, double compact_radius);

/// Cover nodes used by erosion_set, the apex first.
std::vector<SectorPoint> erosion_cover(const Sector& sector, double compact_radius);

enum class Verdict { pass, fail, inconclusive };
std::string_view to_string(Verdict v) noexcept;

struct SufficientVerdict {
    Verdict status = Verdict::inconclusive;
    IntegralResult integral;
};

struct NecessaryCurve {
    double epsilon = 0.0;
    double erosion_radius = 0.0;
    DensityEstimate estimate;
};

struct NecessaryOptions {
    std::vector<double> epsilons{0.5, 0.1, 0.01};
    std::vector<double> horizons{1e2, 1e3, 1e4};
    std::vector<double> erosion_radii{1.0};
    std::uint64_t seed = 0;
    std::size_t samples = 200000;
    unsigned workers = 0;
    double fail_threshold = 0.02;
    double pass_threshold = 0.05;
};

struct NecessaryVerdict {
    Verdict status = Verdict::inconclusive;
    std::vector<NecessaryCurve> curves;
    std::optional<double> failing_epsilon;
};

SufficientVerdict check_sufficient(const WeightFn& w, double tol);
NecessaryVerdict check_necessary(const WeightFn& w, const NecessaryOptions& options);

/// Non-increasing within the combined statistical half-widths.
bool is_non_increasing(const DensityEstimate& e);
/// Each ratio below its predecessor by more than the combined half-widths.
bool is_strictly_decreasing(const DensityEstimate& e);

struct WeightVerdict {
    std::string name;
    SufficientVerdict sufficient;
    NecessaryVerdict necessary;
    nlohmann::json evidence = nlohmann::json::array();

    nlohmann::json to_json() const;
};

/// Exact density of {y <= k x} within the sector of half-angle pi/4 at
/// horizon t, i.e. the complement of the cone {k x <= y <= x}.
double cone_complement_density(double k, double t);

} // namespace sectorfhc
