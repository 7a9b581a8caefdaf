#pragma once

#include "sectorfhc/density.hpp"
#include "sectorfhc/grid_function.hpp"
#include "sectorfhc/weights.hpp"

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sectorfhc {

/// Least integer R >= 0 with G(R - s_f)^{1/p} < eps / (M_f N), N = floor(2 s_f) + 1,
/// where G is the weight mass outside the disc of the given radius. Throws
/// CriterionInapplicable when the weight integral diverges.
std::uint64_t tail_radius(const GridFunction& y, const LpContext& ctx, double eps);

/// Covering multiplicity floor(2 s_f) + 1.
std::uint64_t cover_multiplicity(const GridFunction& y);

/// Targets y_1..y_L, the separations r_l chosen from the weight tail and the
/// separated family built on them. For translation semigroups T_t S_t = id
/// on the grid, so the return condition holds with zero error at every level.
struct CriterionPlan {
    LpContext ctx;
    std::vector<GridFunction> targets;
    std::vector<std::uint64_t> radii;
    std::vector<std::uint64_t> multiplicities;
    SeparatedFamily family;

    std::size_t levels() const noexcept { return targets.size(); }
    const GridFunction& target(std::size_t level) const { return targets.at(level - 1); }

    /// Canonical description used for the digest.
    nlohmann::json to_json() const;
    /// FNV-1a of the canonical description, as 16 hex digits.
    std::string digest() const;
};

CriterionPlan plan_criterion(std::vector<GridFunction> targets, const LpContext& ctx, std::uint64_t integer_horizon);

struct Term {
    SectorPoint b;
    std::size_t level = 0;
    std::size_t target = 0; // z_k = y_target, equal to the level
};

struct StepOneRecord {
    std::size_t level = 0;
    std::string subset;
    std::size_t terms = 0;
    double norm = 0.0;
    double bound = 0.0; // 2 / 2^l times slack
};

struct FhcVector {
    GridFunction x;
    std::vector<Term> terms;
    double truncation_horizon = 0.0;
    std::string plan_digest;
    std::vector<StepOneRecord> ledger;

    nlohmann::json to_json() const;
    nlohmann::json ledger_json() const;
    /// Reads the vector document; the ledger is not part of it.
    static FhcVector from_json(const nlohmann::json& doc);
};

struct ConstructOptions {
    double horizon = 0.0;
    std::size_t subset_trials = 8;
    std::uint64_t seed = 0;
    double slack = 1.1;
};

/// Moves a construction point onto the grid, stepping towards the real axis
/// if rounding pushed it out of the sector.
SectorPoint snap_into_sector(SectorPoint b, const Sector& sector, Dyadic h);

/// Truncated series x = sum S_{b_k} z_k over |b_k| <= horizon, with the
/// partial-sum ledger. Throws ConstructionFailed if a recorded partial sum
/// exceeds 2 / 2^l times the slack.
FhcVector construct_vector(const CriterionPlan& plan, const ConstructOptions& options);

/// Re-sums x from the recorded terms in the same order.
GridFunction resum(const FhcVector& v, const CriterionPlan& plan);

struct ReturnSample {
    SectorPoint t;
    double error = 0.0;
};

struct ReturnReport {
    std::size_t level = 0;
    double bound = 0.0; // 3 / 2^l times slack
    std::size_t admissible = 0;
    std::size_t excluded = 0;
    std::vector<ReturnSample> samples;
    double worst = 0.0;
    bool pass = true;

    nlohmann::json to_json() const;
};

/// ||T_t x - y_l|| at up to sample_count points t of B(l, r_l) with
/// |t| + s_{y_l} inside the truncation. Throws VerificationFailed when the
/// bound is exceeded unless `throw_on_failure` is false.
ReturnReport verify_return(const FhcVector& v, const CriterionPlan& plan, std::size_t level, std::size_t sample_count,
                           double slack = 1.1, bool throw_on_failure = true);

/// Decides ||T_t x - y|| < c for grid-aligned t, skipping the full sum when the
/// part over supp y already reaches c.
class OrbitProbe {
public:
    OrbitProbe(const GridFunction& x, const GridFunction& y, const LpContext& ctx);

    /// ||T_t x - y||^p for grid-aligned t in the sector.
    double distance_power(SectorPoint t) const;
    bool within(SectorPoint t, double radius) const;

private:
    double cutoff_distance_power(Cell shift, double cutoff) const;

    const GridFunction* x_;
    const GridFunction* y_;
    const LpContext* ctx_;
    std::vector<double> y_weights_; // rho(center) h^2 per cell of y
};

struct OrbitReport {
    DensityEstimate estimate;
    std::optional<std::size_t> level;
    double delta0 = 0.0;
    double analytic_bound = 0.0;

    nlohmann::json to_json() const;
};

/// Density of {t : ||T_{snap(t)} x - y|| < c}; when y is one of the plan
/// targets the closed-form return-set bound with delta0 = h is attached.
OrbitReport orbit_density(const FhcVector& v, const CriterionPlan& plan, const GridFunction& y, double radius,
                          std::span<const double> horizons, const EstimationMethod& method);

struct TransitionReport {
    bool conclusive = false;
    std::optional<SectorPoint> t0;
    DensityEstimate estimate;
    std::size_t inclusion_checks = 0;
    bool inclusion_holds = true;

    nlohmann::json to_json() const;
};

/// Density of the shifted hitting set N(x, V) - t0 ⊆ N(U, V) for a hitting
/// time t0 of U found among the origin and the series anchors.
TransitionReport transition_density(const FhcVector& v, const CriterionPlan& plan, const GridFunction& u_center,
                                    double u_radius, const GridFunction& v_center, double v_radius,
                                    std::span<const double> horizons, const EstimationMethod& method);

} // namespace sectorfhc
