// Acceptance run: one line per criterion, non-zero exit if any fails.

#include "sectorfhc/cli.hpp"
#include "sectorfhc/density.hpp"
#include "sectorfhc/error.hpp"
#include "sectorfhc/fhc.hpp"
#include "sectorfhc/grid_function.hpp"
#include "sectorfhc/weights.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>

using namespace sectorfhc;
namespace fs = std::filesystem;

namespace {

const double kAlpha = std::numbers::pi / 4;
const Sector kQuarter(kAlpha);
const Dyadic kEighth(1, 3);

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int failures = 0;

void criterion(int id, double limit_seconds, const std::function<void(Outcome&)>& body)
{
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(secs <= limit_seconds, "took " + fmt(secs) + " s, limit " + fmt(limit_seconds) + " s");
    if (!out.pass)
        ++failures;
    std::printf("criterion %2d: %s  (%.2f s)%s%s\n", id, out.pass ? "PASS" : "FAIL", secs,
                out.detail.empty() ? "" : "  ", out.detail.c_str());
    std::fflush(stdout);
}

double timed(const std::function<void()>& f)
{
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("sectorfhc-acceptance-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

cli::RunConfig config_of(nlohmann::json doc, const fs::path& out, unsigned workers = 0)
{
    cli::RunConfig c;
    c.doc = std::move(doc);
    c.out_dir = out;
    c.workers = workers;
    return c;
}

CriterionPlan desk_plan()
{
    return plan_criterion({GridFunction::indicator_disc(kQuarter, kEighth, 1.0, 8.0),
                           GridFunction::indicator_disc(kQuarter, kEighth, 1.0, 4.0)},
                          LpContext(1.0, catalog_weight("exp")), 256);
}

FhcVector desk_vector(const CriterionPlan& plan)
{
    ConstructOptions opt;
    opt.horizon = 200;
    opt.seed = 1;
    return construct_vector(plan, opt);
}

} // namespace

int main()
{
    std::ostringstream quiet;

    criterion(1, 20.0, [](Outcome& out) {
        const std::pair<const char*, double> oracles[] = {{"gauss", kAlpha}, {"exp", 2 * kAlpha}, {"cubic", 3 * kAlpha}};
        for (const auto& [name, expected] : oracles) {
            IntegralResult r;
            const double secs = timed([&] { r = integrate_weight(catalog_weight(name), 1e-9); });
            const double rel = std::abs(r.value - expected) / expected;
            out.require(r.status == IntegralStatus::finite && rel <= 1e-6,
                        std::string(name) + " relative error " + fmt(rel));
            out.require(secs < 5.0, std::string(name) + " took " + fmt(secs) + " s");
        }
        IntegralResult c;
        const double secs = timed([&] { c = integrate_weight(catalog_weight("chaouchi"), 1e-9); });
        out.require(c.status == IntegralStatus::divergent, "chaouchi integral not reported divergent");
        out.require(secs < 5.0, "chaouchi took " + fmt(secs) + " s");
    });

    criterion(2, 30.0, [&](Outcome& out) {
        const auto dir = scratch("c2");
        for (const char* name : {"gauss", "exp", "cubic"}) {
            int code = -1;
            const double secs = timed([&] {
                code = cli::cmd_check(config_of({{"weight", name}, {"seed", 2}}, dir / name), quiet);
            });
            const auto report = nlohmann::json::parse(slurp(dir / name / "check.json"));
            out.require(report["sufficient"]["status"] == "pass", std::string(name) + " sufficient not pass");
            out.require(code == cli::kOk, std::string(name) + " exit " + std::to_string(code));
            out.require(secs < 10.0, std::string(name) + " took " + fmt(secs) + " s");
        }
    });

    criterion(3, 120.0, [&](Outcome& out) {
        const auto dir = scratch("c3");
        const int code = cli::cmd_check(config_of({{"weight", "chaouchi"}, {"seed", 3}}, dir), quiet);
        out.require(code == cli::kNecessaryFail, "chaouchi exit " + std::to_string(code));
        const auto report = nlohmann::json::parse(slurp(dir / "check.json"));
        out.require(report["necessary"]["status"] == "fail", "necessary verdict not fail");

        const std::vector<double> hs{1e2, 1e3, 1e4};
        const auto e = sector_lower_density(sublevel_set(catalog_weight("chaouchi"), 0.5), hs,
                                            EstimationMethod::monte_carlo(3, 1000000));
        out.require(is_strictly_decreasing(e), "sublevel curve not strictly decreasing: " + fmt(e.ratios[0]) + ", " +
                                                   fmt(e.ratios[1]) + ", " + fmt(e.ratios[2]));
        out.require(e.ratios.back() < 0.05, "sublevel density at 1e4 is " + fmt(e.ratios.back()));

        bool evidence = false;
        for (const auto& item : report["evidence"])
            if (item["kind"] == "cone_complement_density") {
                evidence = item["rows"].size() == 4;
                for (const auto& row : item["rows"])
                    evidence = evidence && row.contains("linear_formula") && row.contains("discrepancy");
            }
        out.require(evidence, "cone density discrepancy missing from the report");
        for (const double k : {-0.9, -0.5, 0.0, 0.5}) {
            const auto cone = SectorSet::exact(kQuarter, {HalfPlaneCut{-k, 1.0, 0.0}});
            const auto d = sector_lower_density(cone, std::vector<double>{1.0, 100.0}, EstimationMethod::exact());
            const double angular = (kAlpha + std::atan(k)) / (std::numbers::pi / 2);
            for (double r : d.ratios)
                out.require(std::abs(r - angular) <= 1e-3, "cone density at k = " + fmt(k) + " is " + fmt(r));
        }
        out.detail = "sublevel " + fmt(e.ratios[0]) + " > " + fmt(e.ratios[1]) + " > " + fmt(e.ratios[2]) +
                     (out.detail.empty() ? "" : "; " + out.detail);
    });

    criterion(4, 1.0, [](Outcome& out) {
        const std::vector<double> hs{0.5, 1.0, 10.0, 1e3, 1e6};
        for (double alpha : {0.2, kAlpha, 1.0, std::numbers::pi / 2}) {
            const Sector s(alpha);
            for (double theta : {-alpha, 0.0, alpha / 3, alpha}) {
                const auto ray = sector_lower_density(SectorSet::ray(s, theta), hs, EstimationMethod::exact());
                for (double r : ray.ratios)
                    out.require(r == 0.0, "ray ratio " + fmt(r));
            }
            const auto full = sector_lower_density(SectorSet::full(s), hs, EstimationMethod::exact());
            for (double r : full.ratios)
                out.require(r == 1.0, "full-sector ratio " + fmt(r));
        }
    });

    criterion(5, 30.0, [](Outcome& out) {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t L = 1 + rng() % 3;
            std::vector<std::uint64_t> r;
            for (std::size_t l = 0; l < L; ++l)
                r.push_back(1 + rng() % 8);
            const auto fam = build_separated_family(r, 1 << 14, kQuarter);
            std::vector<std::pair<std::uint64_t, std::uint64_t>> all; // (n, r_l)
            for (std::size_t l = 1; l <= L; ++l) {
                out.require(fam.density_bound(l) > 0.0, "zero density bound");
                for (auto n : fam.integer_set(l)) {
                    out.require(n >= r[l - 1], "element below its separation");
                    all.emplace_back(n, r[l - 1]);
                }
            }
            for (std::size_t a = 0; a < all.size(); ++a)
                for (std::size_t b = a + 1; b < all.size(); ++b) {
                    const auto [n, rn] = all[a];
                    const auto [m, rm] = all[b];
                    if (n == m) {
                        out.require(false, "levels share " + std::to_string(n));
                        continue;
                    }
                    if ((n > m ? n - m : m - n) < rn + rm)
                        out.require(false, "gap between " + std::to_string(n) + " and " + std::to_string(m));
                }
        }
    });

    const auto plan = desk_plan();
    std::optional<FhcVector> vec;

    criterion(6, 60.0, [&](Outcome& out) {
        vec.emplace(desk_vector(plan));
        double worst = 0.0;
        for (const auto& rec : vec->ledger) {
            const double limit = 2.0 / std::ldexp(1.0, static_cast<int>(rec.level)) * 1.1;
            out.require(rec.norm <= limit, "level " + std::to_string(rec.level) + " subset " + rec.subset);
            worst = std::max(worst, rec.norm / limit);
        }
        out.require(!vec->ledger.empty(), "empty ledger");
        out.detail = std::to_string(vec->ledger.size()) + " subsets, worst norm/bound " + fmt(worst) +
                     (out.detail.empty() ? "" : "; " + out.detail);
    });

    criterion(7, 60.0, [&](Outcome& out) {
        std::string summary;
        for (std::size_t l = 1; l <= 2; ++l) {
            const auto rep = verify_return(*vec, plan, l, 1000, 1.1, false);
            out.require(rep.pass && !rep.samples.empty(), "level " + std::to_string(l) + " worst " + fmt(rep.worst));
            out.require(rep.bound == 3.0 / std::ldexp(1.0, static_cast<int>(l)) * 1.1, "bound mismatch");
            summary += "l=" + std::to_string(l) + " worst " + fmt(rep.worst) + " over " +
                       std::to_string(rep.samples.size()) + "; ";
        }
        const auto single = plan_criterion({plan.target(1)}, plan.ctx, 256);
        double nearest = 1e300;
        for (const auto& p : single.family.points(1, 1e9))
            nearest = std::min(nearest, p.modulus());
        ConstructOptions opt;
        opt.horizon = nearest;
        const auto one = construct_vector(single, opt);
        out.require(one.terms.size() == 1, "control vector has " + std::to_string(one.terms.size()) + " terms");
        if (one.terms.size() == 1) {
            const auto diff = lincomb(std::vector<double>{1.0, -1.0},
                                      std::vector<GridFunction>{translate(one.x, one.terms[0].b), single.target(1)});
            const double err = norm(diff, single.ctx);
            out.require(err == 0.0, "control error " + fmt(err));
            summary += "control error " + fmt(err);
        }
        out.detail = summary + (out.detail.empty() ? "" : "; " + out.detail);
    });

    criterion(8, 120.0, [&](Outcome& out) {
        const auto horizons = geometric_horizons(100.0, 4); // 100 .. 168
        const double c = 1.2 * 1.5;
        const auto rep = orbit_density(*vec, plan, plan.target(1), c, horizons, EstimationMethod::monte_carlo(8, 1000000));
        const double final_ratio = rep.estimate.ratios.back();
        out.require(rep.level == std::size_t{1}, "target not recognised as level 1");
        out.require(rep.analytic_bound > 0.0, "analytic bound is zero");
        out.require(final_ratio >= 0.5 * rep.analytic_bound,
                    "estimate " + fmt(final_ratio) + " below half the bound " + fmt(rep.analytic_bound));
        out.detail = "estimate " + fmt(final_ratio) + " vs bound " + fmt(rep.analytic_bound) +
                     (out.detail.empty() ? "" : "; " + out.detail);
    });

    criterion(9, 10.0, [](Outcome& out) {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        auto grid_point = [&](int reach) {
            for (;;) {
                const SectorPoint p{static_cast<double>(rng() % (8 * reach)) / 8,
                                    (static_cast<double>(rng() % (16 * reach)) - 8 * reach) / 8};
                if (kQuarter.contains(p))
                    return p;
            }
        };
        int broken = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<CellValue> cells;
            GridFunction probe(kQuarter, kEighth);
            for (int k = 0; k < 40; ++k) {
                const Cell cell{static_cast<std::int64_t>(rng() % 32), static_cast<std::int64_t>(rng() % 64) - 32};
                if (probe.center_in_sector(cell))
                    cells.push_back({cell, u(rng)});
            }
            std::sort(cells.begin(), cells.end(), [](auto& a, auto& b) { return a.cell < b.cell; });
            cells.erase(std::unique(cells.begin(), cells.end(), [](auto& a, auto& b) { return a.cell == b.cell; }),
                        cells.end());
            const auto f = GridFunction::from_cells(kQuarter, kEighth, cells);
            const auto t = grid_point(8);
            const auto s = grid_point(8);
            if (!(translate(backshift(f, t), t) == f) || !(translate(f, t + s) == translate(translate(f, t), s)))
                ++broken;
        }
        out.require(broken == 0, std::to_string(broken) + " of 1000 trials broke an identity");
    });

    criterion(10, 60.0, [&](Outcome& out) {
        const auto dir = scratch("c10");
        const nlohmann::json density{{"weight", "chaouchi"},
                                     {"sublevel", {{"epsilon", 0.5}}},
                                     {"horizons", {100, 1000}},
                                     {"samples", 100000},
                                     {"seed", 10}};
        const nlohmann::json check{{"weight", "exp"}, {"seed", 10}, {"necessary", {{"samples", 20000}}}};
        nlohmann::json desk{{"weight", "exp"},
                            {"seed", 10},
                            {"targets", {{{"radius", 1}, {"scale", 8}}, {{"radius", 1}, {"scale", 4}}}},
                            {"horizon", 200}};
        std::vector<std::string> runs;
        for (const auto& [tag, workers] : {std::pair{"a", 1u}, std::pair{"b", 1u}, std::pair{"c", 4u}}) {
            const auto out_dir = dir / tag;
            cli::cmd_density(config_of(density, out_dir, workers), quiet);
            cli::cmd_check(config_of(check, out_dir, workers), quiet);
            cli::cmd_construct(config_of(desk, out_dir, workers), quiet);
            nlohmann::json orbit = desk;
            orbit["vector"] = (out_dir / "vector.json").string();
            orbit["returns"] = {{"samples", 16}};
            orbit["orbit"] = {{"target", {{"level", 1}}}, {"radius", 1.8}, {"horizons", {100, 150}}, {"samples", 50000}};
            cli::cmd_orbit(config_of(orbit, out_dir, workers), quiet);
            std::string bytes;
            for (const char* file : {"density.csv", "check.json", "vector.json", "ledger.json", "orbit.json"})
                bytes += slurp(out_dir / file) + '\0';
            runs.push_back(bytes);
        }
        out.require(runs[0].size() > 1000, "reports are unexpectedly small");
        out.require(runs[0] == runs[1], "repeat run differs");
        out.require(runs[0] == runs[2], "worker count changes the reports");
    });

    std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
