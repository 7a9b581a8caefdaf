#include "sectorfhc/grid_function.hpp"

#include "sectorfhc/error.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <map>

namespace sectorfhc {

Dyadic::Dyadic(std::int64_t numerator, unsigned shift) : numerator_(numerator), shift_(shift), value_(0.0)
{
    if (numerator <= 0)
        throw InputError("grid pitch must be positive");
    if (shift > 60)
        throw InputError("grid pitch denominator too large");
    while (shift_ > 0 && numerator_ % 2 == 0) {
        numerator_ /= 2;
        --shift_;
    }
    value_ = std::ldexp(static_cast<double>(numerator_), -static_cast<int>(shift_));
}

Dyadic Dyadic::parse(std::string_view text)
{
    auto parse_int = [&](std::string_view part) {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size())
            throw InputError("malformed dyadic '" + std::string(text) + "'");
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return Dyadic(parse_int(text), 0);
    const std::int64_t num = parse_int(text.substr(0, slash));
    const std::int64_t den = parse_int(text.substr(slash + 1));
    if (den <= 0 || (den & (den - 1)) != 0)
        throw InputError("dyadic denominator must be a power of two in '" + std::string(text) + "'");
    return Dyadic(num, static_cast<unsigned>(std::countr_zero(static_cast<std::uint64_t>(den))));
}

std::string Dyadic::str() const
{
    return std::to_string(numerator_) + "/" + std::to_string(std::int64_t{1} << shift_);
}

GridFunction::GridFunction(const Sector& sector, Dyadic h) : sector_(sector), h_(h) {}

GridFunction GridFunction::adopt(const Sector& sector, Dyadic h, std::vector<CellValue> cells)
{
    GridFunction f(sector, h);
    f.cells_ = std::move(cells);
    f.rebuild_summaries();
    return f;
}

void GridFunction::rebuild_summaries()
{
    double reach = 0.0;
    double sup = 0.0;
    for (const auto& cv : cells_) {
        reach = std::max(reach, center(cv.cell).modulus());
        sup = std::max(sup, std::abs(cv.coefficient));
    }
    support_radius_ = cells_.empty() ? 0.0 : reach + h();
    sup_norm_ = sup;
}

GridFunction GridFunction::from_cells(const Sector& sector, Dyadic h, std::vector<CellValue> cells)
{
    std::sort(cells.begin(), cells.end(), [](const CellValue& a, const CellValue& b) { return a.cell < b.cell; });
    GridFunction probe(sector, h);
    std::vector<CellValue> kept;
    kept.reserve(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto& cv = cells[k];
        if (k > 0 && cells[k - 1].cell == cv.cell)
            throw InputError("duplicate grid cell");
        if (!std::isfinite(cv.coefficient))
            throw InputError("non-finite grid coefficient");
        if (!probe.center_in_sector(cv.cell))
            throw InputError("grid cell center lies outside the sector");
        if (cv.coefficient != 0.0)
            kept.push_back(cv);
    }
    return adopt(sector, h, std::move(kept));
}

GridFunction GridFunction::indicator_disc(const Sector& sector, Dyadic h, double radius, double scale)
{
    if (!(radius >= 0.0) || !std::isfinite(scale))
        throw InputError("indicator needs a non-negative radius and finite scale");
    GridFunction probe(sector, h);
    const double step = h.value();
    const auto reach = static_cast<std::int64_t>(std::ceil(radius / step)) + 1;
    std::vector<CellValue> cells;
    if (scale != 0.0)
        for (std::int64_t i = 0; i <= reach; ++i)
            for (std::int64_t j = -reach; j <= reach; ++j) {
                const Cell c{i, j};
                const SectorPoint m = probe.center(c);
                if (m.modulus() <= radius && sector.contains(m))
                    cells.push_back({c, scale});
            }
    return adopt(sector, h, std::move(cells));
}

SectorPoint GridFunction::center(Cell c) const noexcept
{
    const double step = h();
    return {(static_cast<double>(c.i) + 0.5) * step, (static_cast<double>(c.j) + 0.5) * step};
}

double GridFunction::coefficient(Cell c) const
{
    const auto it = std::lower_bound(cells_.begin(), cells_.end(), c,
                                     [](const CellValue& cv, const Cell& key) { return cv.cell < key; });
    return it != cells_.end() && it->cell == c ? it->coefficient : 0.0;
}

nlohmann::json GridFunction::to_json() const
{
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cv : cells_)
        cells.push_back({cv.cell.i, cv.cell.j, cv.coefficient});
    return {{"alpha", sector_.alpha()}, {"h", h_.str()}, {"cells", cells}};
}

GridFunction GridFunction::from_json(const nlohmann::json& doc)
{
    try {
        const Sector sector(doc.at("alpha").get<double>());
        const Dyadic h = Dyadic::parse(doc.at("h").get<std::string>());
        std::vector<CellValue> cells;
        for (const auto& row : doc.at("cells")) {
            if (!row.is_array() || row.size() != 3)
                throw InputError("grid cell rows must be [i, j, c]");
            cells.push_back({{row[0].get<std::int64_t>(), row[1].get<std::int64_t>()}, row[2].get<double>()});
        }
        return from_cells(sector, h, std::move(cells));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed grid function document: ") + e.what());
    }
}

LpContext::LpContext(double p_, WeightFn weight_) : p(p_), weight(std::move(weight_))
{
    if (!(p >= 1.0) || !std::isfinite(p))
        throw InputError("exponent p must lie in [1, inf)");
}

double norm(const GridFunction& f, const LpContext& ctx)
{
    if (!(f.sector() == ctx.weight.sector()))
        throw InputError("grid function and weight live on different sectors");
    const double area = f.h() * f.h();
    double sum = 0.0;
    for (const auto& cv : f.cells()) {
        const double mag = std::abs(cv.coefficient);
        const double powered = ctx.p == 1.0 ? mag : ctx.p == 2.0 ? mag * mag : std::pow(mag, ctx.p);
        sum += powered * ctx.weight(f.center(cv.cell)) * area;
    }
    if (ctx.p == 1.0)
        return sum;
    return ctx.p == 2.0 ? std::sqrt(sum) : std::pow(sum, 1.0 / ctx.p);
}

Cell grid_offset(SectorPoint t, Dyadic h)
{
    const double ax = t.x / h.value();
    const double ay = t.y / h.value();
    const double rx = std::nearbyint(ax);
    const double ry = std::nearbyint(ay);
    if (!std::isfinite(ax) || !std::isfinite(ay) || std::abs(ax - rx) > 1e-9 || std::abs(ay - ry) > 1e-9)
        throw AlignmentError("translation is not aligned with the grid of pitch " + h.str());
    return {static_cast<std::int64_t>(rx), static_cast<std::int64_t>(ry)};
}

SectorPoint snap_to_grid(SectorPoint t, Dyadic h)
{
    const double step = h.value();
    return {std::nearbyint(t.x / step) * step, std::nearbyint(t.y / step) * step};
}

namespace {

void require_in_sector(const GridFunction& f, SectorPoint t)
{
    if (!f.sector().contains(t))
        throw InputError("translation vector lies outside the sector");
}

} // namespace

GridFunction translate(const GridFunction& f, SectorPoint t)
{
    require_in_sector(f, t);
    const Cell shift = grid_offset(t, f.pitch());
    std::vector<CellValue> out;
    out.reserve(f.cells().size());
    for (const auto& cv : f.cells()) {
        const Cell target{cv.cell.i - shift.i, cv.cell.j - shift.j};
        if (f.center_in_sector(target))
            out.push_back({target, cv.coefficient});
    }
    // A uniform shift preserves lexicographic order.
    return GridFunction::adopt(f.sector(), f.pitch(), std::move(out));
}

GridFunction backshift(const GridFunction& f, SectorPoint t)
{
    require_in_sector(f, t);
    const Cell shift = grid_offset(t, f.pitch());
    const SectorPoint apex{static_cast<double>(shift.i) * f.h(), static_cast<double>(shift.j) * f.h()};
    std::vector<CellValue> out;
    out.reserve(f.cells().size());
    for (const auto& cv : f.cells()) {
        const Cell target{cv.cell.i + shift.i, cv.cell.j + shift.j};
        const SectorPoint m = f.center(target);
        if (f.sector().contains(m - apex) && f.sector().contains(m))
            out.push_back({target, cv.coefficient});
    }
    return GridFunction::adopt(f.sector(), f.pitch(), std::move(out));
}

GridFunction lincomb(std::span<const double> coeffs, std::span<const GridFunction> fs)
{
    if (coeffs.size() != fs.size())
        throw InputError("lincomb needs one coefficient per function");
    if (fs.empty())
        throw InputError("lincomb needs at least one function");
    for (const auto& f : fs)
        if (!f.same_grid(fs.front()))
            throw InputError("lincomb operands live on different grids");
    std::map<Cell, double> acc;
    for (std::size_t k = 0; k < fs.size(); ++k)
        for (const auto& cv : fs[k].cells())
            acc[cv.cell] += coeffs[k] * cv.coefficient;
    std::vector<CellValue> out;
    out.reserve(acc.size());
    for (const auto& [cell, value] : acc)
        if (value != 0.0)
            out.push_back({cell, value});
    return GridFunction::adopt(fs.front().sector(), fs.front().pitch(), std::move(out));
}

bool growth_bound_check(const GridFunction& f, SectorPoint t, const LpContext& ctx)
{
    const double before = norm(f, ctx);
    const double after = norm(translate(f, t), ctx);
    const auto [M, omega] = ctx.weight.admissibility();
    const double factor = std::pow(M * std::exp(omega * t.modulus()), 1.0 / ctx.p);
    return after <= factor * before * 1.01;
}

namespace {

std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t z)
{
    const auto w = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(z) + 1.0) - 1.0) / 2.0);
    std::uint64_t base = w * (w + 1) / 2;
    std::uint64_t diag = w;
    // Guard against rounding in the square root.
    while (base > z) {
        --diag;
        base = diag * (diag + 1) / 2;
    }
    while ((diag + 1) * (diag + 2) / 2 <= z) {
        ++diag;
        base = diag * (diag + 1) / 2;
    }
    const std::uint64_t y = z - base;
    return {diag - y, y};
}

} // namespace

GridFunction dense_family_element(const Sector& sector, Dyadic h, std::uint64_t index)
{
    const auto [a, b] = cantor_unpair(index);
    const auto [u, e] = cantor_unpair(b);
    const double magnitude = static_cast<double>((u + 1) / 2);
    const double sign = u % 2 == 1 ? 1.0 : -1.0;
    const double coefficient = std::ldexp(sign * magnitude, -static_cast<int>(std::min<std::uint64_t>(e, 60)));
    const double radius = static_cast<double>(a + 1) / 2.0;
    return GridFunction::indicator_disc(sector, h, radius, coefficient);
}

} // namespace sectorfhc
