#pragma once

#include "sectorfhc/sector.hpp"
#include "sectorfhc/weights.hpp"

#include <compare>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sectorfhc {

/// Positive dyadic rational num / 2^shift used as the grid pitch.
class Dyadic {
public:
    Dyadic(std::int64_t numerator, unsigned shift);

    /// Parses "p/q" with q a power of two, or a bare integer "p".
    static Dyadic parse(std::string_view text);

    double value() const noexcept { return value_; }
    std::string str() const;

    friend bool operator==(const Dyadic& a, const Dyadic& b) noexcept { return a.value_ == b.value_; }

private:
    std::int64_t numerator_;
    unsigned shift_;
    double value_;
};

struct Cell {
    std::int64_t i = 0;
    std::int64_t j = 0;
    auto operator<=>(const Cell&) const = default;
};

struct CellValue {
    Cell cell;
    double coefficient = 0.0;
    friend bool operator==(const CellValue&, const CellValue&) = default;
};

/// A compactly supported step function on the square grid of pitch h,
/// f = sum c_ij 1_{[ih,(i+1)h) x [jh,(j+1)h)}, restricted to the sector by
/// the position of each cell center. Cells are kept sorted by (i, j) and
/// zero coefficients are never stored.
class GridFunction {
public:
    GridFunction(const Sector& sector, Dyadic h);

    /// Rejects non-finite coefficients and cells whose centers leave the sector.
    static GridFunction from_cells(const Sector& sector, Dyadic h, std::vector<CellValue> cells);

    /// scale * indicator of {center in sector : |center| <= radius}.
    static GridFunction indicator_disc(const Sector& sector, Dyadic h, double radius, double scale = 1.0);

    const Sector& sector() const noexcept { return sector_; }
    const Dyadic& pitch() const noexcept { return h_; }
    double h() const noexcept { return h_.value(); }
    const std::vector<CellValue>& cells() const noexcept { return cells_; }
    bool empty() const noexcept { return cells_.empty(); }

    SectorPoint center(Cell c) const noexcept;
    bool center_in_sector(Cell c) const { return sector_.contains(center(c)); }
    double coefficient(Cell c) const;

    /// s_f: largest center modulus over stored cells plus h (0 when empty).
    double support_radius() const noexcept { return support_radius_; }
    /// M_f: largest |coefficient|.
    double sup_norm() const noexcept { return sup_norm_; }

    bool same_grid(const GridFunction& other) const noexcept
    {
        return sector_ == other.sector_ && h_ == other.h_;
    }

    nlohmann::json to_json() const;
    static GridFunction from_json(const nlohmann::json& doc);

    friend bool operator==(const GridFunction& a, const GridFunction& b)
    {
        return a.same_grid(b) && a.cells_ == b.cells_;
    }

private:
    friend GridFunction translate(const GridFunction&, SectorPoint);
    friend GridFunction backshift(const GridFunction&, SectorPoint);
    friend GridFunction lincomb(std::span<const double>, std::span<const GridFunction>);

    // Takes cells already sorted, unique, non-zero and inside the sector.
    static GridFunction adopt(const Sector& sector, Dyadic h, std::vector<CellValue> cells);
    void rebuild_summaries();

    Sector sector_;
    Dyadic h_;
    std::vector<CellValue> cells_;
    double support_radius_ = 0.0;
    double sup_norm_ = 0.0;
};

/// Exponent and weight of L^p_rho over the sector.
struct LpContext {
    LpContext(double p, WeightFn weight);

    double p;
    WeightFn weight;
};

/// (sum |c|^p rho(center) h^2)^{1/p}, summed in index order.
double norm(const GridFunction& f, const LpContext& ctx);

/// Integer grid offset (a, b) with t = (a h, b h); throws AlignmentError otherwise.
Cell grid_offset(SectorPoint t, Dyadic h);

/// Rounds each coordinate to the nearest multiple of h.
SectorPoint snap_to_grid(SectorPoint t, Dyadic h);

/// (T_t f)(x) = f(x + t): cell (i, j) takes the coefficient of (i + a, j + b).
GridFunction translate(const GridFunction& f, SectorPoint t);

/// (S_t f)(x) = f(x - t) on t + sector, zero elsewhere.
GridFunction backshift(const GridFunction& f, SectorPoint t);

GridFunction lincomb(std::span<const double> coeffs, std::span<const GridFunction> fs);

/// ||T_t f|| <= (M e^{omega|t|})^{1/p} ||f|| with 1% slack, using the
/// weight's claimed constants.
bool growth_bound_check(const GridFunction& f, SectorPoint t, const LpContext& ctx);

/// Element `index` of a countable family of scaled truncation indicators
/// (radius (a+1)/2, dyadic coefficient), enumerated along diagonals.
GridFunction dense_family_element(const Sector& sector, Dyadic h, std::uint64_t index);

} // namespace sectorfhc
