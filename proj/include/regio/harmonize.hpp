#pragma once

#include "regio/model.hpp"

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace regio {

/// Municipal solid waste conversion: potential = quantity * lower heating value * equivalence ratio.
struct MswParams
{
    double lower_heating_value = 13.8; // MJ/kg
    double equivalence_ratio   = 0.3;
};

/// Distributes each country's value over its level-3 territories in
/// proportion to the proxy weights. Territories without a weight count as 0.
/// A zero country value yields zeros regardless of weights.
std::map<std::string, double> downscale_by_proxy(std::span<const CoarseValue> coarse,
                                                 const ProxyTable& proxy,
                                                 std::span<const Territory> territories);

/// Energy (MJ) recoverable from `quantity_kg` of municipal solid waste.
double msw_potential(double quantity_kg, const MswParams& params = {});

std::map<std::string, double> normalize_indicator(const std::map<std::string, double>& values,
                                                  const std::map<std::string, double>& denominators);

/// Annual degree days as the sum of twelve monthly values.
double annualize_degree_days(std::span<const double> monthly);

struct LonLat
{
    double lon = 0.0;
    double lat = 0.0;

    bool operator==(const LonLat&) const = default;
};

/// Area-weighted centroid of a simple ring in equirectangular (lon, lat)
/// coordinates. A closing vertex equal to the first one is ignored.
LonLat compute_centroid(std::span<const LonLat> ring);

/// Polygon as an outer ring followed by holes.
using PolygonRings = std::vector<std::vector<LonLat>>;

/// Centroid of a (multi)polygon: holes subtract, parts combine by area.
LonLat compute_centroid(std::span<const PolygonRings> polygons);

/// A value reported for a coarser unit (NUTS0-2) that applies to every
/// finer territory below it that has no value of its own.
struct CoarseCell
{
    std::string territory;
    std::string indicator;
    double value = 0.0;
};

struct MonthlyValues
{
    std::string territory;
    std::string indicator;
    std::array<double, 12> months {};
};

enum class TerritoryColumn {
    Lat,
    Lon,
    Area,
    Population,
    Density,
};

std::string_view to_string(TerritoryColumn col) noexcept;
std::optional<TerritoryColumn> parse_territory_column(std::string_view text) noexcept;

struct HarmonizeOptions
{
    /// Indicator whose national values are waste masses (kg) to convert first.
    std::string msw_indicator = "P_mun";
    MswParams msw;
    /// Territory attributes appended as non-energy indicator columns.
    std::vector<TerritoryColumn> territory_columns;
};

struct HarmonizeInput
{
    std::vector<Territory> territories;
    IndicatorTable table; // fine-level raw values
    std::vector<CoarseCell> coarse_cells;
    std::vector<NationalValue> national;
    std::vector<ProxyTable> proxies;
    std::vector<MonthlyValues> monthly;
};

struct HarmonizeResult
{
    IndicatorTable table;
    std::vector<std::string> log;
};

/// Builds the level-3 indicator table: broadcast of coarse cells, degree-day
/// annualization, proxy downscaling of national values, then per-area and
/// per-capita normalization, then the requested territory attributes.
HarmonizeResult harmonize(const HarmonizeInput& input, const HarmonizeOptions& options = {});

}
