#include "regio/harmonize.hpp"
#include "regio/error.hpp"
#include "regio/format.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace regio {

std::map<std::string, double> downscale_by_proxy(std::span<const CoarseValue> coarse,
                                                 const ProxyTable& proxy,
                                                 std::span<const Territory> territories)
{
    std::map<std::string, double> out;
    std::set<std::string> countriesSeen;

    for (const auto& cv : coarse) {
        if (!std::isfinite(cv.value)) {
            throw Error(ErrorKind::Downscaling, "non-finite national value for country " + cv.country_code);
        }
        if (!countriesSeen.insert(cv.country_code).second) {
            throw Error(ErrorKind::Downscaling, "country " + cv.country_code + " has more than one national value for '" + proxy.indicator_id + "'");
        }

        std::vector<std::pair<const std::string*, double>> members;
        double total = 0.0;
        for (const auto& t : territories) {
            if (t.id.level != 3 || t.id.country() != cv.country_code) {
                continue;
            }
            double w = 0.0;
            if (auto it = proxy.weights.find(t.id.code); it != proxy.weights.end()) {
                w = it->second;
            }
            if (!(w >= 0.0) || !std::isfinite(w)) {
                throw Error(ErrorKind::Downscaling, "invalid proxy weight for territory " + t.id.code);
            }
            members.emplace_back(&t.id.code, w);
            total += w;
        }

        if (cv.value == 0.0) {
            for (const auto& [code, w] : members) {
                out[*code] = 0.0;
            }
            continue;
        }
        if (!(total > 0.0)) {
            throw Error(ErrorKind::Downscaling, "zero total proxy weight for country " + cv.country_code + " ('" + proxy.indicator_id + "')");
        }
        for (const auto& [code, w] : members) {
            out[*code] = cv.value * (w / total);
        }
    }
    return out;
}

double msw_potential(double quantity_kg, const MswParams& params)
{
    if (!(params.lower_heating_value > 0.0) || !(params.equivalence_ratio > 0.0)) {
        throw Error(ErrorKind::Domain, "waste conversion parameters must be > 0");
    }
    if (!(quantity_kg >= 0.0) || !std::isfinite(quantity_kg)) {
        throw Error(ErrorKind::Domain, "waste quantity must be a finite value >= 0");
    }
    return quantity_kg * params.lower_heating_value * params.equivalence_ratio;
}

std::map<std::string, double> normalize_indicator(const std::map<std::string, double>& values,
                                                  const std::map<std::string, double>& denominators)
{
    std::map<std::string, double> out;
    for (const auto& [code, value] : values) {
        auto it = denominators.find(code);
        if (it == denominators.end()) {
            throw Error(ErrorKind::Normalization, "no denominator for territory " + code);
        }
        if (!(it->second > 0.0) || !std::isfinite(it->second)) {
            throw Error(ErrorKind::Normalization, "denominator must be > 0 for territory " + code);
        }
        out.emplace(code, value / it->second);
    }
    return out;
}

double annualize_degree_days(std::span<const double> monthly)
{
    if (monthly.size() != 12) {
        throw Error(ErrorKind::Domain, "expected 12 monthly degree-day values, got " + std::to_string(monthly.size()));
    }
    double sum = 0.0;
    for (double v : monthly) {
        if (!std::isfinite(v) || v < 0.0) {
            throw Error(ErrorKind::Domain, "monthly degree days must be finite and >= 0");
        }
        sum += v;
    }
    return sum;
}

namespace {

struct RingMoments
{
    double area = 0.0; // signed
    double cx   = 0.0; // area-weighted, i.e. area * centroid
    double cy   = 0.0;
};

RingMoments ring_moments(std::span<const LonLat> ring)
{
    std::size_t n = ring.size();
    if (n >= 2 && ring.front() == ring.back()) {
        --n;
    }
    if (n < 3) {
        throw Error(ErrorKind::Geometry, "a ring needs at least 3 vertices");
    }

    // Shift to the first vertex to limit cancellation for small polygons far from the origin.
    const double x0 = ring[0].lon;
    const double y0 = ring[0].lat;
    double twiceArea = 0.0;
    double sx        = 0.0;
    double sy        = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a     = ring[i];
        const auto& b     = ring[(i + 1) % n];
        const double ax   = a.lon - x0;
        const double ay   = a.lat - y0;
        const double bx   = b.lon - x0;
        const double by   = b.lat - y0;
        const double cross = ax * by - bx * ay;
        twiceArea += cross;
        sx += (ax + bx) * cross;
        sy += (ay + by) * cross;
    }

    RingMoments m;
    m.area = twiceArea / 2.0;
    m.cx   = sx / 6.0 + m.area * x0;
    m.cy   = sy / 6.0 + m.area * y0;
    return m;
}

}

LonLat compute_centroid(std::span<const LonLat> ring)
{
    const auto m = ring_moments(ring);
    if (m.area == 0.0 || !std::isfinite(m.area)) {
        throw Error(ErrorKind::Geometry, "degenerate polygon with zero area");
    }
    return {m.cx / m.area, m.cy / m.area};
}

LonLat compute_centroid(std::span<const PolygonRings> polygons)
{
    double area = 0.0;
    double cx   = 0.0;
    double cy   = 0.0;
    for (const auto& polygon : polygons) {
        for (std::size_t r = 0; r < polygon.size(); ++r) {
            auto m = ring_moments(polygon[r]);
            // Orientation is not trusted: outer rings add, holes subtract.
            const double sign = (m.area < 0.0) ? -1.0 : 1.0;
            const double dir  = (r == 0) ? 1.0 : -1.0;
            area += dir * sign * m.area;
            cx += dir * sign * m.cx;
            cy += dir * sign * m.cy;
        }
    }
    if (area == 0.0 || !std::isfinite(area)) {
        throw Error(ErrorKind::Geometry, "degenerate geometry with zero area");
    }
    return {cx / area, cy / area};
}

std::string_view to_string(TerritoryColumn col) noexcept
{
    switch (col) {
    case TerritoryColumn::Lat: return "lat";
    case TerritoryColumn::Lon: return "lon";
    case TerritoryColumn::Area: return "area";
    case TerritoryColumn::Population: return "population";
    case TerritoryColumn::Density: return "density";
    }
    return "";
}

std::optional<TerritoryColumn> parse_territory_column(std::string_view text) noexcept
{
    for (auto col : {TerritoryColumn::Lat, TerritoryColumn::Lon, TerritoryColumn::Area, TerritoryColumn::Population, TerritoryColumn::Density}) {
        if (to_string(col) == text) {
            return col;
        }
    }
    return std::nullopt;
}

HarmonizeResult harmonize(const HarmonizeInput& input, const HarmonizeOptions& options)
{
    HarmonizeResult result;
    auto& log = result.log;

    std::vector<const Territory*> fine;
    std::unordered_map<std::string, const Territory*> byCode;
    for (const auto& t : input.territories) {
        byCode.emplace(t.id.code, &t);
        if (t.id.level == 3) {
            fine.push_back(&t);
        }
    }

    std::vector<TerritoryId> rowIds;
    rowIds.reserve(fine.size());
    for (const auto* t : fine) {
        rowIds.push_back(t->id);
    }

    std::vector<IndicatorDef> defs = input.table.indicators();
    IndicatorTable table(rowIds, defs);

    auto requireCol = [&](const std::string& indicator, std::string_view what) {
        auto col = table.col_index(indicator);
        if (!col) {
            throw Error(ErrorKind::Validation, std::string(what) + " for undeclared indicator '" + indicator + "'");
        }
        return *col;
    };

    for (std::size_t i = 0; i < input.table.rows(); ++i) {
        const auto& code = input.table.territories()[i].code;
        auto row         = table.row_index(code);
        if (!row) {
            throw Error(ErrorKind::Validation, "indicator value for territory '" + code + "' which is not a known level-3 unit");
        }
        for (std::size_t j = 0; j < input.table.cols(); ++j) {
            table.set(*row, j, input.table.at(i, j));
        }
    }

    // Finer coarse units take precedence over coarser ones.
    std::vector<const CoarseCell*> coarse;
    for (const auto& cell : input.coarse_cells) {
        coarse.push_back(&cell);
    }
    std::stable_sort(coarse.begin(), coarse.end(), [](const CoarseCell* a, const CoarseCell* b) {
        return a->territory.size() > b->territory.size();
    });
    for (const auto* cell : coarse) {
        const auto col   = requireCol(cell->indicator, "coarse value");
        std::size_t hits = 0;
        for (std::size_t i = 0; i < table.rows(); ++i) {
            if (table.territories()[i].is_within(cell->territory) && !table.at(i, col).has_value()) {
                table.set(i, col, cell->value);
                ++hits;
            }
        }
        log.push_back("broadcast " + cell->indicator + " from " + cell->territory + " to " + std::to_string(hits) + " territories");
    }

    for (const auto& mv : input.monthly) {
        const auto col = requireCol(mv.indicator, "monthly values");
        auto row       = table.row_index(mv.territory);
        if (!row) {
            throw Error(ErrorKind::Validation, "monthly values for unknown level-3 territory '" + mv.territory + "'");
        }
        table.set(*row, col, annualize_degree_days(mv.months));
    }
    if (!input.monthly.empty()) {
        log.push_back("annualized " + std::to_string(input.monthly.size()) + " monthly degree-day series");
    }

    std::map<std::string, std::vector<CoarseValue>> national;
    for (const auto& nv : input.national) {
        national[nv.indicator_id].push_back({nv.country_code, nv.value});
    }
    for (auto& [indicator, values] : national) {
        const auto col = requireCol(indicator, "national value");
        if (indicator == options.msw_indicator) {
            for (auto& cv : values) {
                cv.value = msw_potential(cv.value, options.msw);
            }
            log.push_back("converted " + indicator + " waste quantities to energy (lh=" + format_number(options.msw.lower_heating_value) +
                          " MJ/kg, r=" + format_number(options.msw.equivalence_ratio) + ")");
        }

        auto proxyIt = std::find_if(input.proxies.begin(), input.proxies.end(), [&](const ProxyTable& p) { return p.indicator_id == indicator; });
        if (proxyIt == input.proxies.end()) {
            throw Error(ErrorKind::Downscaling, "no proxy table for nationally reported indicator '" + indicator + "'");
        }

        const auto fineValues = downscale_by_proxy(values, *proxyIt, input.territories);
        for (const auto& [code, value] : fineValues) {
            auto row = table.row_index(code);
            if (table.at(*row, col).has_value()) {
                throw Error(ErrorKind::Downscaling, "territory " + code + " has both a local and a national value for '" + indicator + "'");
            }
            table.set(*row, col, value);
        }
        log.push_back("downscaled " + indicator + " over " + std::to_string(values.size()) + " countries");
    }

    for (std::size_t j = 0; j < table.cols(); ++j) {
        const auto basis = table.indicators()[j].basis;
        if (basis != NormalizationBasis::PerArea && basis != NormalizationBasis::PerCapita) {
            continue;
        }
        std::map<std::string, double> values;
        std::map<std::string, double> denominators;
        for (std::size_t i = 0; i < table.rows(); ++i) {
            if (const auto& v = table.at(i, j); v.has_value()) {
                const auto* t = fine[i];
                values.emplace(t->id.code, *v);
                denominators.emplace(t->id.code, basis == NormalizationBasis::PerArea ? t->area_km2 : t->population);
            }
        }
        for (const auto& [code, v] : normalize_indicator(values, denominators)) {
            table.set(*table.row_index(code), j, v);
        }
        log.push_back("normalized " + table.indicators()[j].id + (basis == NormalizationBasis::PerArea ? " per km2" : " per inhabitant"));
    }

    if (!options.territory_columns.empty()) {
        std::vector<IndicatorDef> extended = table.indicators();
        for (auto col : options.territory_columns) {
            const auto name = std::string(to_string(col));
            if (table.col_index(name)) {
                throw Error(ErrorKind::Validation, "territory column '" + name + "' clashes with a declared indicator");
            }
            extended.push_back({name, IndicatorKind::NonEnergy, {}, NormalizationBasis::None});
        }
        IndicatorTable withAttrs(rowIds, extended);
        for (std::size_t i = 0; i < table.rows(); ++i) {
            for (std::size_t j = 0; j < table.cols(); ++j) {
                withAttrs.set(i, j, table.at(i, j));
            }
            const auto& t = *fine[i];
            for (std::size_t c = 0; c < options.territory_columns.size(); ++c) {
                double v = 0.0;
                switch (options.territory_columns[c]) {
                case TerritoryColumn::Lat: v = t.lat; break;
                case TerritoryColumn::Lon: v = t.lon; break;
                case TerritoryColumn::Area: v = t.area_km2; break;
                case TerritoryColumn::Population: v = t.population; break;
                case TerritoryColumn::Density: v = t.population / t.area_km2; break;
                }
                withAttrs.set(i, table.cols() + c, v);
            }
        }
        table = std::move(withAttrs);
    }

    result.table = std::move(table);
    return result;
}

}
