#include "regio/model.hpp"
#include "regio/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace regio {

int nuts_level(std::string_view code) noexcept
{
    const auto len = static_cast<int>(code.size());
    return std::clamp(len - 2, 0, 3);
}

bool is_well_formed_code(std::string_view code) noexcept
{
    if (code.size() < 2 || code.size() > 5) {
        return false;
    }
    auto isAlpha = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };
    auto isAlnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    return isAlpha(code[0]) && isAlpha(code[1]) && std::all_of(code.begin() + 2, code.end(), isAlnum);
}

TerritoryId::TerritoryId(std::string c)
: code(std::move(c))
, level(nuts_level(code))
{
}

std::string_view TerritoryId::country() const noexcept
{
    return std::string_view(code).substr(0, std::min<std::size_t>(2, code.size()));
}

bool TerritoryId::is_within(std::string_view ancestor) const noexcept
{
    return !ancestor.empty() && std::string_view(code).starts_with(ancestor);
}

std::string_view to_string(IndicatorKind kind) noexcept
{
    return kind == IndicatorKind::Energy ? "energy" : "non_energy";
}

std::string_view to_string(NormalizationBasis basis) noexcept
{
    switch (basis) {
    case NormalizationBasis::None: return "none";
    case NormalizationBasis::PerArea: return "per_area";
    case NormalizationBasis::PerCapita: return "per_capita";
    case NormalizationBasis::MedianPerSite: return "median_per_site";
    }
    return "none";
}

std::optional<IndicatorKind> parse_indicator_kind(std::string_view text) noexcept
{
    if (text == "energy") {
        return IndicatorKind::Energy;
    }
    if (text == "non_energy") {
        return IndicatorKind::NonEnergy;
    }
    return std::nullopt;
}

std::optional<NormalizationBasis> parse_normalization_basis(std::string_view text) noexcept
{
    if (text.empty() || text == "none") {
        return NormalizationBasis::None;
    }
    if (text == "per_area") {
        return NormalizationBasis::PerArea;
    }
    if (text == "per_capita") {
        return NormalizationBasis::PerCapita;
    }
    if (text == "median_per_site") {
        return NormalizationBasis::MedianPerSite;
    }
    return std::nullopt;
}

IndicatorTable::IndicatorTable(std::vector<TerritoryId> territories, std::vector<IndicatorDef> indicators)
: _territories(std::move(territories))
, _indicators(std::move(indicators))
, _values(_territories.size() * _indicators.size())
{
}

IndicatorTable::IndicatorTable(std::vector<TerritoryId> territories, std::vector<IndicatorDef> indicators, std::vector<std::optional<double>> values)
: _territories(std::move(territories))
, _indicators(std::move(indicators))
, _values(std::move(values))
{
}

const std::optional<double>& IndicatorTable::at(std::size_t row, std::size_t col) const
{
    if (row >= rows() || col >= cols()) {
        throw Error(ErrorKind::Domain, "indicator table index out of range");
    }
    return _values[row * cols() + col];
}

void IndicatorTable::set(std::size_t row, std::size_t col, std::optional<double> value)
{
    if (row >= rows() || col >= cols()) {
        throw Error(ErrorKind::Domain, "indicator table index out of range");
    }
    _values[row * cols() + col] = value;
}

std::optional<std::size_t> IndicatorTable::row_index(std::string_view territory) const noexcept
{
    for (std::size_t i = 0; i < _territories.size(); ++i) {
        if (_territories[i].code == territory) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> IndicatorTable::col_index(std::string_view indicator) const noexcept
{
    for (std::size_t j = 0; j < _indicators.size(); ++j) {
        if (_indicators[j].id == indicator) {
            return j;
        }
    }
    return std::nullopt;
}

std::size_t IndicatorTable::missing_count() const noexcept
{
    return static_cast<std::size_t>(std::count_if(_values.begin(), _values.end(), [](const auto& v) { return !v.has_value(); }));
}

std::size_t IndicatorTable::missing_count(std::size_t col) const
{
    std::size_t missing = 0;
    for (std::size_t i = 0; i < rows(); ++i) {
        if (!at(i, col).has_value()) {
            ++missing;
        }
    }
    return missing;
}

std::vector<std::optional<double>> IndicatorTable::column(std::size_t col) const
{
    std::vector<std::optional<double>> out;
    out.reserve(rows());
    for (std::size_t i = 0; i < rows(); ++i) {
        out.push_back(at(i, col));
    }
    return out;
}

IndicatorTable IndicatorTable::select_columns(std::span<const std::size_t> cols) const
{
    std::vector<IndicatorDef> defs;
    defs.reserve(cols.size());
    for (auto c : cols) {
        if (c >= this->cols()) {
            throw Error(ErrorKind::Domain, "column index out of range");
        }
        defs.push_back(_indicators[c]);
    }

    IndicatorTable out(_territories, std::move(defs));
    for (std::size_t i = 0; i < rows(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out.set(i, j, at(i, cols[j]));
        }
    }
    return out;
}

std::string_view to_string(ViolationKind kind) noexcept
{
    switch (kind) {
    case ViolationKind::MalformedTerritoryId: return "malformed_territory_id";
    case ViolationKind::DuplicateTerritory: return "duplicate_territory";
    case ViolationKind::NonPositiveArea: return "non_positive_area";
    case ViolationKind::NegativePopulation: return "negative_population";
    case ViolationKind::CoordinateOutOfRange: return "coordinate_out_of_range";
    case ViolationKind::NonFiniteValue: return "non_finite_value";
    case ViolationKind::TableShape: return "table_shape";
    case ViolationKind::UnknownTerritory: return "unknown_territory";
    case ViolationKind::DuplicateIndicator: return "duplicate_indicator";
    case ViolationKind::MissingNormalizationBasis: return "missing_normalization_basis";
    case ViolationKind::NegativeProxyWeight: return "negative_proxy_weight";
    case ViolationKind::ProxyNotFineLevel: return "proxy_not_fine_level";
    case ViolationKind::ZeroProxyTotal: return "zero_proxy_total";
    case ViolationKind::EmptyRegion: return "empty_region";
    case ViolationKind::UnknownRegionMember: return "unknown_region_member";
    case ViolationKind::UnknownIndicator: return "unknown_indicator";
    }
    return "unknown";
}

std::size_t ValidationReport::count(ViolationKind kind) const noexcept
{
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; }));
}

namespace {

void check_territories(std::span<const Territory> territories, std::vector<Violation>& out)
{
    std::unordered_set<std::string> seen;
    for (const auto& t : territories) {
        const auto& code = t.id.code;
        if (!is_well_formed_code(code) || t.id.level != nuts_level(code)) {
            out.push_back({ViolationKind::MalformedTerritoryId, code, {}, "territory id '" + code + "' is not a NUTS code"});
        }
        if (!seen.insert(code).second) {
            out.push_back({ViolationKind::DuplicateTerritory, code, {}, "territory '" + code + "' listed more than once"});
        }
        if (!std::isfinite(t.area_km2) || !std::isfinite(t.population) || !std::isfinite(t.lat) || !std::isfinite(t.lon)) {
            out.push_back({ViolationKind::NonFiniteValue, code, {}, "territory attributes must be finite"});
            continue;
        }
        if (t.area_km2 <= 0.0) {
            out.push_back({ViolationKind::NonPositiveArea, code, {}, "area must be > 0"});
        }
        if (t.population < 0.0) {
            out.push_back({ViolationKind::NegativePopulation, code, {}, "population must be >= 0"});
        }
        if (t.lat < -90.0 || t.lat > 90.0 || t.lon < -180.0 || t.lon > 180.0) {
            out.push_back({ViolationKind::CoordinateOutOfRange, code, {}, "centroid outside [-90,90] x [-180,180]"});
        }
    }
}

void check_table(const IndicatorTable& table, const std::unordered_set<std::string>& known, std::vector<Violation>& out)
{
    if (table.values().size() != table.rows() * table.cols()) {
        out.push_back({ViolationKind::TableShape, {}, {}, "value matrix does not match territories x indicators"});
        return;
    }

    std::unordered_set<std::string> rowsSeen;
    for (const auto& id : table.territories()) {
        if (!rowsSeen.insert(id.code).second) {
            out.push_back({ViolationKind::DuplicateTerritory, id.code, {}, "territory '" + id.code + "' appears twice in the indicator table"});
        }
        if (!known.contains(id.code)) {
            out.push_back({ViolationKind::UnknownTerritory, id.code, {}, "indicator table references unknown territory '" + id.code + "'"});
        }
    }

    std::unordered_set<std::string> colsSeen;
    for (const auto& def : table.indicators()) {
        if (!colsSeen.insert(def.id).second) {
            out.push_back({ViolationKind::DuplicateIndicator, {}, def.id, "indicator '" + def.id + "' declared twice"});
        }
        if (def.kind == IndicatorKind::Energy && def.basis == NormalizationBasis::None) {
            out.push_back({ViolationKind::MissingNormalizationBasis, {}, def.id, "energy indicator '" + def.id + "' declares no normalization basis"});
        }
    }

    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t j = 0; j < table.cols(); ++j) {
            const auto& v = table.at(i, j);
            if (v.has_value() && !std::isfinite(*v)) {
                out.push_back({ViolationKind::NonFiniteValue, table.territories()[i].code, table.indicators()[j].id, "value is not finite"});
            }
        }
    }
}

void check_proxies(const IndicatorTable& table,
                   std::span<const ProxyTable> proxies,
                   std::span<const NationalValue> national,
                   const std::unordered_map<std::string, const Territory*>& known,
                   std::vector<Violation>& out)
{
    std::map<std::string, const ProxyTable*> byIndicator;
    for (const auto& proxy : proxies) {
        byIndicator.emplace(proxy.indicator_id, &proxy);
        if (!table.col_index(proxy.indicator_id)) {
            out.push_back({ViolationKind::UnknownIndicator, {}, proxy.indicator_id, "proxy table for undeclared indicator '" + proxy.indicator_id + "'"});
        }
        for (const auto& [code, weight] : proxy.weights) {
            auto it = known.find(code);
            if (it == known.end()) {
                out.push_back({ViolationKind::UnknownTerritory, code, proxy.indicator_id, "proxy weight for unknown territory '" + code + "'"});
            } else if (it->second->id.level != 3) {
                out.push_back({ViolationKind::ProxyNotFineLevel, code, proxy.indicator_id, "proxy weights must be given at the finest level"});
            }
            if (!std::isfinite(weight)) {
                out.push_back({ViolationKind::NonFiniteValue, code, proxy.indicator_id, "proxy weight is not finite"});
            } else if (weight < 0.0) {
                out.push_back({ViolationKind::NegativeProxyWeight, code, proxy.indicator_id, "proxy weight must be >= 0"});
            }
        }
    }

    for (const auto& nv : national) {
        if (!table.col_index(nv.indicator_id)) {
            out.push_back({ViolationKind::UnknownIndicator, nv.country_code, nv.indicator_id, "national value for undeclared indicator '" + nv.indicator_id + "'"});
        }
        if (!std::isfinite(nv.value)) {
            out.push_back({ViolationKind::NonFiniteValue, nv.country_code, nv.indicator_id, "national value is not finite"});
            continue;
        }
        if (nv.value == 0.0) {
            continue;
        }
        auto it = byIndicator.find(nv.indicator_id);
        double total = 0.0;
        if (it != byIndicator.end()) {
            for (const auto& [code, weight] : it->second->weights) {
                auto kt = known.find(code);
                if (kt != known.end() && kt->second->id.level == 3 && kt->second->id.country() == nv.country_code && weight > 0.0) {
                    total += weight;
                }
            }
        }
        if (!(total > 0.0)) {
            out.push_back({ViolationKind::ZeroProxyTotal, nv.country_code, nv.indicator_id,
                           "no positive proxy weight to distribute '" + nv.indicator_id + "' over country " + nv.country_code});
        }
    }
}

void check_regions(std::span<const RegionSet> regions, const std::unordered_map<std::string, const Territory*>& known, std::vector<Violation>& out)
{
    for (const auto& region : regions) {
        if (region.members.empty()) {
            out.push_back({ViolationKind::EmptyRegion, {}, {}, "region '" + region.name + "' has no members"});
        }
        for (const auto& member : region.members) {
            if (!known.contains(member)) {
                out.push_back({ViolationKind::UnknownRegionMember, member, {}, "region '" + region.name + "' references unknown territory '" + member + "'"});
            }
        }
    }
}

}

ValidationReport validate_dataset(std::span<const Territory> territories,
                                  const IndicatorTable& table,
                                  std::span<const ProxyTable> proxies,
                                  std::span<const RegionSet> regions,
                                  std::span<const NationalValue> national)
{
    ValidationReport report;

    std::unordered_map<std::string, const Territory*> known;
    std::unordered_set<std::string> knownCodes;
    for (const auto& t : territories) {
        known.emplace(t.id.code, &t);
        knownCodes.insert(t.id.code);
    }

    check_territories(territories, report.violations);
    check_table(table, knownCodes, report.violations);
    check_proxies(table, proxies, national, known, report.violations);
    check_regions(regions, known, report.violations);
    return report;
}

}
