#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace regio {

/// NUTS code of a territorial unit. Level 0 is a country ("IT"), level 3 the
/// finest unit ("ITH10"). The country is always the two-letter prefix.
struct TerritoryId
{
    std::string code;
    int level = 0;

    TerritoryId() = default;
    explicit TerritoryId(std::string c);

    std::string_view country() const noexcept;

    /// True when `ancestor` is this id or a coarser code of the same branch.
    bool is_within(std::string_view ancestor) const noexcept;

    auto operator<=>(const TerritoryId& other) const noexcept
    {
        return code <=> other.code;
    }

    bool operator==(const TerritoryId& other) const noexcept
    {
        return code == other.code;
    }
};

/// Level implied by a code length, clamped to [0, 3].
int nuts_level(std::string_view code) noexcept;
bool is_well_formed_code(std::string_view code) noexcept;

struct Territory
{
    TerritoryId id;
    double area_km2   = 0.0;
    double population = 0.0;
    double lat        = 0.0;
    double lon        = 0.0;
};

enum class IndicatorKind {
    Energy,
    NonEnergy,
};

enum class NormalizationBasis {
    None,
    PerArea,
    PerCapita,
    MedianPerSite,
};

std::string_view to_string(IndicatorKind kind) noexcept;
std::string_view to_string(NormalizationBasis basis) noexcept;
std::optional<IndicatorKind> parse_indicator_kind(std::string_view text) noexcept;
std::optional<NormalizationBasis> parse_normalization_basis(std::string_view text) noexcept;

struct IndicatorDef
{
    std::string id;
    IndicatorKind kind         = IndicatorKind::NonEnergy;
    std::string unit;
    NormalizationBasis basis   = NormalizationBasis::None;
};

/// Territory x indicator matrix, row-major, with explicit missing cells.
class IndicatorTable
{
public:
    IndicatorTable() = default;
    IndicatorTable(std::vector<TerritoryId> territories, std::vector<IndicatorDef> indicators);
    IndicatorTable(std::vector<TerritoryId> territories, std::vector<IndicatorDef> indicators, std::vector<std::optional<double>> values);

    std::size_t rows() const noexcept
    {
        return _territories.size();
    }

    std::size_t cols() const noexcept
    {
        return _indicators.size();
    }

    const std::vector<TerritoryId>& territories() const noexcept
    {
        return _territories;
    }

    const std::vector<IndicatorDef>& indicators() const noexcept
    {
        return _indicators;
    }

    const std::vector<std::optional<double>>& values() const noexcept
    {
        return _values;
    }

    const std::optional<double>& at(std::size_t row, std::size_t col) const;
    void set(std::size_t row, std::size_t col, std::optional<double> value);

    std::optional<std::size_t> row_index(std::string_view territory) const noexcept;
    std::optional<std::size_t> col_index(std::string_view indicator) const noexcept;

    std::size_t missing_count() const noexcept;
    std::size_t missing_count(std::size_t col) const;

    std::vector<std::optional<double>> column(std::size_t col) const;

    /// Copy holding only the listed columns, in the given order.
    IndicatorTable select_columns(std::span<const std::size_t> cols) const;

    bool operator==(const IndicatorTable&) const = default;

private:
    std::vector<TerritoryId> _territories;
    std::vector<IndicatorDef> _indicators;
    std::vector<std::optional<double>> _values;
};

/// Nonnegative weights distributing a national value over fine territories.
struct ProxyTable
{
    std::string indicator_id;
    std::map<std::string, double> weights;
};

struct RegionSet
{
    std::string name;
    std::set<std::string> members;
};

/// Country-level value of one indicator.
struct CoarseValue
{
    std::string country_code;
    double value = 0.0;
};

struct NationalValue
{
    std::string indicator_id;
    std::string country_code;
    double value = 0.0;
};

enum class ViolationKind {
    MalformedTerritoryId,
    DuplicateTerritory,
    NonPositiveArea,
    NegativePopulation,
    CoordinateOutOfRange,
    NonFiniteValue,
    TableShape,
    UnknownTerritory,
    DuplicateIndicator,
    MissingNormalizationBasis,
    NegativeProxyWeight,
    ProxyNotFineLevel,
    ZeroProxyTotal,
    EmptyRegion,
    UnknownRegionMember,
    UnknownIndicator,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation
{
    ViolationKind kind;
    std::string territory;
    std::string indicator;
    std::string message;

    bool operator==(const Violation&) const = default;
};

struct ValidationReport
{
    std::vector<Violation> violations;

    bool ok() const noexcept
    {
        return violations.empty();
    }

    std::size_t count(ViolationKind kind) const noexcept;

    bool operator==(const ValidationReport&) const = default;
};

/// Checks every structural invariant of a dataset. Pure; the dataset is
/// accepted iff the returned report is empty. National values are optional;
/// when given, each country with a nonzero value to distribute must have a
/// positive proxy total.
ValidationReport validate_dataset(std::span<const Territory> territories,
                                  const IndicatorTable& table,
                                  std::span<const ProxyTable> proxies,
                                  std::span<const RegionSet> regions,
                                  std::span<const NationalValue> national = {});

}
