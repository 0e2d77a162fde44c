#include "regio/error.hpp"
#include "regio/model.hpp"

#include <doctest.h>

#include <limits>

using namespace regio;

namespace {

struct Small
{
    std::vector<Territory> territories;
    IndicatorTable table;
    std::vector<ProxyTable> proxies;
    std::vector<RegionSet> regions;
};

Small small_dataset()
{
    Small s;
    s.territories = {
        {TerritoryId("ITC11"), 6827, 2259523, 45.07, 7.68},
        {TerritoryId("ITC12"), 2082, 174576, 45.32, 8.42},
        {TerritoryId("ITC13"), 912, 180868, 45.56, 8.05},
    };
    std::vector<TerritoryId> ids;
    for (const auto& t : s.territories) {
        ids.push_back(t.id);
    }
    s.table = IndicatorTable(ids, {{"P_agr", IndicatorKind::Energy, "PJ", NormalizationBasis::PerArea}, {"gdp", IndicatorKind::NonEnergy, "EUR", NormalizationBasis::None}},
                             {1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
    s.proxies = {{"P_agr", {{"ITC11", 1.0}, {"ITC12", 2.0}, {"ITC13", 0.5}}}};
    s.regions = {{"Alpine", {"ITC11", "ITC13"}}};
    return s;
}

ValidationReport check(const Small& s)
{
    return validate_dataset(s.territories, s.table, s.proxies, s.regions);
}

}

TEST_CASE("nuts levels and country prefix")
{
    CHECK(nuts_level("IT") == 0);
    CHECK(nuts_level("ITC") == 1);
    CHECK(nuts_level("ITC1") == 2);
    CHECK(nuts_level("ITC11") == 3);
    TerritoryId id("ITC11");
    CHECK(id.level == 3);
    CHECK(id.country() == "IT");
    CHECK(id.is_within("IT"));
    CHECK(id.is_within("ITC1"));
    CHECK_FALSE(id.is_within("ITD"));
    CHECK(is_well_formed_code("DE300"));
    CHECK_FALSE(is_well_formed_code("D"));
    CHECK_FALSE(is_well_formed_code("1T111"));
    CHECK_FALSE(is_well_formed_code("ITC111"));
}

TEST_CASE("enum round trips")
{
    for (auto b : {NormalizationBasis::None, NormalizationBasis::PerArea, NormalizationBasis::PerCapita, NormalizationBasis::MedianPerSite}) {
        CHECK(parse_normalization_basis(to_string(b)) == b);
    }
    CHECK(parse_normalization_basis("") == NormalizationBasis::None);
    CHECK(parse_indicator_kind("energy") == IndicatorKind::Energy);
    CHECK(parse_indicator_kind("non_energy") == IndicatorKind::NonEnergy);
    CHECK_FALSE(parse_indicator_kind("solar").has_value());
}

TEST_CASE("indicator table access")
{
    auto s = small_dataset();
    CHECK(s.table.rows() == 3);
    CHECK(s.table.cols() == 2);
    CHECK(*s.table.at(1, 0) == 3.0);
    s.table.set(1, 0, std::nullopt);
    CHECK(s.table.missing_count() == 1);
    CHECK(s.table.missing_count(0) == 1);
    CHECK(s.table.row_index("ITC13") == 2u);
    CHECK(s.table.col_index("gdp") == 1u);
    CHECK_FALSE(s.table.col_index("none").has_value());
    const std::size_t pick[] = {1};
    auto sub                 = s.table.select_columns(pick);
    CHECK(sub.cols() == 1);
    CHECK(*sub.at(2, 0) == 6.0);
    CHECK_THROWS_AS(s.table.at(3, 0), Error);
}

TEST_CASE("well-formed dataset validates clean")
{
    const auto s = small_dataset();
    CHECK(check(s).ok());
}

TEST_CASE("zero area is one violation")
{
    auto s                     = small_dataset();
    s.territories[1].area_km2 = 0;
    const auto r               = check(s);
    CHECK(r.violations.size() == 1);
    CHECK(r.count(ViolationKind::NonPositiveArea) == 1);
}

TEST_CASE("unknown region member is one violation")
{
    auto s = small_dataset();
    s.regions[0].members.insert("ITC99");
    const auto r = check(s);
    CHECK(r.violations.size() == 1);
    CHECK(r.count(ViolationKind::UnknownRegionMember) == 1);
}

TEST_CASE("structural violations")
{
    SUBCASE("duplicate territory")
    {
        auto s = small_dataset();
        s.territories.push_back(s.territories[0]);
        CHECK(check(s).count(ViolationKind::DuplicateTerritory) >= 1);
    }
    SUBCASE("coordinates out of range")
    {
        auto s               = small_dataset();
        s.territories[0].lat = 95;
        CHECK(check(s).count(ViolationKind::CoordinateOutOfRange) == 1);
    }
    SUBCASE("negative proxy weight")
    {
        auto s                           = small_dataset();
        s.proxies[0].weights["ITC12"] = -1;
        CHECK(check(s).count(ViolationKind::NegativeProxyWeight) == 1);
    }
    SUBCASE("proxy on a coarse territory")
    {
        auto s = small_dataset();
        s.territories.push_back({TerritoryId("ITC1"), 9821, 2615000, 45.3, 8.0});
        s.proxies[0].weights["ITC1"] = 1;
        CHECK(check(s).count(ViolationKind::ProxyNotFineLevel) >= 1);
    }
    SUBCASE("energy indicator without a basis")
    {
        auto s  = small_dataset();
        auto defs = s.table.indicators();
        defs[0].basis = NormalizationBasis::None;
        s.table = IndicatorTable(s.table.territories(), defs, s.table.values());
        CHECK(check(s).count(ViolationKind::MissingNormalizationBasis) == 1);
    }
    SUBCASE("empty region")
    {
        auto s = small_dataset();
        s.regions.push_back({"Empty", {}});
        CHECK(check(s).count(ViolationKind::EmptyRegion) == 1);
    }
    SUBCASE("zero proxy total for a nonzero national value")
    {
        auto s = small_dataset();
        for (auto& [_, w] : s.proxies[0].weights) {
            w = 0;
        }
        const std::vector<NationalValue> national {{"P_agr", "IT", 10.0}};
        CHECK(validate_dataset(s.territories, s.table, s.proxies, s.regions, national).count(ViolationKind::ZeroProxyTotal) == 1);
        const std::vector<NationalValue> zero {{"P_agr", "IT", 0.0}};
        CHECK(validate_dataset(s.territories, s.table, s.proxies, s.regions, zero).ok());
    }
    SUBCASE("non-finite value")
    {
        auto s = small_dataset();
        s.table.set(0, 1, std::numeric_limits<double>::infinity());
        CHECK(check(s).count(ViolationKind::NonFiniteValue) == 1);
    }
}

TEST_CASE("validation is idempotent")
{
    auto s                     = small_dataset();
    s.territories[0].area_km2 = -3;
    s.regions[0].members.insert("ZZ999");
    const auto a = check(s);
    const auto b = check(s);
    CHECK(a == b);
    CHECK(a.violations.size() == 2);
}
