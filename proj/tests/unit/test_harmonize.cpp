#include "regio/error.hpp"
#include "regio/harmonize.hpp"
#include "regio/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace regio;

namespace {

std::vector<Territory> territories(std::initializer_list<const char*> codes)
{
    std::vector<Territory> out;
    for (const char* c : codes) {
        out.push_back({TerritoryId(c), 100.0, 1000.0, 45.0, 10.0});
    }
    return out;
}

}

TEST_CASE("downscale_by_proxy examples")
{
    const auto ts                   = territories({"ITA01", "ITA02", "FRB01"});
    const std::vector<CoarseValue> c {{"IT", 100.0}};

    auto out = downscale_by_proxy(c, {"x", {{"ITA01", 2}, {"ITA02", 3}}}, ts);
    CHECK(out.at("ITA01") == doctest::Approx(40.0));
    CHECK(out.at("ITA02") == doctest::Approx(60.0));
    CHECK(out.count("FRB01") == 0);

    const auto single = territories({"ITA01"});
    CHECK(downscale_by_proxy(c, {"x", {{"ITA01", 7}}}, single).at("ITA01") == 100.0);

    CHECK_THROWS_AS(downscale_by_proxy(c, {"x", {{"ITA01", 0}, {"ITA02", 0}}}, ts), Error);

    const std::vector<CoarseValue> zero {{"IT", 0.0}};
    out = downscale_by_proxy(zero, {"x", {{"ITA01", 0}, {"ITA02", 0}}}, ts);
    CHECK(out.at("ITA01") == 0.0);
    CHECK(out.at("ITA02") == 0.0);
}

TEST_CASE("downscaling conserves, scales and ignores weight scale")
{
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Territory> ts;
        ProxyTable proxy {"x", {}};
        ProxyTable scaled {"x", {}};
        std::vector<CoarseValue> coarse;
        const char* countries[] = {"AA", "BB", "CC"};
        for (const char* cc : countries) {
            const double factor = std::exp(rng.uniform(-5, 5));
            const int n         = 1 + static_cast<int>(rng.below(30));
            for (int i = 0; i < n; ++i) {
                const std::string code = std::string(cc) + std::to_string(100 + i);
                ts.push_back({TerritoryId(code), 1.0, 1.0, 0.0, 0.0});
                const double w = rng.uniform() < 0.1 ? 0.0 : rng.uniform(0, 100);
                proxy.weights[code]  = w;
                scaled.weights[code] = w * factor;
            }
            proxy.weights[std::string(cc) + "100"] += 1.0;
            scaled.weights[std::string(cc) + "100"] += factor;
            coarse.push_back({cc, std::exp(rng.uniform(-10, 20))});
        }
        const auto out = downscale_by_proxy(coarse, proxy, ts);
        const auto alt = downscale_by_proxy(coarse, scaled, ts);
        auto tripled   = coarse;
        for (auto& c : tripled) {
            c.value *= 3.0;
        }
        const auto big = downscale_by_proxy(tripled, proxy, ts);
        for (const auto& c : coarse) {
            double sum = 0.0;
            for (const auto& [code, v] : out) {
                if (code.starts_with(c.country_code)) {
                    sum += v;
                }
            }
            CHECK(std::abs(sum - c.value) <= 1e-9 * c.value);
        }
        for (const auto& [code, v] : out) {
            CHECK(alt.at(code) == doctest::Approx(v).epsilon(1e-12));
            CHECK(big.at(code) == doctest::Approx(3.0 * v).epsilon(1e-12));
        }
    }
}

TEST_CASE("msw potential")
{
    CHECK(msw_potential(0.0) == 0.0);
    CHECK(msw_potential(1.0) == doctest::Approx(4.14));
    CHECK(msw_potential(1e9) == doctest::Approx(4.14e9));
    CHECK(msw_potential(5.0) + msw_potential(7.0) == doctest::Approx(msw_potential(12.0)));
    CHECK(msw_potential(2.0, {10.0, 0.5}) == doctest::Approx(10.0));
    CHECK_THROWS_AS(msw_potential(-1.0), Error);
}

TEST_CASE("normalize_indicator")
{
    CHECK(normalize_indicator({{"A", 10}}, {{"A", 2}}).at("A") == 5.0);
    CHECK(normalize_indicator({{"A", 0}}, {{"A", 5}}).at("A") == 0.0);
    CHECK_THROWS_AS(normalize_indicator({{"A", 10}}, {{"A", 0}}), Error);
    CHECK_THROWS_AS(normalize_indicator({{"A", 10}}, {}), Error);
    const double a = normalize_indicator({{"A", 7.3}}, {{"A", 1.9}}).at("A");
    const double b = normalize_indicator({{"A", 7.3 * 41}}, {{"A", 1.9 * 41}}).at("A");
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
}

TEST_CASE("degree days")
{
    const std::array<double, 12> zeros {};
    CHECK(annualize_degree_days(zeros) == 0.0);
    std::array<double, 12> hundreds;
    hundreds.fill(100.0);
    CHECK(annualize_degree_days(hundreds) == 1200.0);
    const std::array<double, 12> months {310, 280, 250, 180, 90, 20, 5, 5, 40, 130, 230, 300};
    CHECK(annualize_degree_days(months) == std::accumulate(months.begin(), months.end(), 0.0));
    CHECK(annualize_degree_days(months) == 1840.0);
    const std::array<double, 11> short_year {};
    CHECK_THROWS_AS(annualize_degree_days(short_year), Error);
    auto negative = months;
    negative[3]   = -1.0;
    CHECK_THROWS_AS(annualize_degree_days(negative), Error);
}

TEST_CASE("polygon centroids")
{
    const std::vector<LonLat> square {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    auto c = compute_centroid(square);
    CHECK(c.lon == doctest::Approx(0.5));
    CHECK(c.lat == doctest::Approx(0.5));

    const std::vector<LonLat> triangle {{0, 0}, {3, 0}, {0, 3}};
    c = compute_centroid(triangle);
    CHECK(c.lon == doctest::Approx(1.0));
    CHECK(c.lat == doctest::Approx(1.0));

    // L-shape as a 2x1 bar plus a 1x1 square on top.
    const double barArea = 2.0, barX = 1.0, barY = 0.5;
    const double sqArea = 1.0, sqX = 0.5, sqY = 1.5;
    const double ox     = (barArea * barX + sqArea * sqX) / (barArea + sqArea);
    const double oy     = (barArea * barY + sqArea * sqY) / (barArea + sqArea);
    const std::vector<LonLat> ell {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    c = compute_centroid(ell);
    CHECK(c.lon == doctest::Approx(ox).epsilon(1e-12));
    CHECK(c.lat == doctest::Approx(oy).epsilon(1e-12));
    CHECK(c.lon == doctest::Approx(5.0 / 6.0));

    std::vector<LonLat> closedClockwise(ell.rbegin(), ell.rend());
    closedClockwise.push_back(closedClockwise.front());
    c = compute_centroid(closedClockwise);
    CHECK(c.lon == doctest::Approx(ox).epsilon(1e-12));

    std::vector<LonLat> shifted;
    for (auto p : ell) {
        shifted.push_back({p.lon + 1000.0, p.lat + 40.0});
    }
    c = compute_centroid(shifted);
    CHECK(c.lon == doctest::Approx(ox + 1000.0).epsilon(1e-12));
    CHECK(c.lat == doctest::Approx(oy + 40.0).epsilon(1e-12));

    const std::vector<LonLat> line {{0, 0}, {1, 1}, {2, 2}};
    CHECK_THROWS_AS(compute_centroid(line), Error);
}

TEST_CASE("multipolygon centroid with a hole")
{
    const std::vector<PolygonRings> framed {{
        {{0, 0}, {4, 0}, {4, 4}, {0, 4}},
        {{0, 0}, {2, 0}, {2, 2}, {0, 2}},
    }};
    // 16 - 4 = 12 area; (16*2 - 4*1)/12 = 7/3
    auto c = compute_centroid(framed);
    CHECK(c.lon == doctest::Approx(7.0 / 3.0));
    CHECK(c.lat == doctest::Approx(7.0 / 3.0));

    const std::vector<PolygonRings> parts {
        {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}},
        {{{10, 0}, {13, 0}, {13, 1}, {10, 1}}},
    };
    c = compute_centroid(parts);
    CHECK(c.lon == doctest::Approx((0.5 * 1 + 11.5 * 3) / 4.0));
    CHECK(c.lat == doctest::Approx(0.5));
}

TEST_CASE("harmonize assembles a level-3 table")
{
    std::vector<Territory> ts {
        {TerritoryId("AA"), 300, 3000, 0, 0},
        {TerritoryId("AA101"), 100, 1000, 45.0, 7.0},
        {TerritoryId("AA102"), 200, 4000, 46.0, 8.0},
        {TerritoryId("AB101"), 50, 500, 47.0, 9.0},
    };
    std::vector<IndicatorDef> defs {
        {"P_agr", IndicatorKind::Energy, "MJ", NormalizationBasis::PerArea},
        {"P_mun", IndicatorKind::Energy, "MJ", NormalizationBasis::PerCapita},
        {"hdd", IndicatorKind::NonEnergy, "K.d", NormalizationBasis::None},
        {"gdp", IndicatorKind::NonEnergy, "EUR", NormalizationBasis::None},
    };
    HarmonizeInput in;
    in.territories = ts;
    in.table       = IndicatorTable({TerritoryId("AA101")}, defs);
    in.table.set(0, 3, 25000.0);
    in.coarse_cells = {{"AA", "gdp", 30000.0}, {"AB", "gdp", 20000.0}};
    in.national     = {{"P_agr", "AA", 900.0}, {"P_agr", "AB", 10.0}, {"P_mun", "AA", 1000.0}, {"P_mun", "AB", 0.0}};
    in.proxies      = {{"P_agr", {{"AA101", 1}, {"AA102", 2}, {"AB101", 5}}}, {"P_mun", {{"AA101", 1}, {"AA102", 1}, {"AB101", 1}}}};
    std::array<double, 12> months {310, 280, 250, 180, 90, 20, 5, 5, 40, 130, 230, 300};
    in.monthly = {{"AA101", "hdd", months}, {"AA102", "hdd", months}, {"AB101", "hdd", months}};

    HarmonizeOptions opt;
    opt.territory_columns = {TerritoryColumn::Density};
    const auto res        = harmonize(in, opt);
    const auto& t         = res.table;

    REQUIRE(t.rows() == 3);
    REQUIRE(t.cols() == 5);
    const auto r1 = *t.row_index("AA101");
    const auto r2 = *t.row_index("AA102");
    const auto r3 = *t.row_index("AB101");
    CHECK(*t.at(r1, 0) == doctest::Approx(300.0 / 100.0));
    CHECK(*t.at(r2, 0) == doctest::Approx(600.0 / 200.0));
    CHECK(*t.at(r3, 0) == doctest::Approx(10.0 / 50.0));
    CHECK(*t.at(r1, 1) == doctest::Approx(500.0 * 4.14 / 1000.0));
    CHECK(*t.at(r2, 1) == doctest::Approx(500.0 * 4.14 / 4000.0));
    CHECK(*t.at(r3, 1) == 0.0);
    CHECK(*t.at(r1, 2) == 1840.0);
    CHECK(*t.at(r1, 3) == 25000.0);
    CHECK(*t.at(r2, 3) == 30000.0);
    CHECK(*t.at(r3, 3) == 20000.0);
    CHECK(*t.at(r2, 4) == doctest::Approx(20.0));
    CHECK_FALSE(res.log.empty());

    auto clash = in;
    clash.table.set(0, 0, 1.0);
    CHECK_THROWS_AS(harmonize(clash, opt), Error);
}
