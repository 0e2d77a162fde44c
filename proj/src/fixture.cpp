#include "regio/fixture.hpp"
#include "regio/error.hpp"
#include "regio/format.hpp"
#include "regio/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace regio {

namespace {

struct EnergyColumn
{
    const char* id;
    const char* unit;
    NormalizationBasis basis;
    bool national;
};

// Mirrors the usual set of biomass, waste, wind and solar potentials.
constexpr EnergyColumn energy_columns[] = {
    {"P_agr", "PJ/km2", NormalizationBasis::PerArea, true},
    {"P_for", "PJ/km2", NormalizationBasis::PerArea, true},
    {"P_liv", "PJ/km2", NormalizationBasis::PerArea, true},
    {"P_mun", "MJ/inhab", NormalizationBasis::PerCapita, true},
    {"P_ww", "kW/inhab", NormalizationBasis::PerCapita, false},
    {"P_wind", "GWh/hub", NormalizationBasis::MedianPerSite, false},
    {"P_sun", "kWh/m2", NormalizationBasis::MedianPerSite, false},
};

constexpr std::pair<const char*, const char*> socio_columns[] = {
    {"hdd", "K d"},
    {"cdd", "K d"},
    {"gdp_pps", "EUR/inhab"},
    {"income", "EUR/inhab"},
    {"R_edu", "%"},
    {"R_unemp", "%"},
    {"h", "m"},
    {"A_urban", "%"},
    {"r_and_d", "EUR/inhab"},
};

constexpr const char* region_names[] = {"Alpine", "Baltic Sea", "Danube", "Adriatic-Ionian"};

std::string country_code(std::size_t index)
{
    std::string code(2, 'A');
    code[0] = static_cast<char>('A' + (index / 26) % 26);
    code[1] = static_cast<char>('A' + index % 26);
    return code;
}

}

void FixtureConfig::validate() const
{
    if (n_blobs < 1 || d_energy < 0 || d_socio < 0 || d_energy + d_socio < 1) {
        throw Error(ErrorKind::Domain, "fixture needs n_blobs >= 1 and at least one indicator column");
    }
    if (n_territories < static_cast<std::size_t>(n_blobs) * 3) {
        throw Error(ErrorKind::Domain, "fixture needs n_territories >= 3 * n_blobs");
    }
    if (!(separation > 0.0)) {
        throw Error(ErrorKind::Domain, "separation must be > 0");
    }
    if (sparse_column_fraction < 0.0 || sparse_column_fraction >= 1.0) {
        throw Error(ErrorKind::Domain, "sparse_column_fraction must lie in [0,1)");
    }
    if (correlated_column && d_socio < 1) {
        throw Error(ErrorKind::Domain, "correlated_column needs d_socio >= 1");
    }
}

Fixture generate_fixture(const FixtureConfig& cfg)
{
    cfg.validate();

    Rng rng(derive_seed(cfg.seed, 0xF1));
    const auto n = cfg.n_territories;
    const auto d = static_cast<std::size_t>(cfg.d_energy + cfg.d_socio);
    const auto blobs = static_cast<std::size_t>(cfg.n_blobs);

    // Planted centres in units of the blob sd, pairwise at least `separation` apart.
    std::vector<std::vector<double>> centres;
    double side = cfg.separation * 1.5;
    while (centres.size() < blobs) {
        centres.clear();
        for (int attempt = 0; attempt < 20000 && centres.size() < blobs; ++attempt) {
            std::vector<double> c(d);
            for (auto& x : c) {
                x = rng.uniform(0.0, side);
            }
            const bool farEnough = std::all_of(centres.begin(), centres.end(), [&](const std::vector<double>& other) {
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    s += (c[j] - other[j]) * (c[j] - other[j]);
                }
                return std::sqrt(s) >= cfg.separation;
            });
            if (farEnough) {
                centres.push_back(std::move(c));
            }
        }
        side *= 1.25;
    }

    // Balanced blob labels in random order.
    std::vector<int> label(n);
    for (std::size_t i = 0; i < n; ++i) {
        label[i] = static_cast<int>(i % blobs);
    }
    for (std::size_t i = n; i > 1; --i) {
        std::swap(label[i - 1], label[static_cast<std::size_t>(rng.below(i))]);
    }

    // Latent standardized-ish values; offset keeps potentials positive.
    std::vector<std::vector<double>> latent(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (blobs == 1) {
                latent[i][j] = 10.0 + rng.uniform(0.0, side);
            } else {
                latent[i][j] = 10.0 + centres[static_cast<std::size_t>(label[i])][j] + rng.normal();
            }
        }
    }

    std::vector<double> scale(d);
    for (auto& s : scale) {
        s = std::pow(10.0, rng.uniform(-2.0, 3.0));
    }

    // Territories, grouped into countries of ~20.
    const std::size_t nCountries = std::max<std::size_t>(2, n / 20);
    Fixture fx;
    auto& ds = fx.dataset;
    std::vector<std::size_t> countryOf(n);
    std::vector<std::pair<double, double>> countryCentre(nCountries);
    for (auto& cc : countryCentre) {
        cc = {rng.uniform(36.0, 68.0), rng.uniform(-9.0, 30.0)};
    }
    std::vector<std::size_t> perCountry(nCountries, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = i * nCountries / n;
        countryOf[i] = c;
        Territory t;
        t.id         = TerritoryId(country_code(c) + std::to_string(101 + perCountry[c]++));
        t.area_km2   = std::round(std::exp(std::log(1500.0) + 0.6 * rng.normal()) * 10.0) / 10.0;
        const double density = std::exp(std::log(150.0) + 0.8 * rng.normal());
        t.population = std::max(1000.0, std::round(t.area_km2 * density));
        t.lat        = std::round((countryCentre[c].first + rng.uniform(-1.5, 1.5)) * 1e4) / 1e4;
        t.lon        = std::round((countryCentre[c].second + rng.uniform(-2.0, 2.0)) * 1e4) / 1e4;
        ds.territories.push_back(std::move(t));
        fx.key[ds.territories.back().id.code] = label[i];
    }

    std::vector<IndicatorDef> defs;
    for (int e = 0; e < cfg.d_energy; ++e) {
        if (static_cast<std::size_t>(e) < std::size(energy_columns)) {
            const auto& col = energy_columns[e];
            defs.push_back({col.id, IndicatorKind::Energy, col.unit, col.basis});
        } else {
            defs.push_back({"P_extra" + std::to_string(e + 1), IndicatorKind::Energy, "GWh/hub", NormalizationBasis::MedianPerSite});
        }
    }
    for (int s = 0; s < cfg.d_socio; ++s) {
        if (static_cast<std::size_t>(s) < std::size(socio_columns)) {
            defs.push_back({socio_columns[s].first, IndicatorKind::NonEnergy, socio_columns[s].second, NormalizationBasis::None});
        } else {
            defs.push_back({"socio" + std::to_string(s + 1), IndicatorKind::NonEnergy, "", NormalizationBasis::None});
        }
    }
    const std::size_t sparseCol     = defs.size();
    if (cfg.sparse_column_fraction > 0.0) {
        defs.push_back({"aux_sparse", IndicatorKind::NonEnergy, "", NormalizationBasis::None});
    }
    const std::size_t correlatedCol = defs.size();
    if (cfg.correlated_column) {
        defs.push_back({"gdp_total", IndicatorKind::NonEnergy, "EUR", NormalizationBasis::None});
    }

    std::vector<TerritoryId> ids;
    for (const auto& t : ds.territories) {
        ids.push_back(t.id);
    }
    ds.table = IndicatorTable(ids, defs);

    const MswParams msw;
    for (std::size_t j = 0; j < d; ++j) {
        const auto& def = defs[j];
        auto& planted   = fx.planted[def.id];
        const bool isEnergy = j < static_cast<std::size_t>(cfg.d_energy);
        const bool national = isEnergy && j < std::size(energy_columns) && energy_columns[j].national;

        std::vector<double> totals(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& t = ds.territories[i];
            const double v = latent[i][j] * scale[j];
            planted[t.id.code] = v;
            switch (def.basis) {
            case NormalizationBasis::PerArea: totals[i] = v * t.area_km2; break;
            case NormalizationBasis::PerCapita: totals[i] = v * t.population; break;
            default: totals[i] = v; break;
            }
        }

        if (national) {
            ProxyTable proxy {def.id, {}};
            std::vector<double> countryTotal(nCountries, 0.0);
            std::vector<double> countryScale(nCountries);
            for (auto& s : countryScale) {
                s = rng.uniform(0.5, 2.0);
            }
            for (std::size_t i = 0; i < n; ++i) {
                countryTotal[countryOf[i]] += totals[i];
                proxy.weights[ds.territories[i].id.code] = totals[i] * countryScale[countryOf[i]];
            }
            for (std::size_t c = 0; c < nCountries; ++c) {
                double value = countryTotal[c];
                if (def.id == std::string("P_mun")) {
                    value /= msw.lower_heating_value * msw.equivalence_ratio; // waste mass in kg
                }
                ds.national.push_back({def.id, country_code(c), value});
            }
            ds.proxies.push_back(std::move(proxy));
            if (def.id == std::string("P_mun")) {
                fx.msw_indicator = def.id;
            }
        } else if (def.id == std::string("hdd")) {
            // Monthly series with a seasonal shape summing to the annual value.
            static constexpr double shape[12] = {17, 15, 13, 9, 5, 1, 0.5, 0.5, 2, 7, 12, 18};
            const double shapeSum = std::accumulate(std::begin(shape), std::end(shape), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                MonthlyValues mv;
                mv.territory = ds.territories[i].id.code;
                mv.indicator = def.id;
                for (std::size_t m = 0; m < 12; ++m) {
                    mv.months[m] = totals[i] * shape[m] / shapeSum;
                }
                ds.monthly.push_back(mv);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                ds.table.set(i, j, totals[i]);
            }
        }
    }

    if (cfg.sparse_column_fraction > 0.0) {
        const auto missing = static_cast<std::size_t>(std::ceil(cfg.sparse_column_fraction * static_cast<double>(n)));
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = 0; i < missing; ++i) {
            std::swap(order[i], order[i + static_cast<std::size_t>(rng.below(n - i))]);
        }
        std::vector<bool> isMissing(n, false);
        for (std::size_t i = 0; i < missing; ++i) {
            isMissing[order[i]] = true;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!isMissing[i]) {
                ds.table.set(i, sparseCol, rng.uniform(0.0, 100.0));
            }
        }
    }

    if (cfg.correlated_column) {
        const auto& base = fx.planted[defs[static_cast<std::size_t>(cfg.d_energy)].id];
        for (std::size_t i = 0; i < n; ++i) {
            ds.table.set(i, correlatedCol, 2.0 * base.at(ds.territories[i].id.code) + 5.0);
        }
    }

    // Macro-regions over overlapping runs of countries.
    const auto nRegions = std::min<std::size_t>(std::size(region_names), nCountries);
    for (std::size_t r = 0; r < nRegions; ++r) {
        RegionSet region {region_names[r], {}};
        const auto first = r * nCountries / nRegions;
        const auto last  = std::min(nCountries, (r + 1) * nCountries / nRegions + 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (countryOf[i] >= first && countryOf[i] < last) {
                region.members.insert(ds.territories[i].id.code);
            }
        }
        ds.regions.push_back(std::move(region));
    }

    if (cfg.emit_geometry) {
        for (const auto& t : ds.territories) {
            // Square of roughly the right extent around the centroid.
            const double halfLat = std::sqrt(t.area_km2) / 111.0 / 2.0;
            const double halfLon = halfLat / std::cos(t.lat * std::numbers::pi / 180.0);
            const double x0 = t.lon - halfLon, x1 = t.lon + halfLon;
            const double y0 = t.lat - halfLat, y1 = t.lat + halfLat;
            ds.geometry[t.id.code] = {PolygonRings {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}}}};
        }
    }

    return fx;
}

void write_fixture(const fs::path& dir, const Fixture& fx)
{
    write_dataset(dir, fx.dataset);

    std::string text = csv_line({"territory_id", "blob"});
    for (const auto& t : fx.dataset.territories) {
        text += csv_line({t.id.code, std::to_string(fx.key.at(t.id.code))});
    }
    write_text_file(dir / "key.csv", text);

    if (!fx.dataset.geometry.empty()) {
        nlohmann::ordered_json features = nlohmann::ordered_json::array();
        for (const auto& t : fx.dataset.territories) {
            auto it = fx.dataset.geometry.find(t.id.code);
            if (it == fx.dataset.geometry.end()) {
                continue;
            }
            nlohmann::ordered_json rings = nlohmann::ordered_json::array();
            for (const auto& ring : it->second.front()) {
                nlohmann::ordered_json coords = nlohmann::ordered_json::array();
                for (const auto& p : ring) {
                    coords.push_back({std::round(p.lon * 1e6) / 1e6, std::round(p.lat * 1e6) / 1e6});
                }
                rings.push_back(std::move(coords));
            }
            features.push_back({{"type", "Feature"},
                                {"properties", {{"territory_id", t.id.code}}},
                                {"geometry", {{"type", "Polygon"}, {"coordinates", std::move(rings)}}}});
        }
        nlohmann::ordered_json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
        write_text_file(dir / "geometry.geojson", doc.dump() + "\n");
    }
}

}
