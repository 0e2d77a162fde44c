#pragma once

#include "regio/harmonize.hpp"
#include "regio/io.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace regio {

struct FixtureConfig
{
    std::size_t n_territories = 340;
    int n_blobs               = 17;
    int d_energy              = 7;
    int d_socio               = 8;
    uint64_t seed             = 7;
    /// Minimum distance between planted blob centres, in units of the blob sd.
    double separation = 6.0;
    /// When > 0, adds a noise column "aux_sparse" with this fraction of missing cells.
    double sparse_column_fraction = 0.0;
    /// Adds "gdp_total", an exact linear function of the first socio column.
    bool correlated_column = false;
    bool emit_geometry     = true;

    void validate() const;
};

/// Synthetic "mini-Europe": territories grouped into countries, indicator
/// columns drawn as Gaussian blobs around planted centres (uniform noise when
/// n_blobs == 1), and the national totals + proxies that reproduce the
/// planted per-territory values through downscaling and normalization.
struct Fixture
{
    Dataset dataset;
    std::map<std::string, int> key; // territory -> planted blob
    /// Planted per-territory values after harmonization, by indicator.
    std::map<std::string, std::map<std::string, double>> planted;
    std::string msw_indicator;
};

Fixture generate_fixture(const FixtureConfig& cfg);

/// Writes the dataset files, key.csv and (optionally) geometry.geojson.
void write_fixture(const fs::path& dir, const Fixture& fixture);

}
