#pragma once

#include "regio/harmonize.hpp"
#include "regio/model.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace regio {

namespace fs = std::filesystem;

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position by name; throws Ingestion naming `source` when absent.
    std::size_t column(std::string_view name, std::string_view source) const;
};

/// RFC 4180-style reader (quoted fields, "" escapes). A UTF-8 BOM is skipped.
CsvTable read_csv(const fs::path& path);
CsvTable parse_csv(std::string_view text, std::string_view source);

std::string csv_escape(std::string_view field);
std::string csv_line(const std::vector<std::string>& fields);

/// Parses a real number written with a '.' decimal separator; empty -> nullopt.
std::optional<double> parse_number(std::string_view text);

struct DatasetPaths
{
    fs::path territories;
    fs::path indicators;
    fs::path indicator_defs;
    fs::path proxies;   // optional
    fs::path national;  // optional
    fs::path regions;   // optional
    fs::path monthly;   // optional
    fs::path geometry;  // optional GeoJSON FeatureCollection

    /// Standard file names inside `dir`; optional files only when they exist.
    static DatasetPaths in_directory(const fs::path& dir);
};

using GeometryIndex = std::map<std::string, std::vector<PolygonRings>>;

struct Dataset
{
    std::vector<Territory> territories;
    IndicatorTable table; // level-3 rows only
    std::vector<CoarseCell> coarse_cells;
    std::vector<NationalValue> national;
    std::vector<ProxyTable> proxies;
    std::vector<RegionSet> regions;
    std::vector<MonthlyValues> monthly;
    GeometryIndex geometry;

    ValidationReport validate() const;
    HarmonizeInput harmonize_input() const;
};

/// Reads and type-checks every input file. Any unreadable or malformed file
/// raises an Ingestion error; structural problems are left to validation.
/// Territories with empty lat/lon take the centroid of their geometry.
Dataset load_dataset(const DatasetPaths& paths);

GeometryIndex read_geometry(const fs::path& path);

/// Flat `key = value` lines; '#' starts a comment. Keys keep file order.
std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path);

void write_text_file(const fs::path& path, std::string_view content);
std::string read_text_file(const fs::path& path);

/// Wide CSV of a table: territory_id then one column per indicator; missing cells empty.
std::string table_to_csv(const IndicatorTable& table);

/// Writes the six input CSVs (plus monthly.csv when present) into `dir`.
void write_dataset(const fs::path& dir, const Dataset& dataset);

}
