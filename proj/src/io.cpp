#include "regio/io.hpp"
#include "regio/error.hpp"
#include "regio/format.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace regio {

using json = nlohmann::json;

std::size_t CsvTable::column(std::string_view name, std::string_view source) const
{
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw Error(ErrorKind::Ingestion, std::string(source) + ": missing column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

std::string read_text_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Ingestion, "cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorKind::Ingestion, "failed reading '" + path.string() + "'");
    }
    return ss.str();
}

void write_text_file(const fs::path& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Export, "cannot write '" + path.string() + "'");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw Error(ErrorKind::Export, "failed writing '" + path.string() + "'");
    }
}

CsvTable parse_csv(std::string_view text, std::string_view source)
{
    if (text.starts_with("\xEF\xBB\xBF")) {
        text.remove_prefix(3);
    }

    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted      = false;
    bool fieldQuoted = false;
    std::size_t line = 1;

    auto endField = [&] {
        record.push_back(std::move(field));
        field.clear();
        fieldQuoted = false;
    };
    auto endRecord = [&] {
        endField();
        if (!(record.size() == 1 && record[0].empty())) {
            records.push_back(std::move(record));
        }
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty() || fieldQuoted) {
                throw Error(ErrorKind::Ingestion, std::string(source) + ":" + std::to_string(line) + ": stray quote");
            }
            quoted      = true;
            fieldQuoted = true;
            break;
        case ',':
            endField();
            break;
        case '\r':
            break;
        case '\n':
            endRecord();
            ++line;
            break;
        default:
            field.push_back(c);
        }
    }
    if (quoted) {
        throw Error(ErrorKind::Ingestion, std::string(source) + ": unterminated quoted field");
    }
    if (!field.empty() || !record.empty()) {
        endRecord();
    }

    if (records.empty()) {
        throw Error(ErrorKind::Ingestion, std::string(source) + ": missing header row");
    }

    CsvTable table;
    table.header = std::move(records.front());
    for (auto& h : table.header) {
        h.erase(0, h.find_first_not_of(" \t"));
        h.erase(h.find_last_not_of(" \t") + 1);
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size()) {
            throw Error(ErrorKind::Ingestion, std::string(source) + ": record " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                                                  " fields, header has " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable read_csv(const fs::path& path)
{
    return parse_csv(read_text_file(path), path.filename().string());
}

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string csv_line(const std::vector<std::string>& fields)
{
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            line.push_back(',');
        }
        line += csv_escape(fields[i]);
    }
    line.push_back('\n');
    return line;
}

std::optional<double> parse_number(std::string_view text)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) {
        text.remove_suffix(1);
    }
    if (text.empty()) {
        return std::nullopt;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw Error(ErrorKind::Ingestion, "not a finite number: '" + std::string(text) + "'");
    }
    return value;
}

namespace {

double require_number(const std::string& text, std::string_view source, std::size_t record, std::string_view column)
{
    try {
        auto v = parse_number(text);
        if (!v) {
            throw Error(ErrorKind::Ingestion, "empty value");
        }
        return *v;
    } catch (const Error& e) {
        throw Error(ErrorKind::Ingestion, std::string(source) + ": record " + std::to_string(record + 2) + ", column '" + std::string(column) + "': " + e.what());
    }
}

std::optional<double> optional_number(const std::string& text, std::string_view source, std::size_t record, std::string_view column)
{
    try {
        return parse_number(text);
    } catch (const Error& e) {
        throw Error(ErrorKind::Ingestion, std::string(source) + ": record " + std::to_string(record + 2) + ", column '" + std::string(column) + "': " + e.what());
    }
}

std::vector<LonLat> parse_ring(const json& ring)
{
    std::vector<LonLat> out;
    for (const auto& pt : ring) {
        if (!pt.is_array() || pt.size() < 2) {
            throw Error(ErrorKind::Ingestion, "geometry: malformed coordinate");
        }
        out.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    return out;
}

std::vector<PolygonRings> parse_geometry(const json& geom)
{
    std::vector<PolygonRings> polygons;
    const auto type = geom.at("type").get<std::string>();
    const auto& coords = geom.at("coordinates");
    if (type == "Polygon") {
        PolygonRings rings;
        for (const auto& ring : coords) {
            rings.push_back(parse_ring(ring));
        }
        polygons.push_back(std::move(rings));
    } else if (type == "MultiPolygon") {
        for (const auto& poly : coords) {
            PolygonRings rings;
            for (const auto& ring : poly) {
                rings.push_back(parse_ring(ring));
            }
            polygons.push_back(std::move(rings));
        }
    } else {
        throw Error(ErrorKind::Ingestion, "geometry: unsupported type '" + type + "'");
    }
    return polygons;
}

}

GeometryIndex read_geometry(const fs::path& path)
{
    GeometryIndex index;
    try {
        const auto doc = json::parse(read_text_file(path));
        for (const auto& feature : doc.at("features")) {
            const auto& props = feature.at("properties");
            if (!props.contains("territory_id") || feature.at("geometry").is_null()) {
                continue;
            }
            index[props.at("territory_id").get<std::string>()] = parse_geometry(feature.at("geometry"));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Ingestion, path.filename().string() + ": " + e.what());
    }
    return index;
}

DatasetPaths DatasetPaths::in_directory(const fs::path& dir)
{
    DatasetPaths p;
    p.territories    = dir / "territories.csv";
    p.indicators     = dir / "indicators.csv";
    p.indicator_defs = dir / "indicator_defs.csv";
    auto optional    = [&](const char* name) { return fs::exists(dir / name) ? dir / name : fs::path(); };
    p.proxies        = optional("proxies.csv");
    p.national       = optional("national.csv");
    p.regions        = optional("regions.csv");
    p.monthly        = optional("monthly.csv");
    p.geometry       = optional("geometry.geojson");
    return p;
}

Dataset load_dataset(const DatasetPaths& paths)
{
    Dataset ds;

    if (!paths.geometry.empty()) {
        ds.geometry = read_geometry(paths.geometry);
    }

    {
        const auto csv = read_csv(paths.territories);
        const auto src = paths.territories.filename().string();
        const auto cId = csv.column("territory_id", src);
        const auto cA  = csv.column("area_km2", src);
        const auto cP  = csv.column("population", src);
        const auto cLa = csv.column("lat", src);
        const auto cLo = csv.column("lon", src);
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            const auto& row = csv.rows[r];
            Territory t;
            t.id         = TerritoryId(row[cId]);
            t.area_km2   = require_number(row[cA], src, r, "area_km2");
            t.population = require_number(row[cP], src, r, "population");
            auto lat     = optional_number(row[cLa], src, r, "lat");
            auto lon     = optional_number(row[cLo], src, r, "lon");
            if (lat && lon) {
                t.lat = *lat;
                t.lon = *lon;
            } else if (auto g = ds.geometry.find(t.id.code); g != ds.geometry.end()) {
                try {
                    const auto c = compute_centroid(g->second);
                    t.lat        = c.lat;
                    t.lon        = c.lon;
                } catch (const Error& e) {
                    throw Error(ErrorKind::Ingestion, "geometry of '" + t.id.code + "': " + e.what());
                }
            } else {
                throw Error(ErrorKind::Ingestion, src + ": territory '" + t.id.code + "' has no coordinates and no geometry");
            }
            ds.territories.push_back(std::move(t));
        }
    }

    std::vector<IndicatorDef> defs;
    {
        const auto csv = read_csv(paths.indicator_defs);
        const auto src = paths.indicator_defs.filename().string();
        const auto cId = csv.column("indicator_id", src);
        const auto cK  = csv.column("kind", src);
        const auto cU  = csv.column("unit", src);
        const auto cB  = csv.column("normalization_basis", src);
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            const auto& row = csv.rows[r];
            auto kind       = parse_indicator_kind(row[cK]);
            auto basis      = parse_normalization_basis(row[cB]);
            if (!kind) {
                throw Error(ErrorKind::Ingestion, src + ": unknown kind '" + row[cK] + "'");
            }
            if (!basis) {
                throw Error(ErrorKind::Ingestion, src + ": unknown normalization_basis '" + row[cB] + "'");
            }
            defs.push_back({row[cId], *kind, row[cU], *basis});
        }
    }

    {
        std::vector<TerritoryId> fine;
        for (const auto& t : ds.territories) {
            if (t.id.level == 3) {
                fine.push_back(t.id);
            }
        }
        ds.table = IndicatorTable(fine, defs);

        const auto csv = read_csv(paths.indicators);
        const auto src = paths.indicators.filename().string();
        const auto cT  = csv.column("territory_id", src);
        const auto cI  = csv.column("indicator_id", src);
        const auto cV  = csv.column("value", src);
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            const auto& row = csv.rows[r];
            const auto value = optional_number(row[cV], src, r, "value");
            if (!value) {
                continue; // explicit missing
            }
            const auto col = ds.table.col_index(row[cI]);
            if (!col) {
                throw Error(ErrorKind::Ingestion, src + ": value for undeclared indicator '" + row[cI] + "'");
            }
            if (nuts_level(row[cT]) < 3) {
                ds.coarse_cells.push_back({row[cT], row[cI], *value});
                continue;
            }
            const auto rowIdx = ds.table.row_index(row[cT]);
            if (!rowIdx) {
                throw Error(ErrorKind::Ingestion, src + ": value for unknown territory '" + row[cT] + "'");
            }
            if (ds.table.at(*rowIdx, *col).has_value()) {
                throw Error(ErrorKind::Ingestion, src + ": duplicate value for (" + row[cT] + ", " + row[cI] + ")");
            }
            ds.table.set(*rowIdx, *col, *value);
        }
    }

    if (!paths.proxies.empty()) {
        const auto csv = read_csv(paths.proxies);
        const auto src = paths.proxies.filename().string();
        const auto cI  = csv.column("indicator_id", src);
        const auto cT  = csv.column("territory_id", src);
        const auto cW  = csv.column("weight", src);
        std::map<std::string, ProxyTable> byIndicator;
        std::vector<std::string> order;
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            const auto& row = csv.rows[r];
            auto [it, inserted] = byIndicator.try_emplace(row[cI]);
            if (inserted) {
                it->second.indicator_id = row[cI];
                order.push_back(row[cI]);
            }
            it->second.weights[row[cT]] = require_number(row[cW], src, r, "weight");
        }
        for (const auto& id : order) {
            ds.proxies.push_back(std::move(byIndicator[id]));
        }
    }

    if (!paths.national.empty()) {
        const auto csv = read_csv(paths.national);
        const auto src = paths.national.filename().string();
        const auto cI  = csv.column("indicator_id", src);
        const auto cC  = csv.column("country_code", src);
        const auto cV  = csv.column("value", src);
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            const auto& row = csv.rows[r];
            ds.national.push_back({row[cI], row[cC], require_number(row[cV], src, r, "value")});
        }
    }

    if (!paths.regions.empty()) {
        const auto csv = read_csv(paths.regions);
        const auto src = paths.regions.filename().string();
        const auto cR  = csv.column("region_name", src);
        const auto cT  = csv.column("territory_id", src);
        for (const auto& row : csv.rows) {
            auto it = std::find_if(ds.regions.begin(), ds.regions.end(), [&](const RegionSet& rs) { return rs.name == row[cR]; });
            if (it == ds.regions.end()) {
                ds.regions.push_back({row[cR], {}});
                it = std::prev(ds.regions.end());
            }
            it->members.insert(row[cT]);
        }
    }

    if (!paths.monthly.empty()) {
        const auto csv = read_csv(paths.monthly);
        const auto src = paths.monthly.filename().string();
        const auto cT  = csv.column("territory_id", src);
        const auto cI  = csv.column("indicator_id", src);
        const auto cM  = csv.column("month", src);
        const auto cV  = csv.column("value", src);
        std::map<std::pair<std::string, std::string>, std::pair<MonthlyValues, unsigned>> series;
        std::vector<std::pair<std::string, std::string>> order;
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            const auto& row   = csv.rows[r];
            const double m    = require_number(row[cM], src, r, "month");
            const auto month  = static_cast<int>(m);
            if (m != month || month < 1 || month > 12) {
                throw Error(ErrorKind::Ingestion, src + ": month must be an integer in 1..12");
            }
            auto key            = std::make_pair(row[cT], row[cI]);
            auto [it, inserted] = series.try_emplace(key);
            if (inserted) {
                it->second.first.territory = row[cT];
                it->second.first.indicator = row[cI];
                order.push_back(key);
            }
            const unsigned bit = 1u << (month - 1);
            if (it->second.second & bit) {
                throw Error(ErrorKind::Ingestion, src + ": duplicate month for (" + row[cT] + ", " + row[cI] + ")");
            }
            it->second.second |= bit;
            it->second.first.months[static_cast<std::size_t>(month - 1)] = require_number(row[cV], src, r, "value");
        }
        for (const auto& key : order) {
            auto& [mv, mask] = series[key];
            if (mask != 0xFFFu) {
                throw Error(ErrorKind::Ingestion, src + ": (" + key.first + ", " + key.second + ") does not have all 12 months");
            }
            ds.monthly.push_back(mv);
        }
    }

    return ds;
}

ValidationReport Dataset::validate() const
{
    return validate_dataset(territories, table, proxies, regions, national);
}

HarmonizeInput Dataset::harmonize_input() const
{
    return HarmonizeInput {territories, table, coarse_cells, national, proxies, monthly};
}

std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path)
{
    const auto text = read_text_file(path);
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    auto trim  = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
    };
    while (std::getline(in, line)) {
        ++lineNo;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::Ingestion, path.filename().string() + ":" + std::to_string(lineNo) + ": expected 'key = value'");
        }
        auto key   = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (key.empty()) {
            throw Error(ErrorKind::Ingestion, path.filename().string() + ":" + std::to_string(lineNo) + ": empty key");
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

std::string table_to_csv(const IndicatorTable& table)
{
    std::string out;
    std::vector<std::string> fields {"territory_id"};
    for (const auto& def : table.indicators()) {
        fields.push_back(def.id);
    }
    out += csv_line(fields);
    for (std::size_t i = 0; i < table.rows(); ++i) {
        fields.assign(1, table.territories()[i].code);
        for (std::size_t j = 0; j < table.cols(); ++j) {
            const auto& v = table.at(i, j);
            fields.push_back(v ? format_number(*v) : std::string());
        }
        out += csv_line(fields);
    }
    return out;
}

void write_dataset(const fs::path& dir, const Dataset& ds)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorKind::Export, "cannot create '" + dir.string() + "': " + ec.message());
    }

    std::string text = csv_line({"territory_id", "area_km2", "population", "lat", "lon"});
    for (const auto& t : ds.territories) {
        text += csv_line({t.id.code, format_number(t.area_km2), format_number(t.population), format_number(t.lat), format_number(t.lon)});
    }
    write_text_file(dir / "territories.csv", text);

    text = csv_line({"indicator_id", "kind", "unit", "normalization_basis"});
    for (const auto& def : ds.table.indicators()) {
        text += csv_line({def.id, std::string(to_string(def.kind)), def.unit, std::string(to_string(def.basis))});
    }
    write_text_file(dir / "indicator_defs.csv", text);

    text = csv_line({"territory_id", "indicator_id", "value"});
    for (std::size_t i = 0; i < ds.table.rows(); ++i) {
        for (std::size_t j = 0; j < ds.table.cols(); ++j) {
            if (const auto& v = ds.table.at(i, j)) {
                text += csv_line({ds.table.territories()[i].code, ds.table.indicators()[j].id, format_number(*v)});
            }
        }
    }
    for (const auto& cell : ds.coarse_cells) {
        text += csv_line({cell.territory, cell.indicator, format_number(cell.value)});
    }
    write_text_file(dir / "indicators.csv", text);

    text = csv_line({"indicator_id", "territory_id", "weight"});
    for (const auto& proxy : ds.proxies) {
        for (const auto& [code, w] : proxy.weights) {
            text += csv_line({proxy.indicator_id, code, format_number(w)});
        }
    }
    write_text_file(dir / "proxies.csv", text);

    text = csv_line({"indicator_id", "country_code", "value"});
    for (const auto& nv : ds.national) {
        text += csv_line({nv.indicator_id, nv.country_code, format_number(nv.value)});
    }
    write_text_file(dir / "national.csv", text);

    text = csv_line({"region_name", "territory_id"});
    for (const auto& region : ds.regions) {
        for (const auto& member : region.members) {
            text += csv_line({region.name, member});
        }
    }
    write_text_file(dir / "regions.csv", text);

    if (!ds.monthly.empty()) {
        text = csv_line({"territory_id", "indicator_id", "month", "value"});
        for (const auto& mv : ds.monthly) {
            for (std::size_t m = 0; m < 12; ++m) {
                text += csv_line({mv.territory, mv.indicator, std::to_string(m + 1), format_number(mv.months[m])});
            }
        }
        write_text_file(dir / "monthly.csv", text);
    }
}

}
