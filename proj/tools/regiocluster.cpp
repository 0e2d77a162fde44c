#include "regio/error.hpp"
#include "regio/fixture.hpp"
#include "regio/format.hpp"
#include "regio/io.hpp"
#include "regio/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <set>

namespace {

using namespace regio;

struct Options
{
    std::string data_dir;
    std::string territories, indicators, indicator_defs, proxies, national, regions, monthly, geometry;
    std::string config;
    std::string out = "out";
    std::string msw_indicator = "P_mun";
    std::vector<std::string> territory_columns;

    uint64_t seed = 42;
    int k         = 17;
    int k_min     = 15;
    int k_max     = 20;
    int max_iter  = 50;
    int n_starts  = 10;
    std::string init = "dsq_weighted";
    std::vector<std::string> indices;
    bool skip_vote    = false;
    bool emit_geojson = false;

    double missing_threshold = 0.18;
    double corr_threshold    = 0.85;
    std::size_t hopkins_sample = 0;
    int hopkins_repeats        = 10;
    double bin_inner  = 0.25;
    double bin_middle = 0.75;
    double bin_outer  = 1.5;

    FixtureConfig fixture;
    bool no_geometry = false;
};

[[noreturn]] void usage_error(const std::string& msg)
{
    throw CLI::ValidationError(msg);
}

DatasetPaths dataset_paths(const Options& o)
{
    DatasetPaths p;
    if (!o.data_dir.empty()) {
        p = DatasetPaths::in_directory(o.data_dir);
    }
    auto take = [](fs::path& slot, const std::string& value) {
        if (!value.empty()) {
            slot = value;
        }
    };
    take(p.territories, o.territories);
    take(p.indicators, o.indicators);
    take(p.indicator_defs, o.indicator_defs);
    take(p.proxies, o.proxies);
    take(p.national, o.national);
    take(p.regions, o.regions);
    take(p.monthly, o.monthly);
    take(p.geometry, o.geometry);
    if (p.territories.empty() || p.indicators.empty() || p.indicator_defs.empty()) {
        usage_error("territories, indicators and indicator_defs are required (use --data <dir> or the per-file flags)");
    }
    return p;
}

RunConfig run_config(const Options& o)
{
    RunConfig cfg;
    cfg.inputs                      = dataset_paths(o);
    cfg.seed                        = o.seed;
    cfg.out_dir                     = o.out;
    cfg.skip_vote                   = o.skip_vote;
    cfg.emit_geojson                = o.emit_geojson;
    cfg.harmonize.msw_indicator     = o.msw_indicator;
    for (const auto& name : o.territory_columns) {
        auto col = parse_territory_column(name);
        if (!col) {
            usage_error("unknown territory column '" + name + "'");
        }
        cfg.harmonize.territory_columns.push_back(*col);
    }
    cfg.preprocess.missing_threshold = o.missing_threshold;
    cfg.preprocess.corr_threshold    = o.corr_threshold;
    cfg.hopkins.sample_size          = o.hopkins_sample;
    cfg.hopkins.n_repeats            = o.hopkins_repeats;
    cfg.kmeans.k                     = o.k;
    cfg.kmeans.max_iter              = o.max_iter;
    cfg.kmeans.n_starts              = o.n_starts;
    auto init                        = parse_seed_init(o.init);
    if (!init) {
        usage_error("unknown --init '" + o.init + "' (maximin, dsq_weighted)");
    }
    cfg.kmeans.init = *init;
    cfg.vote.k_min  = o.k_min;
    cfg.vote.k_max  = o.k_max;
    if (!o.indices.empty()) {
        cfg.vote.indices.clear();
        for (const auto& name : o.indices) {
            auto idx = parse_validity_index(name);
            if (!idx) {
                usage_error("unknown validity index '" + name + "'");
            }
            cfg.vote.indices.push_back(*idx);
        }
    }
    cfg.bins = {o.bin_inner, o.bin_middle, o.bin_outer};
    return cfg;
}

void add_input_options(CLI::App* cmd, Options& o)
{
    cmd->add_option("--data", o.data_dir, "Directory holding the standard input files");
    cmd->add_option("--territories", o.territories, "territories.csv");
    cmd->add_option("--indicators", o.indicators, "indicators.csv (long form)");
    cmd->add_option("--indicator-defs", o.indicator_defs, "indicator_defs.csv");
    cmd->add_option("--proxies", o.proxies, "proxies.csv");
    cmd->add_option("--national", o.national, "national.csv");
    cmd->add_option("--regions", o.regions, "regions.csv");
    cmd->add_option("--monthly", o.monthly, "monthly.csv (degree days)");
    cmd->add_option("--geometry", o.geometry, "GeoJSON FeatureCollection keyed by territory_id");
    cmd->add_option("--config", o.config, "Flat 'key = value' file; CLI flags override it");
    cmd->add_option("--msw-indicator", o.msw_indicator, "Indicator whose national values are waste masses");
    cmd->add_option("--territory-columns", o.territory_columns, "Territory attributes to append (lat, lon, area, population, density)")
        ->delimiter(',');
}

void add_cluster_options(CLI::App* cmd, Options& o)
{
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--k", o.k, "Number of clusters when --skip-vote is set");
    cmd->add_option("--k-min", o.k_min, "Smallest k considered by the vote");
    cmd->add_option("--k-max", o.k_max, "Largest k considered by the vote");
    cmd->add_flag("--skip-vote", o.skip_vote, "Use --k instead of voting");
    cmd->add_flag("--emit-geojson", o.emit_geojson, "Write map.geojson (needs --geometry)");
    cmd->add_option("--max-iter", o.max_iter, "Lloyd iterations per start");
    cmd->add_option("--n-starts", o.n_starts, "Random restarts");
    cmd->add_option("--init", o.init, "Seeding: dsq_weighted or maximin");
    cmd->add_option("--indices", o.indices, "Validity indices taking part in the vote")->delimiter(',');
    cmd->add_option("--missing-threshold", o.missing_threshold, "Drop columns with a larger missing fraction");
    cmd->add_option("--corr-threshold", o.corr_threshold, "Drop the later column of pairs with a larger |r|");
    cmd->add_option("--hopkins-sample", o.hopkins_sample, "Hopkins sample size (0 = automatic)");
    cmd->add_option("--hopkins-repeats", o.hopkins_repeats, "Hopkins repetitions");
    cmd->add_option("--bin-inner", o.bin_inner, "Level boundary between average and slightly above/below");
    cmd->add_option("--bin-middle", o.bin_middle, "Level boundary between slightly and moderately");
    cmd->add_option("--bin-outer", o.bin_outer, "Level boundary between moderately and very");
}

/// Turns the config file of the chosen subcommand into "--key=value"
/// arguments placed before the real ones, so later CLI flags win.
std::vector<std::string> expand_config(int argc, char** argv, CLI::App& app)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        return args;
    }
    CLI::App* sub = nullptr;
    for (auto* candidate : app.get_subcommands({})) {
        if (candidate->get_name() == args.front()) {
            sub = candidate;
        }
    }
    if (!sub) {
        return args;
    }

    std::string configPath;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            configPath = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            configPath = args[i].substr(9);
        }
    }
    if (configPath.empty()) {
        return args;
    }

    std::set<std::string> known;
    for (auto* cmd : app.get_subcommands({})) {
        for (const auto* opt : cmd->get_options()) {
            for (const auto& name : opt->get_lnames()) {
                known.insert(name);
            }
        }
    }

    std::vector<std::string> injected;
    for (auto [key, value] : read_config_file(configPath)) {
        std::replace(key.begin(), key.end(), '_', '-');
        if (key == "config") {
            continue;
        }
        const auto* opt = sub->get_option_no_throw("--" + key);
        if (!opt) {
            if (known.count(key)) {
                continue; // belongs to another subcommand
            }
            throw Error(ErrorKind::Ingestion, configPath + ": unknown key '" + key + "'");
        }
        if (opt->get_type_size() == 0) {
            if (value == "true" || value == "1" || value == "yes") {
                injected.push_back("--" + key);
            } else if (value != "false" && value != "0" && value != "no") {
                throw Error(ErrorKind::Ingestion, configPath + ": '" + key + "' expects true or false");
            }
            continue;
        }
        injected.push_back("--" + key + "=" + value);
    }
    args.insert(args.begin() + 1, injected.begin(), injected.end());
    return args;
}

void print_validation(const ValidationReport& report)
{
    for (const auto& v : report.violations) {
        std::cout << to_string(v.kind) << ": " << v.message << "\n";
    }
    std::cout << (report.ok() ? "ok" : std::to_string(report.violations.size()) + " violation(s)") << "\n";
}

int cmd_validate(const Options& o)
{
    RunConfig cfg;
    cfg.inputs        = dataset_paths(o);
    const auto ds     = ingest(cfg);
    const auto report = ds.validate();
    print_validation(report);
    return report.ok() ? 0 : static_cast<int>(Stage::Validation);
}

int cmd_harmonize(const Options& o)
{
    const auto cfg = run_config(o);
    const auto ds  = ingest(cfg);
    std::vector<std::string> log;
    const auto table = harmonize_stage(ds, cfg, &log);
    try {
        fs::create_directories(cfg.out_dir);
        write_text_file(cfg.out_dir / "harmonized.csv", table_to_csv(table));
    } catch (const std::exception& e) {
        throw StageError(Stage::Export, e.what());
    }
    for (const auto& line : log) {
        std::cout << line << "\n";
    }
    std::cout << table.rows() << " territories x " << table.cols() << " indicators -> " << (cfg.out_dir / "harmonized.csv").string() << "\n";
    return 0;
}

int cmd_cluster(const Options& o)
{
    const auto cfg    = run_config(o);
    const auto result = run_pipeline(cfg);
    const auto& rep   = result.report;

    std::cout << "territories      " << rep.n_fine_territories << "\n";
    std::cout << "variables        " << rep.variables.size() << " of " << rep.n_indicators << "\n";
    std::cout << "hopkins          " << format_number(rep.hopkins) << "\n";
    if (rep.vote) {
        std::cout << "votes           ";
        for (const auto& [k, count] : rep.vote->votes) {
            std::cout << " " << k << ":" << count;
        }
        std::cout << "\n";
    }
    std::cout << "k                " << rep.chosen_k << "\n";
    std::cout << "explained        " << format_number(rep.explained_variance) << "\n";
    std::cout << "converged        " << (rep.converged ? "yes" : "no") << " (" << rep.iterations << " iterations)\n";
    std::cout << "sizes           ";
    for (auto s : rep.sizes) {
        std::cout << " " << s;
    }
    std::cout << "\n";
    for (const auto& t : rep.timings) {
        std::fprintf(stderr, "%-14s %9.1f ms\n", t.stage.c_str(), t.milliseconds);
    }
    return 0;
}

int cmd_fixture(const Options& o)
{
    FixtureConfig fc   = o.fixture;
    fc.emit_geometry   = !o.no_geometry;
    Fixture fx;
    try {
        fx = generate_fixture(fc);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Domain) {
            usage_error(e.what());
        }
        throw;
    }
    try {
        write_fixture(o.out, fx);
    } catch (const std::exception& e) {
        throw StageError(Stage::Export, e.what());
    }
    std::cout << fx.dataset.territories.size() << " territories, " << fc.n_blobs << " blobs -> " << o.out << "\n";
    return 0;
}

int cmd_report(const Options& o)
{
    const fs::path dir = o.out;
    nlohmann::json report;
    CsvTable regions;
    try {
        report = nlohmann::json::parse(read_text_file(dir / "report.json"));
        if (fs::exists(dir / "region_reports.csv")) {
            regions = read_csv(dir / "region_reports.csv");
        }
    } catch (const nlohmann::json::exception& e) {
        throw StageError(Stage::Ingestion, "report.json: " + std::string(e.what()));
    } catch (const std::exception& e) {
        throw StageError(Stage::Ingestion, e.what());
    }

    const auto& c = report.at("clustering");
    const auto& p = report.at("preprocessing");
    std::cout << "clusters: " << c.at("k") << ", explained variance " << c.at("explained_variance") << ", hopkins "
              << report.at("tendency").at("hopkins") << "\n";
    std::cout << "sizes: " << c.at("sizes").dump() << "\n";
    for (const auto& d : p.at("dropped_missing")) {
        std::cout << "dropped (missing): " << d.at("indicator").get<std::string>() << " " << d.at("fraction") << "\n";
    }
    for (const auto& d : p.at("pruned_correlated")) {
        std::cout << "dropped (correlated): " << d.at("dropped").get<std::string>() << " with " << d.at("kept").get<std::string>() << " r="
                  << d.at("r") << "\n";
    }
    std::cout << "variables: " << p.at("variables").size() << "\n";

    if (!regions.rows.empty()) {
        const auto ri = regions.column("region", "region_reports.csv");
        const auto ni = regions.column("n_members", "region_reports.csv");
        const auto ci = regions.column("n_clusters_present", "region_reports.csv");
        const auto fi = regions.column("cluster_frequencies", "region_reports.csv");
        std::string last;
        for (const auto& row : regions.rows) {
            if (row[ri] == last) {
                continue;
            }
            last = row[ri];
            std::cout << "region " << row[ri] << ": " << row[ni] << " territories in " << row[ci] << " clusters (" << row[fi] << ")\n";
        }
    }
    return 0;
}

}

int main(int argc, char** argv)
{
    CLI::App app {"Territorial clustering by renewable-energy potential and socioeconomic structure"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Options o;

    auto* validate = app.add_subcommand("validate", "Check input files for structural problems");
    add_input_options(validate, o);

    auto* harmonize = app.add_subcommand("harmonize", "Bring every indicator to the finest territorial level");
    add_input_options(harmonize, o);
    harmonize->add_option("--out", o.out, "Output directory");

    auto* cluster = app.add_subcommand("cluster", "Run the full pipeline");
    add_input_options(cluster, o);
    add_cluster_options(cluster, o);
    cluster->add_option("--out", o.out, "Output directory");

    auto* fixture = app.add_subcommand("fixture", "Write a synthetic dataset with planted clusters");
    fixture->add_option("--out", o.out, "Output directory");
    fixture->add_option("--seed", o.fixture.seed, "Generator seed");
    fixture->add_option("--n-territories", o.fixture.n_territories, "Number of finest-level territories");
    fixture->add_option("--n-blobs", o.fixture.n_blobs, "Planted clusters");
    fixture->add_option("--d-energy", o.fixture.d_energy, "Energy indicators");
    fixture->add_option("--d-socio", o.fixture.d_socio, "Socioeconomic indicators");
    fixture->add_option("--separation", o.fixture.separation, "Minimum blob centre distance in blob sd");
    fixture->add_option("--sparse-fraction", o.fixture.sparse_column_fraction, "Missing fraction of an extra noise column");
    fixture->add_flag("--correlated-column", o.fixture.correlated_column, "Add a column collinear with another");
    fixture->add_flag("--no-geometry", o.no_geometry, "Skip geometry.geojson");
    fixture->add_option("--config", o.config, "Flat 'key = value' file; CLI flags override it");

    auto* report = app.add_subcommand("report", "Summarize a finished run");
    report->add_option("--out,dir", o.out, "Run output directory");

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv, app);
    } catch (const std::exception& e) {
        std::cerr << "[ingestion] " << e.what() << "\n";
        return static_cast<int>(Stage::Ingestion);
    }

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*validate) {
            return cmd_validate(o);
        }
        if (*harmonize) {
            return cmd_harmonize(o);
        }
        if (*cluster) {
            return cmd_cluster(o);
        }
        if (*fixture) {
            return cmd_fixture(o);
        }
        if (*report) {
            return cmd_report(o);
        }
    } catch (const StageError& e) {
        std::cerr << e.what() << "\n";
        return e.exit_code();
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
