#include "regio/pipeline.hpp"
#include "regio/error.hpp"
#include "regio/format.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>

namespace regio {

using ojson = nlohmann::ordered_json;

namespace {

template <typename Fn>
auto run_stage(Stage stage, std::vector<StageTiming>* timings, Fn&& fn) -> decltype(fn())
{
    const auto start = std::chrono::steady_clock::now();
    auto record      = [&] {
        if (timings) {
            const auto end = std::chrono::steady_clock::now();
            timings->push_back({std::string(to_string(stage)), std::chrono::duration<double, std::milli>(end - start).count()});
        }
    };
    try {
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record();
        } else {
            auto result = fn();
            record();
            return result;
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

ojson number(double v)
{
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return round12(v);
}

std::string validation_summary(const ValidationReport& report)
{
    std::string msg = std::to_string(report.violations.size()) + " violation(s):";
    std::size_t shown = 0;
    for (const auto& v : report.violations) {
        if (shown++ == 5) {
            msg += " ...";
            break;
        }
        msg += " [" + std::string(to_string(v.kind)) + "] " + v.message + ";";
    }
    return msg;
}

}

double round12(double value)
{
    if (!std::isfinite(value)) {
        return value;
    }
    const auto text = format_number(value);
    double out      = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), out);
    return out;
}

ojson RunReport::to_json() const
{
    const auto& c = config;
    ojson indices = ojson::array();
    for (auto idx : c.vote.indices) {
        indices.push_back(std::string(to_string(idx)));
    }
    ojson territoryColumns = ojson::array();
    for (auto col : c.harmonize.territory_columns) {
        territoryColumns.push_back(std::string(to_string(col)));
    }

    ojson j;
    j["config"] = {
        {"seed", c.seed},
        {"k", c.kmeans.k},
        {"max_iter", c.kmeans.max_iter},
        {"n_starts", c.kmeans.n_starts},
        {"init", std::string(to_string(c.kmeans.init))},
        {"skip_vote", c.skip_vote},
        {"k_min", c.vote.k_min},
        {"k_max", c.vote.k_max},
        {"indices", indices},
        {"missing_threshold", number(c.preprocess.missing_threshold)},
        {"missing_rule", "drop when missing fraction > threshold, else impute column mean"},
        {"corr_threshold", number(c.preprocess.corr_threshold)},
        {"corr_rule", "drop later column when |r| > threshold"},
        {"hopkins_sample", c.hopkins.sample_size},
        {"hopkins_repeats", c.hopkins.n_repeats},
        {"hopkins_orientation", "near 0 = clusterable, 0.5 = random"},
        {"assignment_ties", "lowest cluster id"},
        {"empty_cluster_repair", "farthest point from its centroid"},
        {"bins", {{"inner", number(c.bins.inner)}, {"middle", number(c.bins.middle)}, {"outer", number(c.bins.outer)}}},
        {"msw_indicator", c.harmonize.msw_indicator},
        {"lower_heating_value", number(c.harmonize.msw.lower_heating_value)},
        {"equivalence_ratio", number(c.harmonize.msw.equivalence_ratio)},
        {"territory_columns", territoryColumns},
        {"dendrogram_linkage", "complete"},
    };
    j["input"] = {{"territories", n_territories}, {"fine_territories", n_fine_territories}, {"indicators", n_indicators}};
    j["harmonization"] = harmonize_log;

    ojson dropped = ojson::array();
    for (const auto& dc : this->dropped) {
        dropped.push_back({{"indicator", dc.indicator}, {"missing", dc.missing}, {"fraction", number(dc.fraction)}});
    }
    ojson imputed = ojson::array();
    for (const auto& ic : this->imputed) {
        imputed.push_back({{"territory", ic.territory}, {"indicator", ic.indicator}, {"value", number(ic.value)}});
    }
    ojson pruned = ojson::array();
    for (const auto& p : this->pruned) {
        pruned.push_back({{"kept", p.kept}, {"dropped", p.dropped}, {"r", number(p.r)}});
    }
    j["preprocessing"] = {
        {"dropped_missing", dropped},
        {"imputed", imputed},
        {"zero_variance", zero_variance},
        {"pruned_correlated", pruned},
        {"variables", variables},
    };

    ojson tendency = {{"hopkins", number(hopkins)}, {"hopkins_sample", hopkins_sample}};
    if (vote) {
        ojson votes = ojson::object();
        for (const auto& [k, count] : vote->votes) {
            votes[std::to_string(k)] = count;
        }
        ojson perIndex = ojson::object();
        for (const auto& [idx, k] : vote->per_index) {
            perIndex[std::string(to_string(idx))] = k;
        }
        ojson scores = ojson::object();
        for (const auto& [k, row] : vote->scores) {
            ojson r = ojson::object();
            for (const auto& [idx, v] : row) {
                r[std::string(to_string(idx))] = number(v);
            }
            scores[std::to_string(k)] = r;
        }
        tendency["vote"] = {{"k_best", vote->k_best}, {"votes", votes}, {"per_index", perIndex}, {"scores", scores}};
    } else {
        tendency["vote"] = nullptr;
    }
    j["tendency"] = tendency;

    j["clustering"] = {
        {"k", chosen_k},
        {"explained_variance", number(explained_variance)},
        {"within_ss", number(within_ss)},
        {"between_ss", number(between_ss)},
        {"total_ss", number(total_ss)},
        {"sizes", sizes},
        {"iterations", iterations},
        {"converged", converged},
    };
    return j;
}

Dataset ingest(const RunConfig& cfg)
{
    return run_stage(Stage::Ingestion, nullptr, [&] { return load_dataset(cfg.inputs); });
}

IndicatorTable harmonize_stage(const Dataset& dataset, const RunConfig& cfg, std::vector<std::string>* log)
{
    run_stage(Stage::Validation, nullptr, [&] {
        const auto report = dataset.validate();
        if (!report.ok()) {
            throw Error(ErrorKind::Validation, validation_summary(report));
        }
    });
    return run_stage(Stage::Harmonization, nullptr, [&] {
        auto result = harmonize(dataset.harmonize_input(), cfg.harmonize);
        if (log) {
            *log = std::move(result.log);
        }
        return std::move(result.table);
    });
}

PipelineResult run_pipeline(const Dataset& dataset, const RunConfig& cfg)
{
    PipelineResult out;
    auto& rep    = out.report;
    rep.config   = cfg;
    auto* timing = &rep.timings;

    rep.n_territories = dataset.territories.size();
    run_stage(Stage::Validation, timing, [&] {
        const auto report = dataset.validate();
        if (!report.ok()) {
            throw Error(ErrorKind::Validation, validation_summary(report));
        }
    });

    out.harmonized = run_stage(Stage::Harmonization, timing, [&] {
        auto result       = harmonize(dataset.harmonize_input(), cfg.harmonize);
        rep.harmonize_log = std::move(result.log);
        return std::move(result.table);
    });
    rep.n_fine_territories = out.harmonized.rows();
    rep.n_indicators       = out.harmonized.cols();

    out.standardized = run_stage(Stage::Preprocessing, timing, [&] {
        auto missing      = apply_missing_policy(out.harmonized, cfg.preprocess);
        rep.dropped       = std::move(missing.dropped);
        rep.imputed       = std::move(missing.imputed);
        auto pruned       = prune_correlated(missing.table, cfg.preprocess);
        rep.pruned        = std::move(pruned.dropped);
        rep.zero_variance = std::move(pruned.zero_variance);
        if (pruned.table.cols() == 0) {
            throw Error(ErrorKind::Preprocessing, "no variables left after the missing-value and correlation rules");
        }
        auto z        = standardize(pruned.table);
        rep.variables = z.cols;
        return z;
    });
    const auto& data = out.standardized.data;

    run_stage(Stage::Tendency, timing, [&] {
        HopkinsConfig hc   = cfg.hopkins;
        hc.seed            = derive_seed(cfg.seed, 1);
        rep.hopkins_sample = hc.sample_size == 0 ? default_hopkins_sample(static_cast<std::size_t>(data.rows())) : hc.sample_size;
        rep.hopkins        = hopkins(data, hc);

        if (data.cols() >= 2) {
            out.projection = project_2d(data);
        }

        if (cfg.skip_vote) {
            rep.chosen_k = cfg.kmeans.k;
        } else {
            KVoteConfig vc = cfg.vote;
            vc.seed        = derive_seed(cfg.seed, 2);
            vc.kmeans      = cfg.kmeans;
            rep.vote       = vote_k(data, vc);
            rep.chosen_k   = rep.vote->k_best;
        }
    });

    out.model = run_stage(Stage::Clustering, timing, [&] {
        KMeansConfig kc = cfg.kmeans;
        kc.k            = rep.chosen_k;
        kc.seed         = derive_seed(cfg.seed, 3);
        return kmeans_fit(data, kc);
    });
    rep.within_ss          = out.model.within_ss;
    rep.between_ss         = out.model.between_ss;
    rep.total_ss           = out.model.total_ss;
    rep.explained_variance = out.model.between_ratio;
    rep.sizes              = out.model.sizes;
    rep.iterations         = out.model.iterations_run;
    rep.converged          = out.model.converged;

    run_stage(Stage::Profile, timing, [&] {
        out.profiles = bin_centroids(out.model, out.standardized.cols, cfg.bins);
        out.heatmap  = heatmap_matrix(out.model);
        std::map<std::string, int> assignment;
        for (std::size_t i = 0; i < out.standardized.rows.size(); ++i) {
            assignment[out.standardized.rows[i].code] = out.model.assignment[i];
        }
        for (const auto& region : dataset.regions) {
            out.regions.push_back(macro_region_report(assignment, out.profiles, region));
        }
    });

    if (!cfg.out_dir.empty()) {
        run_stage(Stage::Export, timing, [&] { write_outputs(cfg.out_dir, out, dataset, cfg); });
    }
    return out;
}

PipelineResult run_pipeline(const RunConfig& cfg)
{
    const auto dataset = ingest(cfg);
    return run_pipeline(dataset, cfg);
}

void write_outputs(const fs::path& dir, const PipelineResult& r, const Dataset& dataset, const RunConfig& cfg)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorKind::Export, "cannot create '" + dir.string() + "': " + ec.message());
    }

    const auto& z     = r.standardized;
    const auto& model = r.model;
    const auto& cols  = z.cols;

    write_text_file(dir / "harmonized.csv", table_to_csv(r.harmonized));

    std::string text;
    {
        std::vector<std::string> header {"territory_id"};
        header.insert(header.end(), cols.begin(), cols.end());
        text = csv_line(header);
        for (Eigen::Index i = 0; i < z.data.rows(); ++i) {
            std::vector<std::string> f {z.rows[static_cast<std::size_t>(i)].code};
            for (Eigen::Index j = 0; j < z.data.cols(); ++j) {
                f.push_back(format_number(z.data(i, j)));
            }
            text += csv_line(f);
        }
        write_text_file(dir / "standardized.csv", text);
    }

    text = csv_line({"territory_id", "cluster"});
    for (std::size_t i = 0; i < z.rows.size(); ++i) {
        text += csv_line({z.rows[i].code, std::to_string(model.assignment[i])});
    }
    write_text_file(dir / "assignments.csv", text);

    {
        std::vector<std::string> header {"cluster", "size"};
        header.insert(header.end(), cols.begin(), cols.end());
        text = csv_line(header);
        for (int c = 0; c < model.k; ++c) {
            std::vector<std::string> f {std::to_string(c), std::to_string(model.sizes[static_cast<std::size_t>(c)])};
            for (Eigen::Index j = 0; j < model.centroids.cols(); ++j) {
                f.push_back(format_number(model.centroids(c, j)));
            }
            text += csv_line(f);
        }
        write_text_file(dir / "centroids.csv", text);
    }

    {
        std::vector<std::string> header {"cluster"};
        header.insert(header.end(), cols.begin(), cols.end());
        text = csv_line(header);
        for (const auto& p : r.profiles) {
            std::vector<std::string> f {std::to_string(p.cluster_id)};
            for (const auto& col : cols) {
                f.emplace_back(to_string(p.levels.at(col)));
            }
            text += csv_line(f);
        }
        write_text_file(dir / "profiles.csv", text);
    }

    {
        const auto& h = r.heatmap;
        std::vector<std::string> header {"cluster"};
        for (int j : h.col_order) {
            header.push_back(cols[static_cast<std::size_t>(j)]);
        }
        text = csv_line(header);
        for (int c : h.row_order) {
            std::vector<std::string> f {std::to_string(c)};
            for (int j : h.col_order) {
                f.push_back(format_number(h.values(c, j)));
            }
            text += csv_line(f);
        }
        write_text_file(dir / "heatmap.csv", text);

        ojson merges = ojson::array();
        for (const auto& m : h.tree.merges) {
            merges.push_back({{"left", m.left}, {"right", m.right}, {"height", number(m.height)}, {"size", m.size}});
        }
        ojson colNames = ojson::array();
        for (int j : h.col_order) {
            colNames.push_back(cols[static_cast<std::size_t>(j)]);
        }
        ojson tree = {{"leaves", h.tree.leaves}, {"linkage", "complete"}, {"merges", merges}, {"leaf_order", h.row_order}, {"column_order", colNames}};
        write_text_file(dir / "dendrogram.json", tree.dump(2) + "\n");
    }

    text = csv_line({"region", "n_members", "n_clusters_present", "cluster_frequencies", "indicator", "min_level", "max_level"});
    for (std::size_t ri = 0; ri < r.regions.size(); ++ri) {
        const auto& rr = r.regions[ri];
        std::string freq;
        std::size_t members = 0;
        for (const auto& [cluster, count] : rr.cluster_frequencies) {
            if (!freq.empty()) {
                freq += ';';
            }
            freq += std::to_string(cluster) + ":" + std::to_string(count);
            members += count;
        }
        for (const auto& col : cols) {
            const auto& spread = rr.indicator_spread.at(col);
            text += csv_line({rr.region, std::to_string(members), std::to_string(rr.n_clusters_present), freq, col, std::string(to_string(spread.min)),
                              std::string(to_string(spread.max))});
        }
    }
    write_text_file(dir / "region_reports.csv", text);

    if (r.projection.rows() > 0) {
        text = csv_line({"territory_id", "x", "y", "cluster"});
        for (Eigen::Index i = 0; i < r.projection.rows(); ++i) {
            text += csv_line({z.rows[static_cast<std::size_t>(i)].code, format_number(r.projection(i, 0)), format_number(r.projection(i, 1)),
                              std::to_string(model.assignment[static_cast<std::size_t>(i)])});
        }
        write_text_file(dir / "projection.csv", text);
    }

    write_text_file(dir / "report.json", r.report.to_json().dump(2) + "\n");

    if (cfg.emit_geojson && !cfg.inputs.geometry.empty()) {
        ojson doc;
        try {
            doc = ojson::parse(read_text_file(cfg.inputs.geometry));
        } catch (const ojson::exception& e) {
            throw Error(ErrorKind::Export, "geometry: " + std::string(e.what()));
        }
        std::map<std::string, std::size_t> rowOf;
        for (std::size_t i = 0; i < z.rows.size(); ++i) {
            rowOf[z.rows[i].code] = i;
        }
        for (auto& feature : doc.at("features")) {
            auto& props = feature["properties"];
            if (!props.is_object() || !props.contains("territory_id")) {
                continue;
            }
            auto it = rowOf.find(props["territory_id"].get<std::string>());
            if (it == rowOf.end()) {
                props["cluster"]        = nullptr;
                props["cluster_levels"] = nullptr;
                continue;
            }
            const int c             = model.assignment[it->second];
            props["cluster"]        = c;
            ojson levels            = ojson::object();
            for (const auto& col : cols) {
                levels[col] = std::string(to_string(r.profiles[static_cast<std::size_t>(c)].levels.at(col)));
            }
            props["cluster_levels"] = levels;
        }
        write_text_file(dir / "map.geojson", doc.dump() + "\n");
    }
    (void)dataset;
}

}
