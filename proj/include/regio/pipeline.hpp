#pragma once

#include "regio/harmonize.hpp"
#include "regio/io.hpp"
#include "regio/kmeans.hpp"
#include "regio/preprocess.hpp"
#include "regio/profile.hpp"
#include "regio/tendency.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace regio {

struct RunConfig
{
    DatasetPaths inputs;
    HarmonizeOptions harmonize;
    PreprocessConfig preprocess;
    HopkinsConfig hopkins;
    KVoteConfig vote;
    KMeansConfig kmeans;
    BinThresholds bins;
    /// Master seed; Hopkins, voting and the final fit get derived sub-seeds.
    uint64_t seed = 42;
    fs::path out_dir;
    bool skip_vote    = false;
    bool emit_geojson = false;
};

struct StageTiming
{
    std::string stage;
    double milliseconds = 0.0;
};

struct RunReport
{
    RunConfig config;
    std::size_t n_territories      = 0;
    std::size_t n_fine_territories = 0;
    std::size_t n_indicators       = 0;
    std::vector<std::string> harmonize_log;
    std::vector<DroppedColumn> dropped;
    std::vector<ImputedCell> imputed;
    std::vector<std::string> zero_variance;
    std::vector<CorrelatedPair> pruned;
    std::vector<std::string> variables;
    double hopkins              = 0.0;
    std::size_t hopkins_sample  = 0;
    std::optional<KVoteResult> vote;
    int chosen_k                = 0;
    double explained_variance   = 0.0;
    double within_ss            = 0.0;
    double between_ss           = 0.0;
    double total_ss             = 0.0;
    std::vector<std::size_t> sizes;
    int iterations              = 0;
    bool converged              = false;
    /// Wall-clock stage timings; kept out of report.json so runs stay byte-identical.
    std::vector<StageTiming> timings;

    nlohmann::ordered_json to_json() const;
};

struct PipelineResult
{
    RunReport report;
    IndicatorTable harmonized;
    StandardizedMatrix standardized;
    RowMatrix projection;
    ClusterModel model;
    std::vector<QualitativeProfile> profiles;
    Heatmap heatmap;
    std::vector<RegionReport> regions;
};

/// Loads the inputs named in cfg.inputs; failures raise StageError(Ingestion).
Dataset ingest(const RunConfig& cfg);

/// Validation then harmonization. Failures raise StageError.
IndicatorTable harmonize_stage(const Dataset& dataset, const RunConfig& cfg, std::vector<std::string>* log = nullptr);

/// Full pipeline on an in-memory dataset. Writes the output files when
/// cfg.out_dir is set. Every failure surfaces as a StageError.
PipelineResult run_pipeline(const Dataset& dataset, const RunConfig& cfg);

/// Ingest + run_pipeline.
PipelineResult run_pipeline(const RunConfig& cfg);

/// Writes every artifact of a run into `dir`.
void write_outputs(const fs::path& dir, const PipelineResult& result, const Dataset& dataset, const RunConfig& cfg);

/// Value rounded to 12 significant digits, so JSON output stays stable.
double round12(double value);

}
