#pragma once

#include "regio/matrix.hpp"
#include "regio/preprocess.hpp"
#include "regio/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace regio {

double euclidean_distance(std::span<const double> x, std::span<const double> y);

enum class SeedInit {
    Maximin,     // farthest point from the seeds chosen so far
    DsqWeighted, // sampled proportionally to squared distance (k-means++)
};

std::string_view to_string(SeedInit init) noexcept;
std::optional<SeedInit> parse_seed_init(std::string_view text) noexcept;

struct KMeansConfig
{
    int k            = 17;
    int max_iter     = 50;
    int n_starts     = 10;
    uint64_t seed    = 42;
    SeedInit init    = SeedInit::DsqWeighted;
    /// Candidates drawn per k-means++ step, keeping the one that lowers the
    /// potential most; 0 = 2 + floor(ln k), 1 = plain k-means++.
    int seeding_trials = 0;

    /// Throws Domain unless 1 <= k <= n, max_iter >= 1 and n_starts >= 1.
    void validate(std::size_t n) const;
};

struct ClusterModel
{
    int k = 0;
    RowMatrix centroids;
    std::vector<int> assignment;
    std::vector<std::size_t> sizes;
    double within_ss     = 0.0;
    double between_ss    = 0.0;
    double total_ss      = 0.0;
    double between_ratio = 0.0;
    int iterations_run   = 0;
    bool converged       = false;
};

/// Builds a model from a fixed partition: centroids are the cluster means.
/// Cluster ids must lie in [0,k) and every cluster must be non-empty.
ClusterModel summarize_partition(const RowMatrix& data, std::span<const int> assignment, int k);

/// Maximin seeding starting from a given row; ties go to the lowest row index.
std::vector<std::size_t> maximin_seeds(const RowMatrix& data, int k, std::size_t first);

/// Row indices of k distinct seed points. Throws Seeding when the data has
/// fewer than k distinct rows. `trials` only affects DsqWeighted.
std::vector<std::size_t> seed_centroids(const RowMatrix& data, int k, SeedInit init, Rng& rng, int trials = 0);

struct StartResult
{
    ClusterModel model;
    /// Within-cluster sum of squares after every centroid update.
    std::vector<double> within_trace;
};

/// One Lloyd run from the seeds of start `start_index`.
StartResult kmeans_start(const RowMatrix& data, const KMeansConfig& cfg, int start_index);

/// Best (lowest within_ss, then lowest start index) of cfg.n_starts runs.
ClusterModel kmeans_fit(const RowMatrix& data, const KMeansConfig& cfg);

inline ClusterModel kmeans_fit(const StandardizedMatrix& matrix, const KMeansConfig& cfg)
{
    return kmeans_fit(matrix.data, cfg);
}

/// between_ss / total_ss. Throws DegenerateData when total_ss is zero.
double explained_variance(const ClusterModel& model);

}
