#pragma once

#include "regio/kmeans.hpp"
#include "regio/matrix.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace regio {

struct HopkinsConfig
{
    /// Number of sampled points m; 0 selects max(10, floor(0.1 n)) capped at n-1.
    std::size_t sample_size = 0;
    uint64_t seed           = 42;
    int n_repeats           = 10;
};

std::size_t default_hopkins_sample(std::size_t n) noexcept;

/// Hopkins statistic oriented so that values near 0 indicate clustered data
/// and values near 0.5 indicate spatial randomness:
///   H = sum(w) / (sum(u) + sum(w))
/// with w the nearest-neighbour distances of m sampled data points to the rest
/// of the data and u those of m uniform points drawn in the bounding box.
/// Averaged over n_repeats independent draws.
double hopkins(const RowMatrix& data, const HopkinsConfig& cfg);

enum class ValidityIndex {
    CalinskiHarabasz,
    DaviesBouldin,
    Silhouette,
    Dunn,
    Hartigan,
};

enum class Preference {
    Maximize,
    Minimize,
    Elbow, // largest jump between consecutive k
};

inline constexpr ValidityIndex all_validity_indices[] = {
    ValidityIndex::CalinskiHarabasz,
    ValidityIndex::DaviesBouldin,
    ValidityIndex::Silhouette,
    ValidityIndex::Dunn,
    ValidityIndex::Hartigan,
};

std::string_view to_string(ValidityIndex index) noexcept;
std::optional<ValidityIndex> parse_validity_index(std::string_view text) noexcept;
Preference preference(ValidityIndex index) noexcept;

double calinski_harabasz(const RowMatrix& data, const ClusterModel& model);
double davies_bouldin(const RowMatrix& data, const ClusterModel& model);
double silhouette(const RowMatrix& data, const ClusterModel& model);
double dunn(const RowMatrix& data, const ClusterModel& model);
/// (W_k / W_{k+1} - 1)(n - k - 1), from the fits at k and k+1.
double hartigan(const ClusterModel& model, const ClusterModel& next);

/// Index value for a fitted model. Throws IndexUndefined where the index has
/// no value (e.g. k < 2); Hartigan needs the k+1 fit and always throws here.
double validity_index(const RowMatrix& data, const ClusterModel& model, ValidityIndex kind);

struct KVoteConfig
{
    int k_min = 15;
    int k_max = 20;
    std::vector<ValidityIndex> indices {std::begin(all_validity_indices), std::end(all_validity_indices)};
    uint64_t seed = 42;
    /// Iteration/restart/seeding settings for each fit; k and seed are set per k.
    KMeansConfig kmeans;

    void validate(std::size_t n) const;
};

struct KVoteResult
{
    int k_best = 0;
    std::map<int, int> votes;
    std::map<ValidityIndex, int> per_index;
    /// Index values per k; undefined values are absent.
    std::map<int, std::map<ValidityIndex, double>> scores;
};

/// Fits k-means for each k in [k_min, k_max] (plus neighbours needed by the
/// elbow rule), lets each index vote for its preferred k and returns the mode,
/// ties resolved to the smallest k.
KVoteResult vote_k(const RowMatrix& data, const KVoteConfig& cfg);

/// Coordinates on the two leading principal directions of the column
/// covariance. Each direction's largest-magnitude loading is made positive.
RowMatrix project_2d(const RowMatrix& data);

}
