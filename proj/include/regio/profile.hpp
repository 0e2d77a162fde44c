#pragma once

#include "regio/kmeans.hpp"
#include "regio/matrix.hpp"
#include "regio/model.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace regio {

enum class QualLevel {
    VeryLow,
    Low,
    MediumLow,
    Medium,
    MediumHigh,
    High,
    VeryHigh,
};

std::string_view to_string(QualLevel level) noexcept;
std::optional<QualLevel> parse_qual_level(std::string_view text) noexcept;

/// Symmetric cut points on the standardized scale. The band is set by |v|
/// with half-open intervals [inner, middle), [middle, outer), [outer, inf),
/// so -0.75 is Low and 0.75 is High.
struct BinThresholds
{
    double inner  = 0.25;
    double middle = 0.75;
    double outer  = 1.5;

    void validate() const;
};

QualLevel qualitative_level(double value, const BinThresholds& thresholds = {});

struct QualitativeProfile
{
    int cluster_id = 0;
    std::map<std::string, QualLevel> levels;
};

std::vector<QualitativeProfile> bin_centroids(const ClusterModel& model,
                                              std::span<const std::string> indicators,
                                              const BinThresholds& thresholds = {});

struct Merge
{
    int left   = 0; // node ids: leaves 0..k-1, merge i creates node k+i
    int right  = 0;
    double height = 0.0;
    int size   = 0;
};

struct CentroidTree
{
    int leaves = 0;
    std::vector<Merge> merges;

    /// Leaves in left-to-right drawing order.
    std::vector<int> leaf_order() const;
};

/// Complete-linkage agglomeration of the rows of `points` (Euclidean).
/// Ties go to the lexicographically smallest (node id, node id) pair.
CentroidTree complete_linkage(const RowMatrix& points);

CentroidTree centroid_dendrogram(const ClusterModel& model);

struct Heatmap
{
    RowMatrix values; // k x d, cluster order
    std::vector<int> row_order;
    std::vector<int> col_order;
    CentroidTree tree;
};

/// Centroid matrix with rows ordered by the centroid dendrogram and columns by
/// a complete-linkage tree over the indicator profiles.
Heatmap heatmap_matrix(const ClusterModel& model);

struct LevelSpread
{
    QualLevel min = QualLevel::Medium;
    QualLevel max = QualLevel::Medium;
};

struct RegionReport
{
    std::string region;
    std::size_t n_clusters_present = 0;
    std::map<int, std::size_t> cluster_frequencies;
    std::map<std::string, LevelSpread> indicator_spread;
};

RegionReport macro_region_report(const std::map<std::string, int>& assignment,
                                 std::span<const QualitativeProfile> profiles,
                                 const RegionSet& region);

}
