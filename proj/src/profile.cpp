#include "regio/profile.hpp"
#include "regio/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace regio {

std::string_view to_string(QualLevel level) noexcept
{
    switch (level) {
    case QualLevel::VeryLow: return "very_low";
    case QualLevel::Low: return "low";
    case QualLevel::MediumLow: return "medium_low";
    case QualLevel::Medium: return "medium";
    case QualLevel::MediumHigh: return "medium_high";
    case QualLevel::High: return "high";
    case QualLevel::VeryHigh: return "very_high";
    }
    return "";
}

std::optional<QualLevel> parse_qual_level(std::string_view text) noexcept
{
    for (int i = 0; i <= static_cast<int>(QualLevel::VeryHigh); ++i) {
        const auto level = static_cast<QualLevel>(i);
        if (to_string(level) == text) {
            return level;
        }
    }
    return std::nullopt;
}

void BinThresholds::validate() const
{
    if (!(0.0 < inner && inner < middle && middle < outer) || !std::isfinite(outer)) {
        throw Error(ErrorKind::Domain, "bin thresholds must satisfy 0 < inner < middle < outer");
    }
}

QualLevel qualitative_level(double value, const BinThresholds& t)
{
    if (std::isnan(value)) {
        throw Error(ErrorKind::Domain, "cannot bin NaN");
    }
    t.validate();
    const double m = std::abs(value);
    int band       = 0;
    if (m >= t.outer) {
        band = 3;
    } else if (m >= t.middle) {
        band = 2;
    } else if (m >= t.inner) {
        band = 1;
    }
    return static_cast<QualLevel>(3 + (value < 0 ? -band : band));
}

std::vector<QualitativeProfile> bin_centroids(const ClusterModel& model, std::span<const std::string> indicators, const BinThresholds& thresholds)
{
    thresholds.validate();
    if (model.k < 1 || model.centroids.rows() != model.k) {
        throw Error(ErrorKind::Domain, "model is not fitted");
    }
    if (static_cast<Eigen::Index>(indicators.size()) != model.centroids.cols()) {
        throw Error(ErrorKind::Domain, "indicator list does not match the centroid dimension");
    }

    std::vector<QualitativeProfile> out;
    out.reserve(static_cast<std::size_t>(model.k));
    for (int c = 0; c < model.k; ++c) {
        QualitativeProfile p;
        p.cluster_id = c;
        for (std::size_t j = 0; j < indicators.size(); ++j) {
            p.levels.emplace(indicators[j], qualitative_level(model.centroids(c, static_cast<Eigen::Index>(j)), thresholds));
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<int> CentroidTree::leaf_order() const
{
    if (leaves == 1) {
        return {0};
    }
    std::vector<int> order;
    std::vector<int> stack {leaves + static_cast<int>(merges.size()) - 1};
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        if (node < leaves) {
            order.push_back(node);
            continue;
        }
        const auto& m = merges[static_cast<std::size_t>(node - leaves)];
        stack.push_back(m.right);
        stack.push_back(m.left);
    }
    return order;
}

CentroidTree complete_linkage(const RowMatrix& points)
{
    const auto k = static_cast<int>(points.rows());
    if (k < 1) {
        throw Error(ErrorKind::Domain, "no points to cluster");
    }

    CentroidTree tree;
    tree.leaves = k;

    // Active nodes with their pairwise complete-linkage distances.
    const int maxNodes = 2 * k - 1;
    std::vector<std::vector<double>> dist(static_cast<std::size_t>(maxNodes), std::vector<double>(static_cast<std::size_t>(maxNodes), 0.0));
    std::vector<int> active;
    std::vector<int> sizes(static_cast<std::size_t>(maxNodes), 1);
    for (int i = 0; i < k; ++i) {
        active.push_back(i);
        for (int j = 0; j < i; ++j) {
            const double d = (points.row(i) - points.row(j)).norm();
            dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
            dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = d;
        }
    }

    for (int next = k; next < maxNodes; ++next) {
        // `active` stays sorted, so the scan order is lexicographic in (a, b).
        int bestA = -1;
        int bestB = -1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < active.size(); ++x) {
            for (std::size_t y = x + 1; y < active.size(); ++y) {
                const double d = dist[static_cast<std::size_t>(active[x])][static_cast<std::size_t>(active[y])];
                if (d < best) {
                    best  = d;
                    bestA = active[x];
                    bestB = active[y];
                }
            }
        }

        sizes[static_cast<std::size_t>(next)] = sizes[static_cast<std::size_t>(bestA)] + sizes[static_cast<std::size_t>(bestB)];
        tree.merges.push_back({bestA, bestB, best, sizes[static_cast<std::size_t>(next)]});

        std::erase(active, bestA);
        std::erase(active, bestB);
        for (int other : active) {
            const double d = std::max(dist[static_cast<std::size_t>(bestA)][static_cast<std::size_t>(other)],
                                      dist[static_cast<std::size_t>(bestB)][static_cast<std::size_t>(other)]);
            dist[static_cast<std::size_t>(next)][static_cast<std::size_t>(other)] = d;
            dist[static_cast<std::size_t>(other)][static_cast<std::size_t>(next)] = d;
        }
        active.push_back(next);
    }
    return tree;
}

CentroidTree centroid_dendrogram(const ClusterModel& model)
{
    if (model.k < 2 || model.centroids.rows() != model.k) {
        throw Error(ErrorKind::Domain, "a dendrogram needs a fitted model with k >= 2");
    }
    return complete_linkage(model.centroids);
}

Heatmap heatmap_matrix(const ClusterModel& model)
{
    if (model.k < 1 || model.centroids.rows() != model.k) {
        throw Error(ErrorKind::Domain, "model is not fitted");
    }

    Heatmap h;
    h.values = model.centroids;
    if (model.k >= 2) {
        h.tree      = centroid_dendrogram(model);
        h.row_order = h.tree.leaf_order();
    } else {
        h.tree.leaves = 1;
        h.row_order   = {0};
    }

    if (model.centroids.cols() >= 2) {
        const RowMatrix columns = model.centroids.transpose();
        h.col_order             = complete_linkage(columns).leaf_order();
    } else {
        for (Eigen::Index j = 0; j < model.centroids.cols(); ++j) {
            h.col_order.push_back(static_cast<int>(j));
        }
    }
    return h;
}

RegionReport macro_region_report(const std::map<std::string, int>& assignment,
                                 std::span<const QualitativeProfile> profiles,
                                 const RegionSet& region)
{
    RegionReport report;
    report.region = region.name;

    for (const auto& member : region.members) {
        auto it = assignment.find(member);
        if (it == assignment.end()) {
            throw Error(ErrorKind::Report, "territory '" + member + "' of region '" + region.name + "' has no cluster assignment");
        }
        ++report.cluster_frequencies[it->second];
    }
    report.n_clusters_present = report.cluster_frequencies.size();

    for (const auto& [cluster, count] : report.cluster_frequencies) {
        auto p = std::find_if(profiles.begin(), profiles.end(), [c = cluster](const QualitativeProfile& qp) { return qp.cluster_id == c; });
        if (p == profiles.end()) {
            throw Error(ErrorKind::Report, "no profile for cluster " + std::to_string(cluster));
        }
        for (const auto& [indicator, level] : p->levels) {
            auto [slot, inserted] = report.indicator_spread.try_emplace(indicator, LevelSpread {level, level});
            if (!inserted) {
                slot->second.min = std::min(slot->second.min, level);
                slot->second.max = std::max(slot->second.max, level);
            }
        }
    }
    return report;
}

}
