#include "regio/error.hpp"
#include "regio/profile.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace regio;

namespace {

ClusterModel centroids_model(const RowMatrix& c)
{
    ClusterModel m;
    m.k         = static_cast<int>(c.rows());
    m.centroids = c;
    m.sizes.assign(static_cast<std::size_t>(m.k), 1);
    return m;
}

}

TEST_CASE("qualitative levels")
{
    CHECK(qualitative_level(0.0) == QualLevel::Medium);
    CHECK(qualitative_level(1.6) == QualLevel::VeryHigh);
    CHECK(qualitative_level(-0.75) == QualLevel::Low);
    CHECK(qualitative_level(-0.7499) == QualLevel::MediumLow);
    CHECK(qualitative_level(-1.5) == QualLevel::VeryLow);
    CHECK(qualitative_level(-1.49) == QualLevel::Low);
    CHECK(qualitative_level(0.25) == QualLevel::MediumHigh);
    CHECK(qualitative_level(-0.25) == QualLevel::MediumLow);
    CHECK(qualitative_level(0.75) == QualLevel::High);
    CHECK(qualitative_level(1.5) == QualLevel::VeryHigh);
    CHECK(qualitative_level(std::numeric_limits<double>::infinity()) == QualLevel::VeryHigh);
    CHECK(qualitative_level(-std::numeric_limits<double>::infinity()) == QualLevel::VeryLow);
    CHECK_THROWS_AS(qualitative_level(std::nan("")), Error);
    CHECK_THROWS_AS(qualitative_level(0.0, {0.8, 0.75, 1.5}), Error);
    for (int l = 0; l < 7; ++l) {
        const auto level = static_cast<QualLevel>(l);
        CHECK(parse_qual_level(to_string(level)) == level);
    }
}

TEST_CASE("binning is monotone and total")
{
    Rng rng(1);
    std::vector<double> values;
    for (int i = 0; i < 100000; ++i) {
        values.push_back(rng.normal(0.0, 1.5));
    }
    std::sort(values.begin(), values.end());
    for (std::size_t i = 1; i < values.size(); ++i) {
        REQUIRE(qualitative_level(values[i - 1]) <= qualitative_level(values[i]));
    }
}

TEST_CASE("bin centroids")
{
    RowMatrix c(2, 2);
    c << 0.0, 1.6, -0.75, 0.3;
    const std::vector<std::string> names {"a", "b"};
    const auto p = bin_centroids(centroids_model(c), names);
    REQUIRE(p.size() == 2);
    CHECK(p[0].cluster_id == 0);
    CHECK(p[0].levels.at("a") == QualLevel::Medium);
    CHECK(p[0].levels.at("b") == QualLevel::VeryHigh);
    CHECK(p[1].levels.at("a") == QualLevel::Low);
    CHECK(p[1].levels.at("b") == QualLevel::MediumHigh);
    const std::vector<std::string> wrong {"a"};
    CHECK_THROWS_AS(bin_centroids(centroids_model(c), wrong), Error);
}

TEST_CASE("dendrogram traces")
{
    SUBCASE("collinear")
    {
        RowMatrix c(3, 1);
        c << 0, 1, 5;
        const auto t = centroid_dendrogram(centroids_model(c));
        REQUIRE(t.merges.size() == 2);
        CHECK(t.merges[0].left == 0);
        CHECK(t.merges[0].right == 1);
        CHECK(t.merges[0].height == 1.0);
        CHECK(t.merges[1].left == 2);
        CHECK(t.merges[1].right == 3);
        CHECK(t.merges[1].height == 5.0);
        CHECK(t.merges[1].size == 3);
    }
    SUBCASE("pair")
    {
        RowMatrix c(2, 2);
        c << 0, 0, 3, 4;
        const auto t = centroid_dendrogram(centroids_model(c));
        REQUIRE(t.merges.size() == 1);
        CHECK(t.merges[0].height == 5.0);
    }
    SUBCASE("square corners")
    {
        const double side = 2.0;
        RowMatrix c(4, 2);
        c << 0, 0, side, 0, 0, side, side, side;
        const auto t = centroid_dendrogram(centroids_model(c));
        REQUIRE(t.merges.size() == 3);
        CHECK(t.merges[0].left == 0);
        CHECK(t.merges[0].right == 1);
        CHECK(t.merges[0].height == side);
        CHECK(t.merges[1].left == 2);
        CHECK(t.merges[1].right == 3);
        CHECK(t.merges[1].height == side);
        CHECK(t.merges[2].height == doctest::Approx(std::sqrt(2.0) * side));
    }
    SUBCASE("single centroid")
    {
        CHECK_THROWS_AS(centroid_dendrogram(centroids_model(RowMatrix::Zero(1, 2))), Error);
    }
}

TEST_CASE("dendrogram heights are monotone")
{
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const int k  = 2 + static_cast<int>(rng.below(20));
        const auto c = testing::uniform_points(k, 1 + static_cast<int>(rng.below(5)), rng.next());
        const auto t = centroid_dendrogram(centroids_model(c));
        REQUIRE(t.merges.size() == static_cast<std::size_t>(k - 1));
        for (std::size_t i = 1; i < t.merges.size(); ++i) {
            CHECK(t.merges[i].height >= t.merges[i - 1].height);
        }
        auto order = t.leaf_order();
        std::sort(order.begin(), order.end());
        for (int i = 0; i < k; ++i) {
            CHECK(order[static_cast<std::size_t>(i)] == i);
        }
    }
}

TEST_CASE("heatmap ordering")
{
    RowMatrix c(4, 3);
    c << 0, 0, 0, 5, 5, 5, 0, 0, 0, 5, 5, 5.1;
    const auto h = heatmap_matrix(centroids_model(c));
    CHECK(h.values == c);
    REQUIRE(h.row_order.size() == 4);
    REQUIRE(h.col_order.size() == 3);
    auto pos = [&](int id) { return std::find(h.row_order.begin(), h.row_order.end(), id) - h.row_order.begin(); };
    CHECK(std::abs(pos(0) - pos(2)) == 1);
    CHECK(std::abs(pos(1) - pos(3)) == 1);

    RowMatrix two(2, 2);
    two << 1, 2, 3, 4;
    const auto h2 = heatmap_matrix(centroids_model(two));
    CHECK(h2.row_order == h2.tree.leaf_order());
}

TEST_CASE("region report")
{
    std::vector<QualitativeProfile> profiles(8);
    for (int c = 0; c < 8; ++c) {
        profiles[c].cluster_id      = c;
        profiles[c].levels["x"]     = QualLevel::Medium;
        profiles[c].levels["y"]     = static_cast<QualLevel>(c % 7);
    }
    const std::map<std::string, int> assignment {{"A", 1}, {"B", 1}, {"C", 7}, {"D", 3}};
    auto r = macro_region_report(assignment, profiles, {"R", {"A", "B", "C"}});
    CHECK(r.n_clusters_present == 2);
    CHECK(r.cluster_frequencies == std::map<int, std::size_t> {{1, 2}, {7, 1}});
    CHECK(r.indicator_spread.at("x").min == QualLevel::Medium);
    CHECK(r.indicator_spread.at("x").max == QualLevel::Medium);
    CHECK(r.indicator_spread.at("y").min == QualLevel::VeryLow);
    CHECK(r.indicator_spread.at("y").max == QualLevel::Low);

    r = macro_region_report(assignment, profiles, {"S", {"D"}});
    CHECK(r.n_clusters_present == 1);

    CHECK_THROWS_AS(macro_region_report(assignment, profiles, {"T", {"Z"}}), Error);
}

TEST_CASE("region frequencies sum to region size")
{
    Rng rng(12);
    std::map<std::string, int> assignment;
    std::vector<std::string> codes;
    for (int i = 0; i < 300; ++i) {
        codes.push_back("T" + std::to_string(i));
        assignment[codes.back()] = static_cast<int>(rng.below(17));
    }
    std::vector<QualitativeProfile> profiles(17);
    for (int c = 0; c < 17; ++c) {
        profiles[c].cluster_id  = c;
        profiles[c].levels["v"] = static_cast<QualLevel>(rng.below(7));
    }
    for (int trial = 0; trial < 100; ++trial) {
        RegionSet region {"R", {}};
        const auto size = 1 + rng.below(100);
        while (region.members.size() < size) {
            region.members.insert(codes[rng.below(codes.size())]);
        }
        const auto r = macro_region_report(assignment, profiles, region);
        std::size_t total = 0;
        for (const auto& [_, f] : r.cluster_frequencies) {
            total += f;
        }
        CHECK(total == region.members.size());
        CHECK(r.n_clusters_present == r.cluster_frequencies.size());
    }
}
