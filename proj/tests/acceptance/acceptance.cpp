#include "regio/error.hpp"
#include "regio/fixture.hpp"
#include "regio/harmonize.hpp"
#include "regio/io.hpp"
#include "regio/kmeans.hpp"
#include "regio/pipeline.hpp"
#include "regio/preprocess.hpp"
#include "regio/profile.hpp"
#include "regio/tendency.hpp"

#include "support.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace regio;

namespace {

struct Outcome
{
    bool pass = true;
    std::string detail;
};

struct Criterion
{
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / ("regio_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string fmt(const char* f, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path bundled_fixture()
{
    const fs::path dir = REGIO_FIXTURE_DIR;
    if (fs::exists(dir / "territories.csv")) {
        return dir;
    }
    auto tmp = scratch("fixture");
    write_fixture(tmp, generate_fixture({}));
    return tmp;
}

std::map<std::string, std::string> read_all(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        out[e.path().filename().string()] = read_text_file(e.path());
    }
    return out;
}

Outcome configuration_fidelity()
{
    const auto out = scratch("c1");
    RunConfig cfg;
    cfg.inputs  = DatasetPaths::in_directory(bundled_fixture());
    cfg.out_dir = out;
    run_pipeline(cfg);
    const auto report = nlohmann::json::parse(read_text_file(out / "report.json"));
    const auto& c     = report.at("config");
    Outcome o;
    o.pass = c.at("k") == 17 && c.at("max_iter") == 50 && c.at("n_starts") == 10 && c.at("k_min") == 15 && c.at("k_max") == 20 &&
             c.at("missing_threshold") == 0.18 && c.at("corr_threshold") == 0.85;
    // Strictness of both thresholds, on the boundary values themselves.
    const std::vector<double> x {1, 2, 3, 4, 5}, y {2, 1, 4, 3, 6};
    const auto t = testing::make_table({"a", "b"}, {{1.0, 2.0, 3.0, 4.0, 5.0}, {2.0, 1.0, 4.0, 3.0, 6.0}});
    PreprocessConfig atBoundary;
    atBoundary.corr_threshold = pearson(x, y);
    o.pass = o.pass && prune_correlated(t, atBoundary).dropped.empty();
    auto sparse = testing::make_table({"a"}, {{1.0, 2.0, std::nullopt, 4.0, 5.0}});
    PreprocessConfig missingBoundary;
    missingBoundary.missing_threshold = 0.2;
    o.pass = o.pass && apply_missing_policy(sparse, missingBoundary).dropped.empty();
    o.detail = "k=" + c.at("k").dump() + " max_iter=" + c.at("max_iter").dump() + " n_starts=" + c.at("n_starts").dump() + " vote=[" +
               c.at("k_min").dump() + "," + c.at("k_max").dump() + "] missing>" + c.at("missing_threshold").dump() + " |r|>" +
               c.at("corr_threshold").dump();
    return o;
}

Outcome conservation()
{
    Rng rng(2);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Territory> ts;
        ProxyTable proxy {"x", {}};
        std::vector<CoarseValue> coarse;
        const int nCountries = 1 + static_cast<int>(rng.below(8));
        for (int c = 0; c < nCountries; ++c) {
            const std::string cc {static_cast<char>('A' + c), static_cast<char>('A' + trial % 26)};
            const int n = 1 + static_cast<int>(rng.below(60));
            for (int i = 0; i < n; ++i) {
                const auto code = cc + std::to_string(100 + i);
                ts.push_back({TerritoryId(code), 1.0, 1.0, 0.0, 0.0});
                proxy.weights[code] = rng.uniform() < 0.2 ? 0.0 : std::exp(rng.uniform(-8.0, 8.0));
            }
            proxy.weights[cc + "100"] += 1e-3;
            coarse.push_back({cc, rng.uniform() < 0.05 ? 0.0 : std::exp(rng.uniform(-5.0, 25.0))});
        }
        const auto fine = downscale_by_proxy(coarse, proxy, ts);
        for (const auto& cv : coarse) {
            double sum = 0.0;
            for (const auto& [code, v] : fine) {
                if (code.starts_with(cv.country_code)) {
                    sum += v;
                }
            }
            const double err = cv.value == 0.0 ? std::abs(sum) : std::abs(sum - cv.value) / cv.value;
            worst            = std::max(worst, err);
        }
    }
    return {worst < 1e-9, fmt("100 fixtures, worst relative error %.3g", worst)};
}

Outcome hopkins_calibration()
{
    double mean = 0.0;
    for (uint64_t s = 0; s < 20; ++s) {
        HopkinsConfig c;
        c.seed = s;
        mean += hopkins(testing::uniform_points(1000, 5, 1000 + s), c) / 20.0;
    }
    double worstBlob = 0.0;
    for (uint64_t s = 0; s < 20; ++s) {
        const auto blobs = testing::gaussian_blobs(17, 20, 5, 0.01, 1.0, 4.0, 2000 + s);
        HopkinsConfig c;
        c.seed    = s;
        worstBlob = std::max(worstBlob, hopkins(blobs.data, c));
    }
    return {mean >= 0.45 && mean <= 0.55 && worstBlob < 0.10, fmt("uniform mean H=%.4f, 17-blob max H=%.4g", mean, worstBlob)};
}

Outcome k_recovery()
{
    int votedRight = 0, recovered = 0;
    double worstAri = 1.0;
    for (uint64_t s = 0; s < 20; ++s) {
        FixtureConfig fc;
        fc.seed       = 100 + s;
        fc.separation = 6.0;
        const auto fx = generate_fixture(fc);
        RunConfig cfg;
        cfg.seed     = s;
        const auto r = run_pipeline(fx.dataset, cfg);
        votedRight += r.report.vote->k_best == 17;

        RunConfig fixed = cfg;
        fixed.skip_vote = true;
        const auto f    = run_pipeline(fx.dataset, fixed);
        std::vector<int> planted;
        for (const auto& id : f.standardized.rows) {
            planted.push_back(fx.key.at(id.code));
        }
        const double ari = testing::adjusted_rand(planted, f.model.assignment);
        worstAri         = std::min(worstAri, ari);
        recovered += ari >= 0.9;
    }
    return {votedRight >= 16 && recovered >= 18,
            fmt("vote k=17 in %d/20, ARI>=0.9 in %d/20 (min ARI %.3f)", votedRight, recovered, worstAri)};
}

// A single batch of 50 is a noisy estimate of the match rate, so the rate is
// pooled over 20 independent batches of 50 instances each.
Outcome small_instance_optimality()
{
    Rng rng(55);
    int matched = 0, worstBatch = 50, bestBatch = 0;
    bool beaten = false;
    for (int batch = 0; batch < 20; ++batch) {
        int inBatch = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const int k     = 1 + static_cast<int>(rng.below(3));
            const int n     = std::max(k + 1, 4 + static_cast<int>(rng.below(9)));
            const int d     = 1 + static_cast<int>(rng.below(3));
            const auto data = testing::uniform_points(n, d, rng.next());
            const double optimum = testing::brute_force_within(data, k);
            KMeansConfig cfg;
            cfg.k          = k;
            cfg.seed       = rng.next();
            const auto fit = kmeans_fit(data, cfg);
            beaten         = beaten || fit.within_ss < optimum - 1e-9;
            inBatch += std::abs(fit.within_ss - optimum) <= 1e-9 * std::max(1.0, optimum);
        }
        matched += inBatch;
        worstBatch = std::min(worstBatch, inBatch);
        bestBatch  = std::max(bestBatch, inBatch);
    }
    const double rate = matched / 1000.0;
    return {rate >= 0.95 && !beaten, fmt("optimum matched in %d/1000 (%.1f%%; per batch of 50: %d..%d), never below optimum: %s", matched, 100 * rate,
                                         worstBatch, bestBatch, beaten ? "no" : "yes")};
}

Outcome variance_identities()
{
    double worst = 0.0;
    bool exact   = true;
    int models   = 0;
    Rng rng(66);
    for (int trial = 0; trial < 40; ++trial) {
        const int n     = 5 + static_cast<int>(rng.below(100));
        const int d     = 1 + static_cast<int>(rng.below(6));
        auto data       = testing::uniform_points(n, d, rng.next());
        data *= std::exp(rng.uniform(-5, 5));
        for (int k : {1, 2, std::max(1, n / 3), n}) {
            KMeansConfig cfg;
            cfg.k          = k;
            cfg.seed       = rng.next();
            const auto fit = kmeans_fit(data, cfg);
            ++models;
            worst = std::max(worst, std::abs(fit.within_ss + fit.between_ss - fit.total_ss) / fit.total_ss);
            if (k == 1) {
                exact = exact && explained_variance(fit) == 0.0;
            }
            if (k == n) {
                exact = exact && explained_variance(fit) == 1.0;
            }
        }
    }
    const auto fx  = generate_fixture({});
    const auto run = run_pipeline(fx.dataset, RunConfig {});
    worst          = std::max(worst, std::abs(run.model.within_ss + run.model.between_ss - run.model.total_ss) / run.model.total_ss);
    ++models;
    return {worst < 1e-9 && exact, fmt("%d models, worst |W+B-T|/T = %.3g, k=1 -> 0 and k=n -> 1 exact: %s", models, worst, exact ? "yes" : "no")};
}

Outcome preprocessing_contracts()
{
    Rng rng(77);
    double worstR = 0.0, worstMean = 0.0, worstStd = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 30 + static_cast<int>(rng.below(300));
        const int d = 2 + static_cast<int>(rng.below(10));
        std::vector<std::vector<double>> raw(static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(n)));
        std::vector<std::vector<std::optional<double>>> cols(static_cast<std::size_t>(d));
        std::vector<std::string> names;
        for (int j = 0; j < d; ++j) {
            names.push_back("c" + std::to_string(j));
            const int base   = static_cast<int>(rng.below(static_cast<uint64_t>(j + 1)));
            const double mix = rng.uniform();
            const double scale = std::exp(rng.uniform(-6, 6));
            for (int i = 0; i < n; ++i) {
                raw[j][i] = base < j ? mix * raw[base][i] + (1 - mix) * rng.normal() : rng.normal();
                cols[j].push_back(raw[j][i] * scale + 1e3 * scale);
            }
        }
        const auto pruned = prune_correlated(testing::make_table(names, cols), {});
        const auto z      = standardize(pruned.table);
        for (Eigen::Index a = 0; a < z.data.cols(); ++a) {
            const double mean = z.data.col(a).mean();
            const double sd   = std::sqrt((z.data.col(a).array() - mean).square().sum() / static_cast<double>(n - 1));
            worstMean         = std::max(worstMean, std::abs(mean));
            worstStd          = std::max(worstStd, std::abs(sd - 1.0));
            for (Eigen::Index b = a + 1; b < z.data.cols(); ++b) {
                std::vector<double> va(z.data.col(a).begin(), z.data.col(a).end());
                std::vector<double> vb(z.data.col(b).begin(), z.data.col(b).end());
                worstR = std::max(worstR, std::abs(pearson(va, vb)));
            }
        }
    }

    auto column = [&](int missing) {
        std::vector<std::optional<double>> c;
        for (int i = 0; i < 100; ++i) {
            c.push_back(i < missing ? std::nullopt : std::optional<double>(rng.normal()));
        }
        return c;
    };
    const auto t        = testing::make_table({"m19", "m18"}, {column(19), column(18)});
    const auto policy   = apply_missing_policy(t, {});
    const bool boundary = policy.dropped.size() == 1 && policy.dropped[0].indicator == "m19" && policy.imputed.size() == 18 &&
                          policy.table.missing_count() == 0;

    return {worstR <= 0.85 && worstMean < 1e-10 && worstStd < 1e-10 && boundary,
            fmt("max |r| %.4f, max |mean| %.2g, max |sd-1| %.2g, 19%% dropped / 18%% imputed: %s", worstR, worstMean, worstStd,
                boundary ? "yes" : "no")};
}

Outcome determinism()
{
    const auto data = bundled_fixture();
    const auto a    = scratch("c8a");
    const auto b    = scratch("c8b");
    const auto c    = scratch("c8c");
    auto run        = [&](const fs::path& out, uint64_t seed) {
        RunConfig cfg;
        cfg.inputs       = DatasetPaths::in_directory(data);
        cfg.out_dir      = out;
        cfg.seed         = seed;
        cfg.emit_geojson = true;
        run_pipeline(cfg);
        return read_all(out);
    };
    const auto ra = run(a, 42);
    const auto rb = run(b, 42);
    const auto rc = run(c, 7);
    const bool same = ra == rb;

    bool upstreamStable = ra.at("harmonized.csv") == rc.at("harmonized.csv") && ra.at("standardized.csv") == rc.at("standardized.csv");
    const auto ja = nlohmann::json::parse(ra.at("report.json"));
    const auto jc = nlohmann::json::parse(rc.at("report.json"));
    upstreamStable = upstreamStable && ja.at("preprocessing") == jc.at("preprocessing") && ja.at("harmonization") == jc.at("harmonization") &&
                     ja.at("input") == jc.at("input");

    auto regenerated = scratch("c8fixture");
    write_fixture(regenerated, generate_fixture({}));
    const bool fixtureStable = read_all(regenerated) == read_all(data);

    return {same && upstreamStable && fixtureStable, fmt("%zu files byte-identical: %s, seed change leaves harmonization/preprocessing intact: %s, "
                                                          "fixture regenerates identically: %s",
                                                          ra.size(), same ? "yes" : "no", upstreamStable ? "yes" : "no", fixtureStable ? "yes" : "no")};
}

Outcome profile_contracts()
{
    Rng rng(99);
    bool binning = true;
    std::vector<double> values;
    for (int i = 0; i < 100000; ++i) {
        values.push_back(rng.normal(0.0, 2.0));
    }
    std::sort(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto level = qualitative_level(values[i]);
        int hits         = 0;
        const double v   = values[i];
        hits += v <= -1.5;
        hits += v > -1.5 && v <= -0.75;
        hits += v > -0.75 && v <= -0.25;
        hits += v > -0.25 && v < 0.25;
        hits += v >= 0.25 && v < 0.75;
        hits += v >= 0.75 && v < 1.5;
        hits += v >= 1.5;
        binning = binning && hits == 1;
        const int expected = v <= -1.5 ? 0 : v <= -0.75 ? 1 : v <= -0.25 ? 2 : v < 0.25 ? 3 : v < 0.75 ? 4 : v < 1.5 ? 5 : 6;
        binning = binning && static_cast<int>(level) == expected;
        if (i > 0) {
            binning = binning && qualitative_level(values[i - 1]) <= level;
        }
    }

    bool heights = true;
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 2 + static_cast<int>(rng.below(25));
        ClusterModel m;
        m.k         = k;
        m.centroids = testing::uniform_points(k, 1 + static_cast<int>(rng.below(8)), rng.next());
        const auto t = centroid_dendrogram(m);
        for (std::size_t i = 1; i < t.merges.size(); ++i) {
            heights = heights && t.merges[i].height >= t.merges[i - 1].height;
        }
    }

    bool sums = true;
    std::map<std::string, int> assignment;
    std::vector<std::string> codes;
    for (int i = 0; i < 500; ++i) {
        codes.push_back("T" + std::to_string(i));
        assignment[codes.back()] = static_cast<int>(rng.below(17));
    }
    std::vector<QualitativeProfile> profiles(17);
    for (int c = 0; c < 17; ++c) {
        profiles[c].cluster_id  = c;
        profiles[c].levels["v"] = static_cast<QualLevel>(rng.below(7));
    }
    for (int trial = 0; trial < 100; ++trial) {
        RegionSet region {"R" + std::to_string(trial), {}};
        const auto size = 1 + rng.below(200);
        while (region.members.size() < size) {
            region.members.insert(codes[rng.below(codes.size())]);
        }
        const auto r      = macro_region_report(assignment, profiles, region);
        std::size_t total = 0;
        for (const auto& [_, f] : r.cluster_frequencies) {
            total += f;
        }
        sums = sums && total == region.members.size();
    }
    return {binning && heights && sums, fmt("binning total+monotone: %s, dendrogram heights monotone: %s, region frequencies sum: %s",
                                            binning ? "yes" : "no", heights ? "yes" : "no", sums ? "yes" : "no")};
}

}

int main()
{
    const std::vector<Criterion> criteria {
        {1, "configuration fidelity", 1.0, configuration_fidelity},
        {2, "conservation", 1.0, conservation},
        {3, "hopkins calibration", 10.0, hopkins_calibration},
        {4, "k recovery", 60.0, k_recovery},
        {5, "small-instance optimality", 30.0, small_instance_optimality},
        {6, "variance identities", 60.0, variance_identities},
        {7, "preprocessing contracts", 60.0, preprocessing_contracts},
        {8, "determinism", 60.0, determinism},
        {9, "profile contracts", 60.0, profile_contracts},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool inTime = secs < c.budget_seconds;
        const bool pass   = o.pass && inTime;
        failed += !pass;
        std::printf("[%s] criterion %d (%s): %s [%.2fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    inTime ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
