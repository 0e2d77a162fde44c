#include "regio/kmeans.hpp"
#include "regio/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace regio {

namespace {

double squared_distance(const RowMatrix& a, Eigen::Index i, const RowMatrix& b, Eigen::Index j) noexcept
{
    double sum = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const double diff = a(i, c) - b(j, c);
        sum += diff * diff;
    }
    return sum;
}

std::size_t count_distinct_rows(const RowMatrix& data, std::size_t cap)
{
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(data.rows()));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index c = 0; c < data.cols(); ++c) {
            if (data(a, c) != data(b, c)) {
                return data(a, c) < data(b, c);
            }
        }
        return false;
    });

    std::size_t distinct = idx.empty() ? 0 : 1;
    for (std::size_t i = 1; i < idx.size() && distinct < cap; ++i) {
        if (squared_distance(data, idx[i - 1], data, idx[i]) != 0.0) {
            ++distinct;
        }
    }
    return distinct;
}

int nearest_centroid(const RowMatrix& data, Eigen::Index i, const RowMatrix& centroids, double* dist2 = nullptr) noexcept
{
    int best        = 0;
    double bestDist = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
        const double d = squared_distance(data, i, centroids, c);
        if (d < bestDist) {
            bestDist = d;
            best     = static_cast<int>(c);
        }
    }
    if (dist2) {
        *dist2 = bestDist;
    }
    return best;
}

void update_means(const RowMatrix& data, std::span<const int> assignment, std::span<const std::size_t> sizes, RowMatrix& centroids)
{
    centroids.setZero();
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        centroids.row(assignment[static_cast<std::size_t>(i)]) += data.row(i);
    }
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
        centroids.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
    }
}

double within_sum(const RowMatrix& data, std::span<const int> assignment, const RowMatrix& centroids) noexcept
{
    double sum = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        sum += squared_distance(data, i, centroids, assignment[static_cast<std::size_t>(i)]);
    }
    return sum;
}

}

double euclidean_distance(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) {
        throw Error(ErrorKind::Domain, "distance between vectors of dimension " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = x[j] - y[j];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

std::string_view to_string(SeedInit init) noexcept
{
    return init == SeedInit::Maximin ? "maximin" : "dsq_weighted";
}

std::optional<SeedInit> parse_seed_init(std::string_view text) noexcept
{
    if (text == "maximin") {
        return SeedInit::Maximin;
    }
    if (text == "dsq_weighted") {
        return SeedInit::DsqWeighted;
    }
    return std::nullopt;
}

void KMeansConfig::validate(std::size_t n) const
{
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw Error(ErrorKind::Domain, "k = " + std::to_string(k) + " must lie in [1, n = " + std::to_string(n) + "]");
    }
    if (max_iter < 1) {
        throw Error(ErrorKind::Domain, "max_iter must be >= 1");
    }
    if (n_starts < 1) {
        throw Error(ErrorKind::Domain, "n_starts must be >= 1");
    }
    if (seeding_trials < 0) {
        throw Error(ErrorKind::Domain, "seeding_trials must be >= 0");
    }
}

ClusterModel summarize_partition(const RowMatrix& data, std::span<const int> assignment, int k)
{
    const auto n = static_cast<std::size_t>(data.rows());
    if (assignment.size() != n) {
        throw Error(ErrorKind::Domain, "assignment length does not match the number of rows");
    }
    if (k < 1) {
        throw Error(ErrorKind::Domain, "k must be >= 1");
    }

    ClusterModel m;
    m.k = k;
    m.assignment.assign(assignment.begin(), assignment.end());
    m.sizes.assign(static_cast<std::size_t>(k), 0);
    for (int a : assignment) {
        if (a < 0 || a >= k) {
            throw Error(ErrorKind::Domain, "cluster id out of range");
        }
        ++m.sizes[static_cast<std::size_t>(a)];
    }
    if (std::find(m.sizes.begin(), m.sizes.end(), 0u) != m.sizes.end()) {
        throw Error(ErrorKind::Domain, "partition has an empty cluster");
    }

    m.centroids.resize(k, data.cols());
    update_means(data, m.assignment, m.sizes, m.centroids);

    RowMatrix grand(1, data.cols());
    grand.setZero();
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        grand.row(0) += data.row(i);
    }
    grand.row(0) /= static_cast<double>(n);

    m.within_ss = within_sum(data, m.assignment, m.centroids);
    m.total_ss  = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        m.total_ss += squared_distance(data, i, grand, 0);
    }
    m.between_ss = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
        m.between_ss += static_cast<double>(m.sizes[static_cast<std::size_t>(c)]) * squared_distance(m.centroids, c, grand, 0);
    }
    m.between_ratio = m.total_ss > 0.0 ? std::clamp(1.0 - m.within_ss / m.total_ss, 0.0, 1.0) : 0.0;
    return m;
}

std::vector<std::size_t> maximin_seeds(const RowMatrix& data, int k, std::size_t first)
{
    const auto n = static_cast<std::size_t>(data.rows());
    if (k < 1 || static_cast<std::size_t>(k) > n || first >= n) {
        throw Error(ErrorKind::Domain, "invalid maximin seeding request");
    }

    std::vector<std::size_t> seeds {first};
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) {
        nearest[i] = squared_distance(data, static_cast<Eigen::Index>(i), data, static_cast<Eigen::Index>(first));
    }
    while (seeds.size() < static_cast<std::size_t>(k)) {
        std::size_t pick = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (nearest[i] > nearest[pick]) {
                pick = i;
            }
        }
        if (!(nearest[pick] > 0.0)) {
            throw Error(ErrorKind::Seeding, "fewer than k = " + std::to_string(k) + " distinct points");
        }
        seeds.push_back(pick);
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(data, static_cast<Eigen::Index>(i), data, static_cast<Eigen::Index>(pick)));
        }
    }
    return seeds;
}

std::vector<std::size_t> seed_centroids(const RowMatrix& data, int k, SeedInit init, Rng& rng, int trials)
{
    const auto n = static_cast<std::size_t>(data.rows());
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw Error(ErrorKind::Domain, "k = " + std::to_string(k) + " must lie in [1, n]");
    }
    if (count_distinct_rows(data, static_cast<std::size_t>(k)) < static_cast<std::size_t>(k)) {
        throw Error(ErrorKind::Seeding, "fewer than k = " + std::to_string(k) + " distinct points");
    }

    const auto first = static_cast<std::size_t>(rng.below(n));
    if (init == SeedInit::Maximin) {
        return maximin_seeds(data, k, first);
    }

    const std::size_t nTrials = trials > 0 ? static_cast<std::size_t>(trials) : 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));

    std::vector<std::size_t> seeds {first};
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) {
        nearest[i] = squared_distance(data, static_cast<Eigen::Index>(i), data, static_cast<Eigen::Index>(first));
    }
    std::vector<double> candidate(n);
    std::vector<double> best(n);
    while (seeds.size() < static_cast<std::size_t>(k)) {
        const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
        if (!(total > 0.0)) {
            throw Error(ErrorKind::Seeding, "fewer than k = " + std::to_string(k) + " distinct points");
        }
        std::size_t chosen = n;
        double chosenPotential = 0.0;
        for (std::size_t t = 0; t < nTrials; ++t) {
            const double target = rng.uniform() * total;
            std::size_t pick    = n;
            double cumulative   = 0.0;
            std::size_t lastPositive = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (nearest[i] > 0.0) {
                    lastPositive = i;
                }
                cumulative += nearest[i];
                if (cumulative > target) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {
                pick = lastPositive;
            }
            double potential = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                candidate[i] = std::min(nearest[i], squared_distance(data, static_cast<Eigen::Index>(i), data, static_cast<Eigen::Index>(pick)));
                potential += candidate[i];
            }
            if (chosen == n || potential < chosenPotential) {
                chosen          = pick;
                chosenPotential = potential;
                best.swap(candidate);
            }
        }
        seeds.push_back(chosen);
        nearest.swap(best);
    }
    return seeds;
}

StartResult kmeans_start(const RowMatrix& data, const KMeansConfig& cfg, int start_index)
{
    const auto n = static_cast<std::size_t>(data.rows());
    cfg.validate(n);
    const auto k = static_cast<std::size_t>(cfg.k);

    Rng rng(derive_seed(cfg.seed, static_cast<uint64_t>(start_index)));
    const auto seeds = seed_centroids(data, cfg.k, cfg.init, rng, cfg.seeding_trials);

    RowMatrix centroids(cfg.k, data.cols());
    for (std::size_t c = 0; c < k; ++c) {
        centroids.row(static_cast<Eigen::Index>(c)) = data.row(static_cast<Eigen::Index>(seeds[c]));
    }

    StartResult result;
    std::vector<int> assignment(n, -1);
    std::vector<std::size_t> sizes(k, 0);
    std::vector<double> dist2(n, 0.0);
    bool converged = false;
    int iterations = 0;

    for (int it = 0; it < cfg.max_iter; ++it) {
        bool changed = false;
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const int c = nearest_centroid(data, static_cast<Eigen::Index>(i), centroids, &dist2[i]);
            changed |= (c != assignment[i]);
            assignment[i] = c;
            ++sizes[static_cast<std::size_t>(c)];
        }
        iterations = it + 1;
        if (!changed) {
            converged = true;
            break;
        }

        // An empty cluster takes over the point lying farthest from its centroid.
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) {
                continue;
            }
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[static_cast<std::size_t>(assignment[i])] > 1 && (far == n || dist2[i] > dist2[far])) {
                    far = i;
                }
            }
            --sizes[static_cast<std::size_t>(assignment[far])];
            assignment[far] = static_cast<int>(c);
            sizes[c]        = 1;
            dist2[far]      = 0.0;
            centroids.row(static_cast<Eigen::Index>(c)) = data.row(static_cast<Eigen::Index>(far));
        }

        update_means(data, assignment, sizes, centroids);
        result.within_trace.push_back(within_sum(data, assignment, centroids));
    }

    if (!converged) {
        // The cap was hit right after an update; converged iff that update moved nothing.
        converged = true;
        for (std::size_t i = 0; i < n && converged; ++i) {
            converged = nearest_centroid(data, static_cast<Eigen::Index>(i), centroids) == assignment[i];
        }
    }

    result.model                = summarize_partition(data, assignment, cfg.k);
    result.model.iterations_run = iterations;
    result.model.converged      = converged;
    return result;
}

ClusterModel kmeans_fit(const RowMatrix& data, const KMeansConfig& cfg)
{
    cfg.validate(static_cast<std::size_t>(data.rows()));

    std::optional<ClusterModel> best;
    for (int s = 0; s < cfg.n_starts; ++s) {
        auto run = kmeans_start(data, cfg, s);
        if (!best || run.model.within_ss < best->within_ss) {
            best = std::move(run.model);
        }
    }
    return std::move(*best);
}

double explained_variance(const ClusterModel& model)
{
    if (model.assignment.empty()) {
        throw Error(ErrorKind::Domain, "model is not fitted");
    }
    if (!(model.total_ss > 0.0)) {
        throw Error(ErrorKind::DegenerateData, "total sum of squares is zero (all points identical)");
    }
    return model.between_ratio;
}

}
