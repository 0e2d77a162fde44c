#include "regio/tendency.hpp"
#include "regio/error.hpp"
#include "regio/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace regio {

namespace {

double row_distance(const RowMatrix& a, Eigen::Index i, const RowMatrix& b, Eigen::Index j) noexcept
{
    double sum = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const double diff = a(i, c) - b(j, c);
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

double point_distance(std::span<const double> p, const RowMatrix& data, Eigen::Index j) noexcept
{
    double sum = 0.0;
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
        const double diff = p[static_cast<std::size_t>(c)] - data(j, c);
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

void require_fitted(const RowMatrix& data, const ClusterModel& model)
{
    if (model.assignment.size() != static_cast<std::size_t>(data.rows()) || model.centroids.rows() != model.k ||
        model.centroids.cols() != data.cols()) {
        throw Error(ErrorKind::Domain, "cluster model does not match the data");
    }
}

[[noreturn]] void undefined(std::string_view index, std::string_view why)
{
    throw Error(ErrorKind::IndexUndefined, std::string(index) + " undefined: " + std::string(why));
}

}

std::size_t default_hopkins_sample(std::size_t n) noexcept
{
    if (n < 2) {
        return 0;
    }
    return std::min(std::max<std::size_t>(10, n / 10), n - 1);
}

double hopkins(const RowMatrix& data, const HopkinsConfig& cfg)
{
    const auto n = static_cast<std::size_t>(data.rows());
    const auto d = data.cols();
    if (n < 3) {
        throw Error(ErrorKind::Domain, "Hopkins statistic needs at least 3 points");
    }
    if (d < 1) {
        throw Error(ErrorKind::Domain, "Hopkins statistic needs at least one column");
    }
    if (cfg.n_repeats < 1) {
        throw Error(ErrorKind::Domain, "n_repeats must be >= 1");
    }
    const auto m = cfg.sample_size == 0 ? default_hopkins_sample(n) : cfg.sample_size;
    if (m < 1 || m > n - 1) {
        throw Error(ErrorKind::Domain, "Hopkins sample size must lie in [1, n-1]");
    }

    const Eigen::RowVectorXd lo = data.colwise().minCoeff();
    const Eigen::RowVectorXd hi = data.colwise().maxCoeff();
    if ((hi - lo).maxCoeff() <= 0.0) {
        throw Error(ErrorKind::DegenerateData, "all points are identical");
    }

    std::vector<std::size_t> order(n);
    std::vector<double> probe(static_cast<std::size_t>(d));
    double total = 0.0;

    for (int rep = 0; rep < cfg.n_repeats; ++rep) {
        Rng rng(derive_seed(cfg.seed, static_cast<uint64_t>(rep)));

        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = 0; i < m; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(n - i));
            std::swap(order[i], order[j]);
        }

        double sumW = 0.0;
        for (std::size_t s = 0; s < m; ++s) {
            const auto i = static_cast<Eigen::Index>(order[s]);
            double best  = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < data.rows(); ++j) {
                if (j != i) {
                    best = std::min(best, row_distance(data, i, data, j));
                }
            }
            sumW += best;
        }

        double sumU = 0.0;
        for (std::size_t s = 0; s < m; ++s) {
            for (Eigen::Index c = 0; c < d; ++c) {
                probe[static_cast<std::size_t>(c)] = rng.uniform(lo(c), hi(c));
            }
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < data.rows(); ++j) {
                best = std::min(best, point_distance(probe, data, j));
            }
            sumU += best;
        }

        total += (sumU + sumW) > 0.0 ? sumW / (sumU + sumW) : 0.5;
    }
    return total / static_cast<double>(cfg.n_repeats);
}

std::string_view to_string(ValidityIndex index) noexcept
{
    switch (index) {
    case ValidityIndex::CalinskiHarabasz: return "calinski_harabasz";
    case ValidityIndex::DaviesBouldin: return "davies_bouldin";
    case ValidityIndex::Silhouette: return "silhouette";
    case ValidityIndex::Dunn: return "dunn";
    case ValidityIndex::Hartigan: return "hartigan";
    }
    return "";
}

std::optional<ValidityIndex> parse_validity_index(std::string_view text) noexcept
{
    for (auto idx : all_validity_indices) {
        if (to_string(idx) == text) {
            return idx;
        }
    }
    return std::nullopt;
}

Preference preference(ValidityIndex index) noexcept
{
    switch (index) {
    case ValidityIndex::DaviesBouldin: return Preference::Minimize;
    case ValidityIndex::Hartigan: return Preference::Elbow;
    default: return Preference::Maximize;
    }
}

double calinski_harabasz(const RowMatrix& data, const ClusterModel& model)
{
    require_fitted(data, model);
    const auto n = static_cast<double>(data.rows());
    const auto k = static_cast<double>(model.k);
    if (model.k < 2 || model.k >= data.rows()) {
        undefined("calinski_harabasz", "needs 2 <= k < n");
    }
    if (model.within_ss == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return (model.between_ss / (k - 1.0)) / (model.within_ss / (n - k));
}

double davies_bouldin(const RowMatrix& data, const ClusterModel& model)
{
    require_fitted(data, model);
    if (model.k < 2) {
        undefined("davies_bouldin", "needs k >= 2");
    }
    const auto k = static_cast<std::size_t>(model.k);

    std::vector<double> scatter(k, 0.0);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const auto c = model.assignment[static_cast<std::size_t>(i)];
        scatter[static_cast<std::size_t>(c)] += row_distance(data, i, model.centroids, c);
    }
    for (std::size_t c = 0; c < k; ++c) {
        scatter[c] /= static_cast<double>(model.sizes[c]);
    }

    double sum = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        double worst = 0.0;
        for (std::size_t b = 0; b < k; ++b) {
            if (a == b) {
                continue;
            }
            const double sep = row_distance(model.centroids, static_cast<Eigen::Index>(a), model.centroids, static_cast<Eigen::Index>(b));
            if (sep == 0.0) {
                undefined("davies_bouldin", "two centroids coincide");
            }
            worst = std::max(worst, (scatter[a] + scatter[b]) / sep);
        }
        sum += worst;
    }
    return sum / static_cast<double>(k);
}

double silhouette(const RowMatrix& data, const ClusterModel& model)
{
    require_fitted(data, model);
    if (model.k < 2 || model.k >= data.rows()) {
        undefined("silhouette", "needs 2 <= k < n");
    }
    const auto k = static_cast<std::size_t>(model.k);
    const auto n = data.rows();

    std::vector<double> perCluster(k);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        std::fill(perCluster.begin(), perCluster.end(), 0.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) {
                perCluster[static_cast<std::size_t>(model.assignment[static_cast<std::size_t>(j)])] += row_distance(data, i, data, j);
            }
        }
        const auto own = static_cast<std::size_t>(model.assignment[static_cast<std::size_t>(i)]);
        if (model.sizes[own] == 1) {
            continue; // singleton: s(i) = 0
        }
        const double a = perCluster[own] / static_cast<double>(model.sizes[own] - 1);
        double b       = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c != own) {
                b = std::min(b, perCluster[c] / static_cast<double>(model.sizes[c]));
            }
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) {
            total += (b - a) / denom;
        }
    }
    return total / static_cast<double>(n);
}

double dunn(const RowMatrix& data, const ClusterModel& model)
{
    require_fitted(data, model);
    if (model.k < 2) {
        undefined("dunn", "needs k >= 2");
    }
    double minSeparation = std::numeric_limits<double>::infinity();
    double maxDiameter   = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < data.rows(); ++j) {
            const double dist = row_distance(data, i, data, j);
            if (model.assignment[static_cast<std::size_t>(i)] == model.assignment[static_cast<std::size_t>(j)]) {
                maxDiameter = std::max(maxDiameter, dist);
            } else {
                minSeparation = std::min(minSeparation, dist);
            }
        }
    }
    if (maxDiameter == 0.0) {
        undefined("dunn", "every cluster has zero diameter");
    }
    return minSeparation / maxDiameter;
}

double hartigan(const ClusterModel& model, const ClusterModel& next)
{
    if (next.k != model.k + 1 || next.assignment.size() != model.assignment.size()) {
        throw Error(ErrorKind::Domain, "Hartigan index needs fits at k and k+1 on the same data");
    }
    const auto n = static_cast<double>(model.assignment.size());
    if (next.within_ss == 0.0) {
        undefined("hartigan", "zero within-cluster sum of squares at k+1");
    }
    return (model.within_ss / next.within_ss - 1.0) * (n - static_cast<double>(model.k) - 1.0);
}

double validity_index(const RowMatrix& data, const ClusterModel& model, ValidityIndex kind)
{
    switch (kind) {
    case ValidityIndex::CalinskiHarabasz: return calinski_harabasz(data, model);
    case ValidityIndex::DaviesBouldin: return davies_bouldin(data, model);
    case ValidityIndex::Silhouette: return silhouette(data, model);
    case ValidityIndex::Dunn: return dunn(data, model);
    case ValidityIndex::Hartigan: undefined("hartigan", "requires the fit at k+1; use hartigan(model, next)");
    }
    undefined("index", "unknown kind");
}

void KVoteConfig::validate(std::size_t n) const
{
    if (k_min < 2) {
        throw Error(ErrorKind::Domain, "k_min must be >= 2");
    }
    if (k_min > k_max) {
        throw Error(ErrorKind::Domain, "k_min = " + std::to_string(k_min) + " exceeds k_max = " + std::to_string(k_max));
    }
    if (static_cast<std::size_t>(k_max) >= n) {
        throw Error(ErrorKind::Domain, "k_max = " + std::to_string(k_max) + " must be below n = " + std::to_string(n));
    }
    if (indices.empty()) {
        throw Error(ErrorKind::Domain, "at least one validity index is required");
    }
}

KVoteResult vote_k(const RowMatrix& data, const KVoteConfig& cfg)
{
    const auto n = static_cast<std::size_t>(data.rows());
    cfg.validate(n);

    const bool wantsElbow = std::find(cfg.indices.begin(), cfg.indices.end(), ValidityIndex::Hartigan) != cfg.indices.end();
    const int kLo         = wantsElbow ? cfg.k_min - 1 : cfg.k_min;
    const int kHi         = wantsElbow ? std::min(cfg.k_max + 1, static_cast<int>(n)) : cfg.k_max;

    std::map<int, ClusterModel> fits;
    for (int k = kLo; k <= kHi; ++k) {
        KMeansConfig km = cfg.kmeans;
        km.k            = k;
        km.seed         = derive_seed(cfg.seed, static_cast<uint64_t>(k));
        fits.emplace(k, kmeans_fit(data, km));
    }

    KVoteResult result;
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
        result.votes[k] = 0;
        auto& row       = result.scores[k];
        for (auto idx : cfg.indices) {
            try {
                if (idx == ValidityIndex::Hartigan) {
                    auto next = fits.find(k + 1);
                    if (next != fits.end()) {
                        row[idx] = hartigan(fits.at(k), next->second);
                    }
                } else {
                    row[idx] = validity_index(data, fits.at(k), idx);
                }
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::IndexUndefined) {
                    throw;
                }
            }
        }
    }

    std::map<int, double> hartiganPrev;
    if (wantsElbow) {
        // H(k_min - 1) is needed for the first jump.
        try {
            hartiganPrev[cfg.k_min - 1] = hartigan(fits.at(cfg.k_min - 1), fits.at(cfg.k_min));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::IndexUndefined) {
                throw;
            }
        }
    }

    for (auto idx : cfg.indices) {
        std::optional<int> bestK;
        double bestScore = 0.0;
        for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
            const auto& row = result.scores[k];
            auto it         = row.find(idx);
            if (it == row.end()) {
                continue;
            }
            double score = it->second;
            const auto pref = preference(idx);
            if (pref == Preference::Elbow) {
                double prev;
                if (k == cfg.k_min) {
                    auto p = hartiganPrev.find(k - 1);
                    if (p == hartiganPrev.end()) {
                        continue;
                    }
                    prev = p->second;
                } else {
                    auto p = result.scores[k - 1].find(idx);
                    if (p == result.scores[k - 1].end()) {
                        continue;
                    }
                    prev = p->second;
                }
                score = std::abs(score - prev);
            } else if (pref == Preference::Minimize) {
                score = -score;
            }
            if (std::isnan(score)) {
                continue;
            }
            if (!bestK || score > bestScore) {
                bestK     = k;
                bestScore = score;
            }
        }
        if (bestK) {
            result.per_index[idx] = *bestK;
            ++result.votes[*bestK];
        }
    }

    if (result.per_index.empty()) {
        throw Error(ErrorKind::Voting, "no validity index is defined for any k in [" + std::to_string(cfg.k_min) + ", " + std::to_string(cfg.k_max) + "]");
    }

    int bestVotes = -1;
    for (const auto& [k, count] : result.votes) {
        if (count > bestVotes) {
            bestVotes     = count;
            result.k_best = k;
        }
    }
    return result;
}

RowMatrix project_2d(const RowMatrix& data)
{
    if (data.cols() < 2) {
        throw Error(ErrorKind::Domain, "projection needs at least 2 columns");
    }
    if (data.rows() < 2) {
        throw Error(ErrorKind::Domain, "projection needs at least 2 rows");
    }

    const Eigen::RowVectorXd mean = data.colwise().mean();
    const Eigen::MatrixXd centered = data.rowwise() - mean;
    const Eigen::MatrixXd cov      = (centered.transpose() * centered) / static_cast<double>(data.rows() - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::DegenerateData, "eigendecomposition of the covariance failed");
    }

    // Eigenvalues come in ascending order.
    const auto d = cov.cols();
    Eigen::MatrixXd basis(d, 2);
    basis.col(0) = solver.eigenvectors().col(d - 1);
    basis.col(1) = solver.eigenvectors().col(d - 2);
    for (Eigen::Index c = 0; c < 2; ++c) {
        Eigen::Index pivot = 0;
        basis.col(c).cwiseAbs().maxCoeff(&pivot);
        if (basis(pivot, c) < 0.0) {
            basis.col(c) *= -1.0;
        }
    }
    return centered * basis;
}

}
