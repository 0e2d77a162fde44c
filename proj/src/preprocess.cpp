#include "regio/preprocess.hpp"
#include "regio/error.hpp"

#include <algorithm>
#include <cmath>

namespace regio {

void PreprocessConfig::validate() const
{
    if (!(missing_threshold > 0.0 && missing_threshold < 1.0)) {
        throw Error(ErrorKind::Domain, "missing_threshold must lie in (0,1)");
    }
    if (!(corr_threshold > 0.0 && corr_threshold < 1.0)) {
        throw Error(ErrorKind::Domain, "corr_threshold must lie in (0,1)");
    }
}

MissingPolicyResult apply_missing_policy(const IndicatorTable& table, const PreprocessConfig& cfg)
{
    cfg.validate();

    MissingPolicyResult result;
    const auto n = table.rows();
    if (n == 0) {
        throw Error(ErrorKind::Preprocessing, "indicator table has no rows");
    }

    std::vector<std::size_t> kept;
    std::vector<double> means;
    for (std::size_t j = 0; j < table.cols(); ++j) {
        const auto missing   = table.missing_count(j);
        const double fraction = static_cast<double>(missing) / static_cast<double>(n);
        if (fraction > cfg.missing_threshold) {
            result.dropped.push_back({table.indicators()[j].id, missing, fraction});
            continue;
        }
        if (missing == n) {
            throw Error(ErrorKind::Preprocessing, "indicator '" + table.indicators()[j].id + "' has no observed values");
        }

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (const auto& v = table.at(i, j)) {
                sum += *v;
            }
        }
        kept.push_back(j);
        means.push_back(sum / static_cast<double>(n - missing));
    }

    result.table = table.select_columns(kept);
    for (std::size_t c = 0; c < kept.size(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!result.table.at(i, c).has_value()) {
                result.table.set(i, c, means[c]);
                result.imputed.push_back({table.territories()[i].code, result.table.indicators()[c].id, means[c]});
            }
        }
    }
    return result;
}

double pearson(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.size() < 2) {
        throw Error(ErrorKind::Domain, "correlation needs two equally sized samples of length >= 2");
    }
    const auto n = static_cast<double>(a.size());
    double ma    = 0.0;
    double mb    = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;

    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw Error(ErrorKind::DegenerateData, "correlation undefined for a constant column");
    }
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

namespace {

std::vector<double> dense_column(const IndicatorTable& table, std::size_t col)
{
    std::vector<double> out;
    out.reserve(table.rows());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto& v = table.at(i, col);
        if (!v) {
            throw Error(ErrorKind::Preprocessing, "missing cell in '" + table.indicators()[col].id + "'; apply the missing-value policy first");
        }
        out.push_back(*v);
    }
    return out;
}

bool is_constant(const std::vector<double>& v)
{
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}

PruneResult prune_correlated(const IndicatorTable& table, const PreprocessConfig& cfg)
{
    cfg.validate();

    PruneResult result;
    std::vector<std::vector<double>> columns;
    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < table.cols(); ++j) {
        auto col = dense_column(table, j);
        if (table.rows() < 2 || is_constant(col)) {
            result.zero_variance.push_back(table.indicators()[j].id);
        } else {
            candidates.push_back(j);
        }
        columns.push_back(std::move(col));
    }

    // Dropping a column leaves every other pair's r unchanged, so one ordered
    // pass equals repeated "drop later column of the first offending pair".
    std::vector<std::size_t> kept;
    for (auto j : candidates) {
        bool drop = false;
        for (auto i : kept) {
            const double r = pearson(columns[i], columns[j]);
            if (std::abs(r) > cfg.corr_threshold) {
                result.dropped.push_back({table.indicators()[i].id, table.indicators()[j].id, r});
                drop = true;
                break;
            }
        }
        if (!drop) {
            kept.push_back(j);
        }
    }

    result.table = table.select_columns(kept);
    return result;
}

StandardizedMatrix standardize(const IndicatorTable& table)
{
    const auto n = table.rows();
    const auto d = table.cols();
    if (n < 2) {
        throw Error(ErrorKind::Preprocessing, "standardization needs at least 2 rows");
    }

    StandardizedMatrix out;
    out.rows = table.territories();
    out.cols.reserve(d);
    out.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    out.col_means.resize(static_cast<Eigen::Index>(d));
    out.col_stds.resize(static_cast<Eigen::Index>(d));

    for (std::size_t j = 0; j < d; ++j) {
        const auto& id = table.indicators()[j].id;
        out.cols.push_back(id);
        const auto col = dense_column(table, j);

        double mean = 0.0;
        for (double v : col) {
            mean += v;
        }
        mean /= static_cast<double>(n);

        double ss = 0.0;
        for (double v : col) {
            ss += (v - mean) * (v - mean);
        }
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (is_constant(col) || !(sd > 0.0) || !std::isfinite(sd)) {
            throw Error(ErrorKind::Preprocessing, "indicator '" + id + "' has zero variance and cannot be standardized");
        }

        const auto jj = static_cast<Eigen::Index>(j);
        for (std::size_t i = 0; i < n; ++i) {
            out.data(static_cast<Eigen::Index>(i), jj) = (col[i] - mean) / sd;
        }
        out.col_means(jj) = mean;
        out.col_stds(jj)  = sd;
    }
    return out;
}

RowMatrix StandardizedMatrix::inverse() const
{
    RowMatrix x = data;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        x.col(j) = x.col(j).array() * col_stds(j) + col_means(j);
    }
    return x;
}

}
