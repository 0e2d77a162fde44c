#pragma once

#include "regio/kmeans.hpp"
#include "regio/matrix.hpp"
#include "regio/model.hpp"
#include "regio/rng.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace testing {

using regio::RowMatrix;

struct Labeled
{
    RowMatrix data;
    std::vector<int> labels;
};

/// k Gaussian blobs of `per` points each, centres uniform in [0, side]^d and
/// pairwise at least `min_sep` apart.
inline Labeled gaussian_blobs(int k, int per, int d, double sigma, double min_sep, double side, uint64_t seed)
{
    regio::Rng rng(seed);
    std::vector<std::vector<double>> centres;
    while (static_cast<int>(centres.size()) < k) {
        std::vector<double> c(static_cast<std::size_t>(d));
        for (auto& x : c) {
            x = rng.uniform(0.0, side);
        }
        bool ok = true;
        for (const auto& o : centres) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) {
                s += (c[j] - o[j]) * (c[j] - o[j]);
            }
            ok = ok && std::sqrt(s) >= min_sep;
        }
        if (ok) {
            centres.push_back(c);
        }
    }
    Labeled out;
    out.data.resize(k * per, d);
    for (int i = 0; i < k * per; ++i) {
        const int c = i % k;
        out.labels.push_back(c);
        for (int j = 0; j < d; ++j) {
            out.data(i, j) = rng.normal(centres[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)], sigma);
        }
    }
    return out;
}

inline RowMatrix uniform_points(int n, int d, uint64_t seed)
{
    regio::Rng rng(seed);
    RowMatrix m(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            m(i, j) = rng.uniform();
        }
    }
    return m;
}

inline double adjusted_rand(const std::vector<int>& a, const std::vector<int>& b)
{
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1;
        ra[a[i]] += 1;
        rb[b[i]] += 1;
    }
    auto c2    = [](double x) { return x * (x - 1) / 2; };
    double sij = 0, sa = 0, sb = 0;
    for (const auto& [_, v] : joint) {
        sij += c2(v);
    }
    for (const auto& [_, v] : ra) {
        sa += c2(v);
    }
    for (const auto& [_, v] : rb) {
        sb += c2(v);
    }
    const double expected = sa * sb / c2(static_cast<double>(a.size()));
    const double maxIndex = (sa + sb) / 2;
    if (maxIndex == expected) {
        return 1.0;
    }
    return (sij - expected) / (maxIndex - expected);
}

/// Lowest within-cluster sum of squares over every partition of the rows into
/// exactly k non-empty groups (restricted growth strings).
inline double brute_force_within(const RowMatrix& data, int k)
{
    const int n = static_cast<int>(data.rows());
    std::vector<int> label(static_cast<std::size_t>(n), 0);
    double best = std::numeric_limits<double>::infinity();

    auto cost = [&] {
        double w = 0.0;
        for (int c = 0; c < k; ++c) {
            Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(data.cols());
            int size                = 0;
            for (int i = 0; i < n; ++i) {
                if (label[i] == c) {
                    mean += data.row(i);
                    ++size;
                }
            }
            mean /= size;
            for (int i = 0; i < n; ++i) {
                if (label[i] == c) {
                    w += (data.row(i) - mean).squaredNorm();
                }
            }
        }
        return w;
    };

    auto recurse = [&](auto&& self, int i, int used) -> void {
        if (n - i < k - used) {
            return;
        }
        if (i == n) {
            if (used == k) {
                best = std::min(best, cost());
            }
            return;
        }
        for (int c = 0; c <= std::min(used, k - 1); ++c) {
            label[i] = c;
            self(self, i + 1, std::max(used, c + 1));
        }
    };
    recurse(recurse, 0, 0);
    return best;
}

inline regio::IndicatorTable make_table(const std::vector<std::string>& names, const std::vector<std::vector<std::optional<double>>>& columns)
{
    const std::size_t n = columns.empty() ? 0 : columns.front().size();
    std::vector<regio::TerritoryId> rows;
    for (std::size_t i = 0; i < n; ++i) {
        char code[8];
        std::snprintf(code, sizeof code, "XX%03zu", i + 100);
        rows.emplace_back(code);
    }
    std::vector<regio::IndicatorDef> defs;
    for (const auto& name : names) {
        defs.push_back({name, regio::IndicatorKind::NonEnergy, "", regio::NormalizationBasis::None});
    }
    regio::IndicatorTable t(rows, defs);
    for (std::size_t j = 0; j < columns.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            t.set(i, j, columns[j][i]);
        }
    }
    return t;
}

}
