#pragma once

#include "regio/matrix.hpp"
#include "regio/model.hpp"

#include <span>
#include <string>
#include <vector>

namespace regio {

struct PreprocessConfig
{
    /// Columns with a missing fraction strictly above this are dropped.
    double missing_threshold = 0.18;
    /// Pairs with |r| strictly above this lose their later column.
    double corr_threshold = 0.85;

    void validate() const;
};

struct DroppedColumn
{
    std::string indicator;
    std::size_t missing = 0;
    double fraction     = 0.0;
};

struct ImputedCell
{
    std::string territory;
    std::string indicator;
    double value = 0.0;
};

struct MissingPolicyResult
{
    IndicatorTable table;
    std::vector<DroppedColumn> dropped;
    std::vector<ImputedCell> imputed;
};

/// Drops sparse columns, then fills the remaining gaps with the column mean of
/// the observed cells. The output has no missing cells.
MissingPolicyResult apply_missing_policy(const IndicatorTable& table, const PreprocessConfig& cfg);

struct CorrelatedPair
{
    std::string kept;
    std::string dropped;
    double r = 0.0;
};

struct PruneResult
{
    IndicatorTable table;
    std::vector<CorrelatedPair> dropped;
    std::vector<std::string> zero_variance;
};

/// Pearson correlation; throws DegenerateData when either side is constant.
double pearson(std::span<const double> a, std::span<const double> b);

/// Removes constant columns, then walks columns in declared order dropping any
/// column whose |r| with an earlier kept column exceeds the threshold.
PruneResult prune_correlated(const IndicatorTable& table, const PreprocessConfig& cfg);

struct StandardizedMatrix
{
    std::vector<TerritoryId> rows;
    std::vector<std::string> cols;
    RowMatrix data;
    Eigen::VectorXd col_means;
    Eigen::VectorXd col_stds;

    /// Values back in original units.
    RowMatrix inverse() const;
};

/// z-scores per column using the sample (n-1) standard deviation.
StandardizedMatrix standardize(const IndicatorTable& table);

}
