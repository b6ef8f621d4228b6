#pragma once

#include <cstdint>
#include <vector>

#include "grfg/dataset.hpp"
#include "grfg/rng.hpp"

namespace grfg {

struct Metrics {
    double one_minus_rae = 0.0;
    double one_minus_mae = 0.0;
    double one_minus_mse = 0.0;
};

// 1-RAE = 1 - sum|y-yhat| / sum|y-ybar|; the MAE/MSE terms use mean forms by
// default, raw sums when paper_literal is set. Throws on length mismatch,
// n < 2, or constant y_true (RAE undefined).
Metrics compute_metrics(const std::vector<double>& y_true, const std::vector<double>& y_pred,
                        bool paper_literal = false);

struct ForestConfig {
    int n_trees = 100;
    int max_depth = 10;
    int min_samples_leaf = 2;
    std::uint64_t seed = 0;
    // features per split is always ceil(m/3); bootstrap always on
};

using ColumnView = std::vector<const std::vector<double>*>;

ColumnView column_view(const Dataset& d);

// CART regression tree, exact variance-reduction splits on sorted values.
class RegressionTree {
public:
    struct Options {
        int max_depth = 10;
        int min_samples_leaf = 2;
        int features_per_split = 0;  // <= 0: consider all features in order
    };

    void fit(const ColumnView& cols, const std::vector<double>& y,
             const std::vector<std::size_t>& rows, const Options& opt, Rng* rng);
    double predict_row(const ColumnView& cols, std::size_t row) const;
    const std::vector<double>& feature_gain() const { return feature_gain_; }

private:
    struct Node {
        int feature = -1;  // -1: leaf
        double threshold = 0.0;
        int left = -1, right = -1;
        double value = 0.0;
    };
    int build(const ColumnView& cols, const std::vector<double>& y, std::vector<std::size_t>& rows,
              std::size_t begin, std::size_t end, int depth, const Options& opt, Rng* rng);

    std::vector<Node> nodes_;
    std::vector<double> feature_gain_;
};

// Bagged forest of CART trees; per-tree RNG streams are derived from the
// seed, so results do not depend on evaluation order.
class RandomForest {
public:
    void fit(const ColumnView& cols, const std::vector<double>& y,
             const std::vector<std::size_t>& rows, const ForestConfig& cfg);
    double predict_row(const ColumnView& cols, std::size_t row) const;
    std::vector<double> predict(const ColumnView& cols, const std::vector<std::size_t>& rows) const;
    // Impurity-decrease importances, normalized to sum to 1.
    std::vector<double> importances() const;

private:
    std::vector<RegressionTree> trees_;
    std::size_t n_features_ = 0;
};

// Closed-form ridge on centered data; the penalty excludes the intercept, so
// lambda -> infinity shrinks predictions to the training mean.
class RidgeRegressor {
public:
    void fit(const ColumnView& cols, const std::vector<double>& y,
             const std::vector<std::size_t>& rows, double lambda);
    double predict_row(const ColumnView& cols, std::size_t row) const;
    std::vector<double> predict(const ColumnView& cols, const std::vector<std::size_t>& rows) const;

private:
    std::vector<double> weights_, feature_means_;
    double intercept_ = 0.0;
};

// Fixed 80/20 train/test split by seeded shuffle; reused unchanged for every
// iteration of a run. With a holdout, rows split 60/20/20.
struct EvalProtocol {
    std::vector<std::size_t> train_rows, test_rows, holdout_rows;
    std::uint64_t seed = 0;
    std::uint64_t split_hash = 0;

    static EvalProtocol make(std::size_t n, std::uint64_t seed, bool with_holdout = false);
};

enum class ModelKind { Forest, Ridge, Tree };

struct EvalConfig {
    ForestConfig forest;
    ModelKind model = ModelKind::Forest;
    double ridge_lambda = 1.0;
    int tree_depth = 10;
    bool paper_literal_metrics = false;
    int cv_folds = 0;  // 0: single fixed split
};

struct ScoreResult {
    Metrics metrics;   // on the test rows (or cv-averaged)
    double va = 0.0;   // 1-RAE, the downstream reward
};

// Fits on the protocol's train rows, scores the test rows. V_A is the test
// 1-RAE.
ScoreResult score_space(const Dataset& d, const EvalProtocol& protocol, const EvalConfig& cfg);
// Scores specific rows with a model fit on the protocol's train rows.
ScoreResult score_rows(const Dataset& d, const EvalProtocol& protocol, const EvalConfig& cfg,
                       const std::vector<std::size_t>& rows);
// K-fold cross-validated metrics over all rows (final-report variant).
ScoreResult score_space_cv(const Dataset& d, std::uint64_t seed, const EvalConfig& cfg, int folds);

}  // namespace grfg
