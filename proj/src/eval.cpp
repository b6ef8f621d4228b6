#include "grfg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace grfg {

Metrics compute_metrics(const std::vector<double>& y_true, const std::vector<double>& y_pred,
                        bool paper_literal) {
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("compute_metrics: length mismatch");
    }
    const std::size_t n = y_true.size();
    if (n < 2) throw std::invalid_argument("compute_metrics: need at least 2 samples");

    double mean = 0.0;
    for (double v : y_true) mean += v;
    mean /= static_cast<double>(n);

    double abs_err = 0.0, sq_err = 0.0, abs_dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y_true[i] - y_pred[i];
        abs_err += std::fabs(e);
        sq_err += e * e;
        abs_dev += std::fabs(y_true[i] - mean);
    }
    if (abs_dev == 0.0) {
        throw std::invalid_argument("compute_metrics: constant y_true, RAE undefined");
    }

    Metrics m;
    m.one_minus_rae = 1.0 - abs_err / abs_dev;
    if (paper_literal) {
        m.one_minus_mae = 1.0 - abs_err;
        m.one_minus_mse = 1.0 - sq_err;
    } else {
        m.one_minus_mae = 1.0 - abs_err / static_cast<double>(n);
        m.one_minus_mse = 1.0 - sq_err / static_cast<double>(n);
    }
    return m;
}

ColumnView column_view(const Dataset& d) {
    ColumnView cols;
    cols.reserve(d.n_descriptors());
    for (const auto& c : d.columns()) cols.push_back(&c.values);
    return cols;
}

namespace {

struct NodeStats {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t count = 0;

    void add(double y) {
        sum += y;
        sum_sq += y * y;
        ++count;
    }
    double sse() const {
        return count == 0 ? 0.0 : sum_sq - sum * sum / static_cast<double>(count);
    }
    double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
};

constexpr double kMinGain = 1e-12;

}  // namespace

int RegressionTree::build(const ColumnView& cols, const std::vector<double>& y,
                          std::vector<std::size_t>& rows, std::size_t begin, std::size_t end,
                          int depth, const Options& opt, Rng* rng) {
    NodeStats total;
    for (std::size_t i = begin; i < end; ++i) total.add(y[rows[i]]);

    const std::size_t k = end - begin;
    int node_id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[node_id].value = total.mean();

    if (depth >= opt.max_depth || k < 2 * static_cast<std::size_t>(opt.min_samples_leaf) ||
        total.sse() <= kMinGain) {
        return node_id;
    }

    const std::size_t m = cols.size();
    // candidate features, optionally a random subset
    std::vector<std::size_t> feats(m);
    std::iota(feats.begin(), feats.end(), 0);
    std::size_t n_try = m;
    if (opt.features_per_split > 0 && static_cast<std::size_t>(opt.features_per_split) < m) {
        n_try = static_cast<std::size_t>(opt.features_per_split);
        for (std::size_t i = 0; i < n_try; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, m - 1);
            std::swap(feats[i], feats[pick(*rng)]);
        }
    }

    double best_gain = 0.0;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    bool found = false;

    std::vector<std::size_t> order(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                   rows.begin() + static_cast<std::ptrdiff_t>(end));
    for (std::size_t fi = 0; fi < n_try; ++fi) {
        const std::size_t f = feats[fi];
        const std::vector<double>& col = *cols[f];
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (col[a] != col[b]) return col[a] < col[b];
            return a < b;
        });

        NodeStats left;
        for (std::size_t i = 0; i + 1 < k; ++i) {
            left.add(y[order[i]]);
            if (col[order[i]] == col[order[i + 1]]) continue;
            std::size_t nl = i + 1, nr = k - nl;
            if (nl < static_cast<std::size_t>(opt.min_samples_leaf) ||
                nr < static_cast<std::size_t>(opt.min_samples_leaf)) {
                continue;
            }
            NodeStats right;
            right.sum = total.sum - left.sum;
            right.sum_sq = total.sum_sq - left.sum_sq;
            right.count = nr;
            double gain = total.sse() - left.sse() - right.sse();
            if (gain > best_gain + kMinGain) {
                best_gain = gain;
                best_feature = f;
                best_threshold = 0.5 * (col[order[i]] + col[order[i + 1]]);
                found = true;
            }
        }
    }
    if (!found) return node_id;

    feature_gain_[best_feature] += best_gain;

    // partition rows (order-preserving) around the threshold
    std::vector<std::size_t> left_rows, right_rows;
    const std::vector<double>& col = *cols[best_feature];
    for (std::size_t i = begin; i < end; ++i) {
        if (col[rows[i]] <= best_threshold) left_rows.push_back(rows[i]);
        else right_rows.push_back(rows[i]);
    }
    std::copy(left_rows.begin(), left_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(begin));
    std::copy(right_rows.begin(), right_rows.end(),
              rows.begin() + static_cast<std::ptrdiff_t>(begin + left_rows.size()));

    nodes_[node_id].feature = static_cast<int>(best_feature);
    nodes_[node_id].threshold = best_threshold;
    int left_id = build(cols, y, rows, begin, begin + left_rows.size(), depth + 1, opt, rng);
    int right_id = build(cols, y, rows, begin + left_rows.size(), end, depth + 1, opt, rng);
    nodes_[node_id].left = left_id;
    nodes_[node_id].right = right_id;
    return node_id;
}

void RegressionTree::fit(const ColumnView& cols, const std::vector<double>& y,
                         const std::vector<std::size_t>& rows, const Options& opt, Rng* rng) {
    if (cols.empty()) throw std::invalid_argument("RegressionTree: no features");
    if (rows.size() < 2) throw std::invalid_argument("RegressionTree: need at least 2 rows");
    nodes_.clear();
    feature_gain_.assign(cols.size(), 0.0);
    std::vector<std::size_t> work = rows;
    build(cols, y, work, 0, work.size(), 0, opt, rng);
}

double RegressionTree::predict_row(const ColumnView& cols, std::size_t row) const {
    int id = 0;
    while (nodes_[id].feature >= 0) {
        const double v = (*cols[nodes_[id].feature])[row];
        id = v <= nodes_[id].threshold ? nodes_[id].left : nodes_[id].right;
    }
    return nodes_[id].value;
}

void RandomForest::fit(const ColumnView& cols, const std::vector<double>& y,
                       const std::vector<std::size_t>& rows, const ForestConfig& cfg) {
    if (cfg.n_trees < 1) throw std::invalid_argument("RandomForest: n_trees must be >= 1");
    n_features_ = cols.size();
    trees_.assign(cfg.n_trees, {});

    RegressionTree::Options opt;
    opt.max_depth = cfg.max_depth;
    opt.min_samples_leaf = cfg.min_samples_leaf;
    opt.features_per_split =
        static_cast<int>((cols.size() + 2) / 3);  // ceil(m/3)

    for (int t = 0; t < cfg.n_trees; ++t) {
        Rng rng(splitmix64(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (t + 1))));
        std::vector<std::size_t> boot(rows.size());
        std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
        for (auto& b : boot) b = rows[pick(rng)];
        trees_[t].fit(cols, y, boot, opt, &rng);
    }
}

double RandomForest::predict_row(const ColumnView& cols, std::size_t row) const {
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict_row(cols, row);
    return sum / static_cast<double>(trees_.size());
}

std::vector<double> RandomForest::predict(const ColumnView& cols,
                                          const std::vector<std::size_t>& rows) const {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = predict_row(cols, rows[i]);
    return out;
}

std::vector<double> RandomForest::importances() const {
    std::vector<double> total(n_features_, 0.0);
    for (const auto& t : trees_) {
        const auto& g = t.feature_gain();
        for (std::size_t f = 0; f < n_features_; ++f) total[f] += g[f];
    }
    double sum = std::accumulate(total.begin(), total.end(), 0.0);
    if (sum <= 0.0) {
        std::fill(total.begin(), total.end(), 1.0 / static_cast<double>(n_features_));
        return total;
    }
    for (double& v : total) v /= sum;
    return total;
}

namespace {

// Symmetric solve via Gaussian elimination with partial pivoting; m is small.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t m = b.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        }
        if (std::fabs(a[piv][col]) < 1e-300) {
            throw std::runtime_error("ridge: singular normal equations");
        }
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < m; ++r) {
            double factor = a[r][col] / a[col][col];
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < m; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> x(m, 0.0);
    for (std::size_t r = m; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < m; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return x;
}

}  // namespace

void RidgeRegressor::fit(const ColumnView& cols, const std::vector<double>& y,
                         const std::vector<std::size_t>& rows, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("ridge: negative lambda");
    if (rows.size() < 2) throw std::invalid_argument("ridge: need at least 2 rows");
    const std::size_t m = cols.size();
    const double n = static_cast<double>(rows.size());

    feature_means_.assign(m, 0.0);
    double y_mean = 0.0;
    for (std::size_t r : rows) y_mean += y[r];
    y_mean /= n;
    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t r : rows) feature_means_[f] += (*cols[f])[r];
        feature_means_[f] /= n;
    }

    std::vector<std::vector<double>> gram(m, std::vector<double>(m, 0.0));
    std::vector<double> xty(m, 0.0);
    for (std::size_t r : rows) {
        for (std::size_t i = 0; i < m; ++i) {
            double xi = (*cols[i])[r] - feature_means_[i];
            xty[i] += xi * (y[r] - y_mean);
            for (std::size_t j = i; j < m; ++j) {
                gram[i][j] += xi * ((*cols[j])[r] - feature_means_[j]);
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < i; ++j) gram[i][j] = gram[j][i];
        gram[i][i] += lambda;
    }
    weights_ = solve_linear(std::move(gram), std::move(xty));
    intercept_ = y_mean;
}

double RidgeRegressor::predict_row(const ColumnView& cols, std::size_t row) const {
    double acc = intercept_;
    for (std::size_t f = 0; f < weights_.size(); ++f) {
        acc += weights_[f] * ((*cols[f])[row] - feature_means_[f]);
    }
    return acc;
}

std::vector<double> RidgeRegressor::predict(const ColumnView& cols,
                                            const std::vector<std::size_t>& rows) const {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = predict_row(cols, rows[i]);
    return out;
}

EvalProtocol EvalProtocol::make(std::size_t n, std::uint64_t seed, bool with_holdout) {
    if (n < 10) throw std::invalid_argument("EvalProtocol: need at least 10 rows");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i-- > 1;) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(perm[i], perm[pick(rng)]);
    }

    EvalProtocol p;
    p.seed = seed;
    std::size_t n_test = std::max<std::size_t>(1, n / 5);
    p.test_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::size_t train_start = n_test;
    if (with_holdout) {
        p.holdout_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test),
                              perm.begin() + static_cast<std::ptrdiff_t>(2 * n_test));
        train_start = 2 * n_test;
    }
    p.train_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_start), perm.end());
    std::sort(p.test_rows.begin(), p.test_rows.end());
    std::sort(p.holdout_rows.begin(), p.holdout_rows.end());
    std::sort(p.train_rows.begin(), p.train_rows.end());

    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::size_t v) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL;
        h *= 0x100000001b3ULL;
    };
    for (std::size_t v : p.test_rows) mix(v);
    mix(n);
    for (std::size_t v : p.holdout_rows) mix(v);
    p.split_hash = h;
    return p;
}

namespace {

std::vector<double> fit_predict(const Dataset& d, const std::vector<std::size_t>& train,
                                const std::vector<std::size_t>& rows, const EvalConfig& cfg) {
    ColumnView cols = column_view(d);
    switch (cfg.model) {
        case ModelKind::Forest: {
            RandomForest rf;
            rf.fit(cols, d.target(), train, cfg.forest);
            return rf.predict(cols, rows);
        }
        case ModelKind::Ridge: {
            RidgeRegressor ridge;
            ridge.fit(cols, d.target(), train, cfg.ridge_lambda);
            return ridge.predict(cols, rows);
        }
        case ModelKind::Tree: {
            RegressionTree tree;
            RegressionTree::Options opt;
            opt.max_depth = cfg.tree_depth;
            opt.min_samples_leaf = cfg.forest.min_samples_leaf;
            opt.features_per_split = 0;
            tree.fit(cols, d.target(), train, opt, nullptr);
            std::vector<double> out(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) out[i] = tree.predict_row(cols, rows[i]);
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

std::vector<double> gather(const std::vector<double>& v, const std::vector<std::size_t>& rows) {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
    return out;
}

}  // namespace

ScoreResult score_rows(const Dataset& d, const EvalProtocol& protocol, const EvalConfig& cfg,
                       const std::vector<std::size_t>& rows) {
    auto pred = fit_predict(d, protocol.train_rows, rows, cfg);
    ScoreResult r;
    r.metrics = compute_metrics(gather(d.target(), rows), pred, cfg.paper_literal_metrics);
    r.va = r.metrics.one_minus_rae;
    return r;
}

ScoreResult score_space(const Dataset& d, const EvalProtocol& protocol, const EvalConfig& cfg) {
    return score_rows(d, protocol, cfg, protocol.test_rows);
}

ScoreResult score_space_cv(const Dataset& d, std::uint64_t seed, const EvalConfig& cfg, int folds) {
    if (folds < 2) throw std::invalid_argument("score_space_cv: folds must be >= 2");
    const std::size_t n = d.n_samples();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(splitmix64(seed ^ 0xc5f01dULL));
    for (std::size_t i = n; i-- > 1;) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(perm[i], perm[pick(rng)]);
    }

    Metrics acc{0.0, 0.0, 0.0};
    for (int f = 0; f < folds; ++f) {
        std::vector<std::size_t> test, train;
        for (std::size_t i = 0; i < n; ++i) {
            if (static_cast<int>(i % static_cast<std::size_t>(folds)) == f) test.push_back(perm[i]);
            else train.push_back(perm[i]);
        }
        std::sort(test.begin(), test.end());
        std::sort(train.begin(), train.end());
        auto pred = fit_predict(d, train, test, cfg);
        Metrics m = compute_metrics(gather(d.target(), test), pred, cfg.paper_literal_metrics);
        acc.one_minus_rae += m.one_minus_rae;
        acc.one_minus_mae += m.one_minus_mae;
        acc.one_minus_mse += m.one_minus_mse;
    }
    ScoreResult r;
    r.metrics = {acc.one_minus_rae / folds, acc.one_minus_mae / folds, acc.one_minus_mse / folds};
    r.va = r.metrics.one_minus_rae;
    return r;
}

}  // namespace grfg
