#include "dsw/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsw/error.hpp"
#include "dsw/rng.hpp"

namespace dsw::models {

namespace {

std::size_t check_training_input(const Matrix& X, const Labels& y) {
    if (X.empty()) throw Error(Errc::EmptyTrainingSet, "no training rows");
    if (X.size() != y.size())
        throw Error(Errc::DimensionMismatch, "label count does not match row count");
    const std::size_t d = X.front().size();
    if (d == 0) throw Error(Errc::DimensionMismatch, "rows have no features");
    for (const auto& row : X) {
        if (row.size() != d) throw Error(Errc::DimensionMismatch, "ragged training matrix");
    }
    for (int label : y) {
        if (label != 0 && label != 1)
            throw Error(Errc::BadArgs, "labels must be 0 or 1");
    }
    return d;
}

// Weighted-Gini split quality as an exact rational. Minimizing the weighted
// child impurity equals maximizing (posL^2+negL^2)/nL + (posR^2+negR^2)/nR,
// kept as num/den in integers so ties are exact (counts stay well inside
// 64-bit range for any corpus this handles).
struct SplitScore {
    unsigned long long num = 0;
    unsigned long long den = 1;
};

bool score_greater(const SplitScore& a, const SplitScore& b) {
    return static_cast<unsigned __int128>(a.num) * b.den >
           static_cast<unsigned __int128>(b.num) * a.den;
}

int majority_label(std::size_t pos, std::size_t neg) {
    return pos > neg ? 1 : 0;  // tie -> 0
}

// Greedy Gini tree on 0/1 labels. features_per_split == 0 uses every
// feature; otherwise each node draws that many distinct features from rng.
class GiniTreeBuilder {
public:
    GiniTreeBuilder(const Matrix& X, const Labels& y, int max_depth, int min_samples_split,
                    int features_per_split, Rng* rng)
        : X_(X), y_(y), max_depth_(max_depth), min_samples_split_(min_samples_split),
          features_per_split_(features_per_split), rng_(rng) {}

    Tree build(std::vector<int> rows) {
        Tree tree;
        build_node(rows, 0, tree);
        return tree;
    }

private:
    int make_leaf(Tree& tree, double value) {
        tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, value});
        return static_cast<int>(tree.nodes.size()) - 1;
    }

    std::vector<int> candidate_features() {
        const int d = static_cast<int>(X_.front().size());
        std::vector<int> features(static_cast<std::size_t>(d));
        std::iota(features.begin(), features.end(), 0);
        if (features_per_split_ <= 0 || features_per_split_ >= d) return features;
        for (int i = 0; i < features_per_split_; ++i) {
            const auto j = i + static_cast<int>(rng_->below(static_cast<std::uint64_t>(d - i)));
            std::swap(features[static_cast<std::size_t>(i)], features[static_cast<std::size_t>(j)]);
        }
        features.resize(static_cast<std::size_t>(features_per_split_));
        std::sort(features.begin(), features.end());
        return features;
    }

    int build_node(std::vector<int>& rows, int depth, Tree& tree) {
        std::size_t pos = 0;
        for (int r : rows) pos += static_cast<std::size_t>(y_[static_cast<std::size_t>(r)]);
        const std::size_t neg = rows.size() - pos;

        if (pos == 0 || neg == 0) return make_leaf(tree, pos == 0 ? 0.0 : 1.0);
        if (depth >= max_depth_ || rows.size() < static_cast<std::size_t>(min_samples_split_))
            return make_leaf(tree, majority_label(pos, neg));

        bool found = false;
        int best_feature = -1;
        double best_threshold = 0.0;
        SplitScore best_score;

        std::vector<std::pair<double, int>> sorted;
        sorted.reserve(rows.size());
        for (int f : candidate_features()) {
            sorted.clear();
            for (int r : rows) {
                sorted.emplace_back(X_[static_cast<std::size_t>(r)][static_cast<std::size_t>(f)],
                                    y_[static_cast<std::size_t>(r)]);
            }
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            unsigned long long pos_left = 0;
            const std::size_t n = sorted.size();
            for (std::size_t i = 0; i + 1 < n; ++i) {
                pos_left += static_cast<unsigned long long>(sorted[i].second);
                if (sorted[i + 1].first == sorted[i].first) continue;  // not a boundary
                const unsigned long long n_left = i + 1;
                const unsigned long long n_right = n - n_left;
                const unsigned long long neg_left = n_left - pos_left;
                const unsigned long long pos_right = pos - pos_left;
                const unsigned long long neg_right = neg - neg_left;
                const SplitScore score{
                    (pos_left * pos_left + neg_left * neg_left) * n_right +
                        (pos_right * pos_right + neg_right * neg_right) * n_left,
                    n_left * n_right};
                // strict improvement keeps the first (lowest feature, lowest threshold)
                if (!found || score_greater(score, best_score)) {
                    found = true;
                    best_feature = f;
                    best_threshold = (sorted[i].first + sorted[i + 1].first) / 2.0;
                    best_score = score;
                }
            }
        }

        if (!found) return make_leaf(tree, majority_label(pos, neg));

        std::vector<int> left;
        std::vector<int> right;
        for (int r : rows) {
            const double v =
                X_[static_cast<std::size_t>(r)][static_cast<std::size_t>(best_feature)];
            (v <= best_threshold ? left : right).push_back(r);
        }
        // a midpoint between adjacent doubles can round onto the upper value
        if (left.empty() || right.empty()) return make_leaf(tree, majority_label(pos, neg));
        rows.clear();
        rows.shrink_to_fit();

        const int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        const int l = build_node(left, depth + 1, tree);
        const int r = build_node(right, depth + 1, tree);
        tree.nodes[static_cast<std::size_t>(idx)] = TreeNode{best_feature, best_threshold, l, r, 0.0};
        return idx;
    }

    const Matrix& X_;
    const Labels& y_;
    int max_depth_;
    int min_samples_split_;
    int features_per_split_;
    Rng* rng_;
};

// Regression tree on first/second-order gradients of the logistic loss.
// Leaf value is -G/(H+lambda), already scaled by the learning rate.
class GradientTreeBuilder {
public:
    GradientTreeBuilder(const Matrix& X, const std::vector<double>& grad,
                        const std::vector<double>& hess, double lambda, double leaf_scale,
                        int max_depth)
        : X_(X), grad_(grad), hess_(hess), lambda_(lambda), leaf_scale_(leaf_scale),
          max_depth_(max_depth) {}

    Tree build(std::vector<int> rows) {
        Tree tree;
        build_node(rows, 0, tree);
        return tree;
    }

private:
    int make_leaf(Tree& tree, double g, double h) {
        tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_scale_ * (-g / (h + lambda_))});
        return static_cast<int>(tree.nodes.size()) - 1;
    }

    int build_node(std::vector<int>& rows, int depth, Tree& tree) {
        double g_total = 0.0;
        double h_total = 0.0;
        for (int r : rows) {
            g_total += grad_[static_cast<std::size_t>(r)];
            h_total += hess_[static_cast<std::size_t>(r)];
        }
        if (depth >= max_depth_ || rows.size() < 2) return make_leaf(tree, g_total, h_total);

        const double parent_score = g_total * g_total / (h_total + lambda_);
        bool found = false;
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_gain = 1e-12;

        const int d = static_cast<int>(X_.front().size());
        std::vector<std::pair<double, int>> sorted;
        sorted.reserve(rows.size());
        for (int f = 0; f < d; ++f) {
            sorted.clear();
            for (int r : rows)
                sorted.emplace_back(X_[static_cast<std::size_t>(r)][static_cast<std::size_t>(f)], r);
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            double g_left = 0.0;
            double h_left = 0.0;
            const std::size_t n = sorted.size();
            for (std::size_t i = 0; i + 1 < n; ++i) {
                g_left += grad_[static_cast<std::size_t>(sorted[i].second)];
                h_left += hess_[static_cast<std::size_t>(sorted[i].second)];
                if (sorted[i + 1].first == sorted[i].first) continue;
                const double g_right = g_total - g_left;
                const double h_right = h_total - h_left;
                const double gain = g_left * g_left / (h_left + lambda_) +
                                    g_right * g_right / (h_right + lambda_) - parent_score;
                if (gain > best_gain) {
                    found = true;
                    best_feature = f;
                    best_threshold = (sorted[i].first + sorted[i + 1].first) / 2.0;
                    best_gain = gain;
                }
            }
        }

        if (!found) return make_leaf(tree, g_total, h_total);

        std::vector<int> left;
        std::vector<int> right;
        for (int r : rows) {
            const double v =
                X_[static_cast<std::size_t>(r)][static_cast<std::size_t>(best_feature)];
            (v <= best_threshold ? left : right).push_back(r);
        }
        if (left.empty() || right.empty()) return make_leaf(tree, g_total, h_total);
        rows.clear();
        rows.shrink_to_fit();

        const int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        const int l = build_node(left, depth + 1, tree);
        const int r = build_node(right, depth + 1, tree);
        tree.nodes[static_cast<std::size_t>(idx)] = TreeNode{best_feature, best_threshold, l, r, 0.0};
        return idx;
    }

    const Matrix& X_;
    const std::vector<double>& grad_;
    const std::vector<double>& hess_;
    double lambda_;
    double leaf_scale_;
    int max_depth_;
};

std::vector<int> all_rows(std::size_t n) {
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double Tree::eval(const std::vector<double>& row) const {
    std::size_t idx = 0;
    for (;;) {
        const TreeNode& node = nodes[idx];
        if (node.feature < 0) return node.value;
        idx = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold
                                           ? node.left
                                           : node.right);
    }
}

const char* estimator_kind_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Tree: return "tree";
        case EstimatorKind::Forest: return "forest";
        case EstimatorKind::Boost: return "boost";
        case EstimatorKind::Svm: return "svm";
    }
    return "unknown";
}

const char* eval_metric_name(EvalMetric metric) {
    return metric == EvalMetric::Auc ? "auc" : "logloss";
}

EvalMetric eval_metric_from_name(const std::string& name) {
    if (name == "auc") return EvalMetric::Auc;
    if (name == "logloss") return EvalMetric::Logloss;
    throw Error(Errc::BadSpec, "unknown eval metric '" + name + "'");
}

const char* kernel_name(Kernel kind) { return kind == Kernel::Rbf ? "rbf" : "linear"; }

Kernel kernel_from_name(const std::string& name) {
    if (name == "rbf") return Kernel::Rbf;
    if (name == "linear") return Kernel::Linear;
    throw Error(Errc::BadSpec, "unknown kernel '" + name + "'");
}

EstimatorKind FittedModel::kind() const {
    return static_cast<EstimatorKind>(impl.index());
}

Labels FittedModel::predict(const Matrix& X) const {
    Labels out;
    out.reserve(X.size());
    for (const auto& row : X) {
        if (row.size() != n_features)
            throw Error(Errc::DimensionMismatch,
                        "probe row has " + std::to_string(row.size()) + " features, model expects " +
                            std::to_string(n_features));
        if (const auto* m = std::get_if<TreeModel>(&impl)) {
            out.push_back(m->tree.eval(row) > 0.5 ? 1 : 0);
        } else if (const auto* m = std::get_if<ForestModel>(&impl)) {
            std::size_t ones = 0;
            for (const Tree& tree : m->trees) ones += tree.eval(row) > 0.5 ? 1 : 0;
            out.push_back(2 * ones > m->trees.size() ? 1 : 0);  // tie -> 0
        } else if (const auto* m = std::get_if<BoostModel>(&impl)) {
            double score = m->base_score;
            for (const Tree& tree : m->trees) score += tree.eval(row);
            out.push_back(score > 0.0 ? 1 : 0);
        } else {
            const auto& svm = std::get<SvmModel>(impl);
            out.push_back(svm.decision_value(row) > 0.0 ? 1 : 0);
        }
    }
    return out;
}

FittedModel fit_tree(const Matrix& X, const Labels& y, const TreeParams& params,
                     std::vector<std::string> feature_keys) {
    const std::size_t d = check_training_input(X, y);
    if (X.size() < 2) throw Error(Errc::EmptyTrainingSet, "need at least 2 training rows");
    if (params.max_depth < 1) throw Error(Errc::BadSpec, "max_depth must be >= 1");
    if (params.min_samples_split < 1) throw Error(Errc::BadSpec, "min_samples_split must be >= 1");

    GiniTreeBuilder builder(X, y, params.max_depth, params.min_samples_split, 0, nullptr);
    FittedModel model;
    model.impl = TreeModel{params, builder.build(all_rows(X.size()))};
    model.n_features = d;
    model.feature_keys = std::move(feature_keys);
    model.seed = params.seed;
    return model;
}

FittedModel fit_forest(const Matrix& X, const Labels& y, const ForestParams& params,
                       std::vector<std::string> feature_keys) {
    const std::size_t d = check_training_input(X, y);
    if (X.size() < 2) throw Error(Errc::EmptyTrainingSet, "need at least 2 training rows");
    if (params.n_trees < 1) throw Error(Errc::BadSpec, "n_trees must be >= 1");
    if (params.max_depth < 1) throw Error(Errc::BadSpec, "max_depth must be >= 1");
    const int fps = params.features_per_split == 0
                        ? static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))))
                        : params.features_per_split;
    if (fps < 1 || fps > static_cast<int>(d))
        throw Error(Errc::BadSpec, "features_per_split must lie in [1, n_features]");

    ForestModel forest;
    forest.params = params;
    forest.features_per_split = fps;
    forest.trees.reserve(static_cast<std::size_t>(params.n_trees));
    const std::size_t n = X.size();
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
        std::vector<int> rows;
        if (params.bootstrap) {
            rows.reserve(n);
            for (std::size_t i = 0; i < n; ++i)
                rows.push_back(static_cast<int>(rng.below(n)));
        } else {
            rows = all_rows(n);
        }
        GiniTreeBuilder builder(X, y, params.max_depth, 2,
                                fps == static_cast<int>(d) ? 0 : fps, &rng);
        forest.trees.push_back(builder.build(std::move(rows)));
    }

    FittedModel model;
    model.impl = std::move(forest);
    model.n_features = d;
    model.feature_keys = std::move(feature_keys);
    model.seed = params.seed;
    return model;
}

FittedModel fit_boost(const Matrix& X, const Labels& y, const BoostParams& params,
                      std::vector<std::string> feature_keys) {
    const std::size_t d = check_training_input(X, y);
    if (params.n_estimators < 1) throw Error(Errc::BadSpec, "n_estimators must be >= 1");
    if (!(params.learning_rate >= 0.0 && params.learning_rate <= 1.0))
        throw Error(Errc::BadSpec, "learning_rate must lie in [0,1]");
    if (params.max_depth < 1) throw Error(Errc::BadSpec, "max_depth must be >= 1");
    if (params.leaf_regularization < 0.0)
        throw Error(Errc::BadSpec, "leaf_regularization must be >= 0");

    const std::size_t n = X.size();
    std::size_t pos = 0;
    for (int label : y) pos += static_cast<std::size_t>(label);
    if (pos == 0 || pos == n)
        throw Error(Errc::SingleClassTraining, "boosting needs both classes in training data");

    BoostModel boost;
    boost.params = params;
    boost.base_score = std::log(static_cast<double>(pos) / static_cast<double>(n - pos));
    boost.trees.reserve(static_cast<std::size_t>(params.n_estimators));

    std::vector<double> scores(n, boost.base_score);
    std::vector<double> grad(n);
    std::vector<double> hess(n);
    for (int round = 0; round < params.n_estimators; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(scores[i]);
            grad[i] = p - static_cast<double>(y[i]);
            hess[i] = p * (1.0 - p);
        }
        GradientTreeBuilder builder(X, grad, hess, params.leaf_regularization,
                                    params.learning_rate, params.max_depth);
        Tree tree = builder.build(all_rows(n));
        for (std::size_t i = 0; i < n; ++i) scores[i] += tree.eval(X[i]);
        boost.trees.push_back(std::move(tree));
        boost.metric_log.push_back(params.eval_metric == EvalMetric::Logloss ? logloss(scores, y)
                                                                             : auc(scores, y));
    }

    FittedModel model;
    model.impl = std::move(boost);
    model.n_features = d;
    model.feature_keys = std::move(feature_keys);
    model.seed = params.seed;
    return model;
}

double kernel_eval(Kernel kind, double gamma, const std::vector<double>& a,
                   const std::vector<double>& b) {
    if (a.size() != b.size())
        throw Error(Errc::DimensionMismatch, "kernel arguments differ in length");
    if (kind == Kernel::Linear) {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
        return dot;
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sq += diff * diff;
    }
    return std::exp(-gamma * sq);
}

double logloss(const std::vector<double>& scores, const Labels& y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double p = std::clamp(sigmoid(scores[i]), 1e-12, 1.0 - 1e-12);
        sum += y[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    return scores.empty() ? 0.0 : sum / static_cast<double>(scores.size());
}

double auc(const std::vector<double>& scores, const Labels& y) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (y[order[k]] == 1) {
                rank_sum_pos += avg_rank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return 0.5;
    return (rank_sum_pos - static_cast<double>(n_pos) * static_cast<double>(n_pos + 1) / 2.0) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace dsw::models
