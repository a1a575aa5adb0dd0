#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dsw/error.hpp"
#include "dsw/models.hpp"

using namespace dsw;
using namespace dsw::models;

namespace {

// Exhaustive split oracle: every (feature, midpoint) candidate, label counts
// recounted from scratch, weighted Gini compared as exact rationals. Must
// agree with the greedy builder on any fixture, ties included.
struct OracleSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
};

OracleSplit oracle_best_split(const Matrix& X, const Labels& y) {
    OracleSplit best;
    unsigned long long best_num = 0;
    unsigned long long best_den = 1;
    const std::size_t n = X.size();
    const std::size_t d = X.front().size();
    for (std::size_t f = 0; f < d; ++f) {
        std::vector<double> values;
        for (const auto& row : X) values.push_back(row[f]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t v = 0; v + 1 < values.size(); ++v) {
            const double threshold = (values[v] + values[v + 1]) / 2.0;
            unsigned long long pos_left = 0, neg_left = 0, pos_right = 0, neg_right = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (X[i][f] <= threshold) {
                    (y[i] == 1 ? pos_left : neg_left) += 1;
                } else {
                    (y[i] == 1 ? pos_right : neg_right) += 1;
                }
            }
            const unsigned long long n_left = pos_left + neg_left;
            const unsigned long long n_right = pos_right + neg_right;
            if (n_left == 0 || n_right == 0) continue;
            const unsigned long long num =
                (pos_left * pos_left + neg_left * neg_left) * n_right +
                (pos_right * pos_right + neg_right * neg_right) * n_left;
            const unsigned long long den = n_left * n_right;
            const bool better =
                !best.found || static_cast<unsigned __int128>(num) * best_den >
                                   static_cast<unsigned __int128>(best_num) * den;
            if (better) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = threshold;
                best_num = num;
                best_den = den;
            }
        }
    }
    return best;
}

double train_accuracy(const FittedModel& model, const Matrix& X, const Labels& y) {
    const Labels pred = model.predict(X);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) correct += pred[i] == y[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(y.size());
}

const Matrix kXorX = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
const Labels kXorY = {0, 1, 1, 0};

Matrix blob_data(Labels& y, std::size_t per_class, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> noise(0.0, 0.4);
    Matrix X;
    for (std::size_t i = 0; i < per_class; ++i) {
        X.push_back({noise(gen), noise(gen)});
        y.push_back(0);
    }
    for (std::size_t i = 0; i < per_class; ++i) {
        X.push_back({3.0 + noise(gen), 3.0 + noise(gen)});
        y.push_back(1);
    }
    return X;
}

}  // namespace

TEST_CASE("a depth-1 tree finds the separating threshold on signed data") {
    Matrix X;
    Labels y;
    for (double v : {-2.0, -1.5, -0.5, -0.1}) {
        X.push_back({v});
        y.push_back(0);
    }
    for (double v : {0.2, 0.7, 1.3, 2.2}) {
        X.push_back({v});
        y.push_back(1);
    }
    const FittedModel model = fit_tree(X, y, {1, 2, 0});
    const auto& tree = std::get<TreeModel>(model.impl).tree;
    REQUIRE(tree.nodes[0].feature == 0);
    CHECK(tree.nodes[0].threshold > -0.1);
    CHECK(tree.nodes[0].threshold < 0.2);
    CHECK(train_accuracy(model, X, y) == 1.0);

    const OracleSplit oracle = oracle_best_split(X, y);
    CHECK(oracle.feature == tree.nodes[0].feature);
    CHECK(oracle.threshold == tree.nodes[0].threshold);
}

TEST_CASE("all-same-label data collapses to one leaf") {
    const Matrix X = {{1.0}, {2.0}, {3.0}};
    const Labels y = {1, 1, 1};
    const FittedModel model = fit_tree(X, y, {4, 2, 0});
    const auto& tree = std::get<TreeModel>(model.impl).tree;
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].feature == -1);
    CHECK(tree.nodes[0].value == 1.0);
}

TEST_CASE("XOR is out of reach for a depth-1 stump") {
    const FittedModel model = fit_tree(kXorX, kXorY, {1, 2, 0});
    CHECK(train_accuracy(model, kXorX, kXorY) <= 0.75);
    // a deep enough tree nails it
    const FittedModel deep = fit_tree(kXorX, kXorY, {3, 2, 0});
    CHECK(train_accuracy(deep, kXorX, kXorY) == 1.0);
}

TEST_CASE("root split matches the exhaustive oracle on random small fixtures") {
    std::mt19937 gen(2024);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t n = 2 + gen() % 19;       // up to 20 rows
        const std::size_t d = 1 + gen() % 3;        // up to 3 features
        Matrix X;
        Labels y;
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> row;
            // small integer grid makes exact score ties common
            for (std::size_t f = 0; f < d; ++f) row.push_back(static_cast<double>(gen() % 4));
            X.push_back(std::move(row));
            const int label = static_cast<int>(gen() % 2);
            y.push_back(label);
            (label ? has1 : has0) = true;
        }
        if (!has0 || !has1) continue;
        const OracleSplit oracle = oracle_best_split(X, y);
        const FittedModel model = fit_tree(X, y, {1, 2, 0});
        const auto& root = std::get<TreeModel>(model.impl).tree.nodes[0];
        if (!oracle.found) {
            CHECK(root.feature == -1);
            continue;
        }
        REQUIRE(root.feature == oracle.feature);
        CHECK(root.threshold == oracle.threshold);
    }
}

TEST_CASE("forest separates blobs and predicts by majority vote") {
    Labels y;
    const Matrix X = blob_data(y, 30, 17);
    ForestParams params;
    params.n_trees = 100;
    params.max_depth = 8;
    params.seed = 5;
    const FittedModel model = fit_forest(X, y, params);
    CHECK(train_accuracy(model, X, y) == 1.0);

    // predictions equal a recount of per-tree votes
    const auto& forest = std::get<ForestModel>(model.impl);
    const Labels pred = model.predict(X);
    for (std::size_t i = 0; i < X.size(); ++i) {
        std::size_t ones = 0;
        for (const Tree& tree : forest.trees) ones += tree.eval(X[i]) > 0.5 ? 1 : 0;
        CHECK(pred[i] == (2 * ones > forest.trees.size() ? 1 : 0));
    }
}

TEST_CASE("a one-tree forest without bootstrap equals the bare tree") {
    Labels y;
    const Matrix X = blob_data(y, 12, 23);
    ForestParams params;
    params.n_trees = 1;
    params.max_depth = 6;
    params.features_per_split = 2;  // full dimensionality
    params.bootstrap = false;
    params.seed = 9;
    const FittedModel forest = fit_forest(X, y, params);
    const FittedModel tree = fit_tree(X, y, {6, 2, 9});
    Labels probe_y;
    const Matrix probe = blob_data(probe_y, 20, 99);
    CHECK(forest.predict(probe) == tree.predict(probe));
}

TEST_CASE("forests with the same seed agree; vote ties resolve to class 0") {
    Labels y;
    const Matrix X = blob_data(y, 15, 31);
    ForestParams params;
    params.n_trees = 7;
    params.max_depth = 4;
    params.seed = 42;
    Labels probe_y;
    const Matrix probe = blob_data(probe_y, 25, 77);
    CHECK(fit_forest(X, y, params).predict(probe) == fit_forest(X, y, params).predict(probe));

    // hand-made even forest that always ties
    ForestModel tied;
    tied.params.n_trees = 2;
    tied.trees.resize(2);
    tied.trees[0].nodes = {TreeNode{-1, 0.0, -1, -1, 0.0}};
    tied.trees[1].nodes = {TreeNode{-1, 0.0, -1, -1, 1.0}};
    FittedModel model;
    model.impl = std::move(tied);
    model.n_features = 2;
    CHECK(model.predict({{0.5, 0.5}}) == Labels{0});
}

TEST_CASE("boosting drives training accuracy to 1 with non-increasing logloss") {
    Matrix X;
    Labels y;
    for (double v : {-3.0, -2.0, -1.2, -0.4}) {
        X.push_back({v});
        y.push_back(0);
    }
    for (double v : {0.3, 1.1, 2.0, 2.9}) {
        X.push_back({v});
        y.push_back(1);
    }
    BoostParams params;
    params.n_estimators = 50;
    params.learning_rate = 0.3;
    params.max_depth = 3;
    params.eval_metric = EvalMetric::Logloss;
    const FittedModel model = fit_boost(X, y, params);
    CHECK(train_accuracy(model, X, y) == 1.0);

    const auto& boost = std::get<BoostModel>(model.impl);
    REQUIRE(boost.metric_log.size() == 50);
    for (std::size_t r = 1; r < boost.metric_log.size(); ++r)
        CHECK(boost.metric_log[r] <= boost.metric_log[r - 1] + 1e-12);

    // recompute the per-round logloss from the stored trees
    std::vector<double> scores(X.size(), boost.base_score);
    for (std::size_t r = 0; r < boost.trees.size(); ++r) {
        for (std::size_t i = 0; i < X.size(); ++i) scores[i] += boost.trees[r].eval(X[i]);
        CHECK(boost.metric_log[r] == doctest::Approx(logloss(scores, y)).epsilon(1e-12));
    }
}

TEST_CASE("zero learning rate degenerates to the prior class") {
    Matrix X;
    Labels y;
    for (int i = 0; i < 10; ++i) {
        X.push_back({static_cast<double>(i)});
        y.push_back(i < 7 ? 1 : 0);  // positive-heavy prior
    }
    BoostParams params;
    params.n_estimators = 10;
    params.learning_rate = 0.0;
    const FittedModel model = fit_boost(X, y, params);
    for (int label : model.predict(X)) CHECK(label == 1);
}

TEST_CASE("boost handles lr 0.05, depth 12, 300 rounds on a 148x4 matrix") {
    std::mt19937 gen(7);
    std::normal_distribution<double> noise(0.0, 1.0);
    Matrix X;
    Labels y;
    for (int i = 0; i < 148; ++i) {
        const int label = i % 3 == 0 ? 1 : 0;
        X.push_back({noise(gen) + label, noise(gen), noise(gen), noise(gen) - label});
        y.push_back(label);
    }
    BoostParams params;
    params.n_estimators = 300;
    params.learning_rate = 0.05;
    params.max_depth = 12;
    params.eval_metric = EvalMetric::Auc;
    const FittedModel model = fit_boost(X, y, params);
    const auto& boost = std::get<BoostModel>(model.impl);
    CHECK(boost.trees.size() == 300);
    CHECK(boost.metric_log.back() >= 0.5);
}

TEST_CASE("boosting requires both classes") {
    const Matrix X = {{1.0}, {2.0}};
    CHECK_THROWS_AS(fit_boost(X, {1, 1}, BoostParams{}), Error);
}

namespace {

// tiny primal grid search: is there a linear separator over the grid?
double best_linear_grid_accuracy(const Matrix& X, const Labels& y) {
    double best = 0.0;
    for (double w0 = -2.0; w0 <= 2.0; w0 += 0.5) {
        for (double w1 = -2.0; w1 <= 2.0; w1 += 0.5) {
            for (double b = -6.0; b <= 6.0; b += 0.5) {
                std::size_t correct = 0;
                for (std::size_t i = 0; i < X.size(); ++i) {
                    const double f = w0 * X[i][0] + w1 * X[i][1] + b;
                    correct += (f > 0.0 ? 1 : 0) == y[i] ? 1 : 0;
                }
                best = std::max(best, static_cast<double>(correct) / X.size());
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("linear SVM separates what the primal grid search separates") {
    Labels y;
    const Matrix X = blob_data(y, 20, 3);
    REQUIRE(best_linear_grid_accuracy(X, y) == 1.0);  // oracle: data is separable

    SvmParams params;
    params.kernel = Kernel::Linear;
    params.gamma = 1.0;
    params.C = 1.0;
    params.seed = 11;
    const FittedModel model = fit_svm(X, y, params);
    CHECK(train_accuracy(model, X, y) == 1.0);
}

TEST_CASE("XOR defeats the linear kernel but not RBF") {
    REQUIRE(best_linear_grid_accuracy(kXorX, kXorY) == 0.75);  // no grid separator

    SvmParams linear;
    linear.kernel = Kernel::Linear;
    linear.gamma = 1.0;
    linear.C = 10.0;
    linear.seed = 2;
    CHECK(train_accuracy(fit_svm(kXorX, kXorY, linear), kXorX, kXorY) <= 0.75);

    SvmParams rbf;
    rbf.kernel = Kernel::Rbf;
    rbf.gamma = 1.0;
    rbf.C = 10.0;
    rbf.seed = 2;
    CHECK(train_accuracy(fit_svm(kXorX, kXorY, rbf), kXorX, kXorY) == 1.0);
}

TEST_CASE("gamma auto resolves to 1/d and is recorded") {
    Labels y;
    Matrix X = blob_data(y, 10, 5);
    for (auto& row : X) {
        row.push_back(0.0);
        row.push_back(1.0);
    }
    SvmParams params;  // gamma unset = auto
    const FittedModel model = fit_svm(X, y, params);
    CHECK(std::get<SvmModel>(model.impl).gamma == doctest::Approx(0.25));
}

TEST_CASE("SVM dual feasibility holds at termination") {
    std::mt19937 gen(19);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix X;
        Labels y;
        for (int i = 0; i < 40; ++i) {
            const int label = static_cast<int>(gen() % 2);
            X.push_back({noise(gen) + 0.8 * label, noise(gen) - 0.8 * label});
            y.push_back(label);
        }
        SvmParams params;
        params.kernel = trial % 2 ? Kernel::Linear : Kernel::Rbf;
        params.gamma = 0.5;
        params.C = 1.0;
        params.seed = static_cast<std::uint64_t>(trial);
        const FittedModel model = fit_svm(X, y, params);
        const auto& svm = std::get<SvmModel>(model.impl);
        double sum = 0.0;
        for (double coef : svm.coefficients) {
            CHECK(std::abs(coef) <= params.C + 1e-12);  // 0 <= alpha <= C
            sum += coef;
        }
        CHECK(std::abs(sum) <= 1e-6);  // sum alpha_i y_i
    }
}

TEST_CASE("kernel_eval basics") {
    CHECK(kernel_eval(Kernel::Linear, 0.0, {1, 2}, {3, 4}) == 11.0);
    CHECK(kernel_eval(Kernel::Rbf, 0.7, {1.5, -2.0, 3.0}, {1.5, -2.0, 3.0}) == 1.0);
    std::mt19937 gen(3);
    std::normal_distribution<double> noise(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<double> a = {noise(gen), noise(gen), noise(gen)};
        const std::vector<double> b = {noise(gen), noise(gen), noise(gen)};
        CHECK(kernel_eval(Kernel::Rbf, 1.3, a, b) == kernel_eval(Kernel::Rbf, 1.3, b, a));
    }
    CHECK_THROWS_AS(kernel_eval(Kernel::Linear, 0.0, {1.0}, {1.0, 2.0}), Error);
}

TEST_CASE("predict is row-independent and checks dimensions") {
    Labels y;
    const Matrix X = blob_data(y, 10, 29);
    const FittedModel model = fit_tree(X, y, {6, 2, 0});

    // pure-leaf tree reproduces training labels exactly
    CHECK(model.predict(X) == y);

    Matrix shuffled = X;
    std::reverse(shuffled.begin(), shuffled.end());
    Labels rev = model.predict(shuffled);
    std::reverse(rev.begin(), rev.end());
    CHECK(rev == model.predict(X));

    CHECK_THROWS_AS(model.predict(Matrix{{1.0, 2.0, 3.0}}), Error);
}

TEST_CASE("every family is deterministic under a fixed seed") {
    Labels y;
    const Matrix X = blob_data(y, 20, 41);
    Labels probe_y;
    const Matrix probe = blob_data(probe_y, 15, 53);

    ForestParams forest;
    forest.n_trees = 30;
    forest.seed = 4;
    CHECK(fit_forest(X, y, forest).predict(probe) == fit_forest(X, y, forest).predict(probe));

    BoostParams boost;
    boost.n_estimators = 20;
    boost.learning_rate = 0.2;
    boost.seed = 4;
    CHECK(fit_boost(X, y, boost).predict(probe) == fit_boost(X, y, boost).predict(probe));

    SvmParams svm;
    svm.seed = 4;
    CHECK(fit_svm(X, y, svm).predict(probe) == fit_svm(X, y, svm).predict(probe));

    CHECK(fit_tree(X, y, {5, 2, 4}).predict(probe) == fit_tree(X, y, {5, 2, 4}).predict(probe));
}

TEST_CASE("models save and load with identical predictions") {
    Labels y;
    const Matrix X = blob_data(y, 12, 61);
    Labels probe_y;
    const Matrix probe = blob_data(probe_y, 18, 71);

    std::vector<FittedModel> models;
    models.push_back(fit_tree(X, y, {5, 2, 1}, {"f0", "f1"}));
    ForestParams forest;
    forest.n_trees = 9;
    forest.seed = 1;
    models.push_back(fit_forest(X, y, forest, {"f0", "f1"}));
    BoostParams boost;
    boost.n_estimators = 12;
    boost.learning_rate = 0.4;
    models.push_back(fit_boost(X, y, boost, {"f0", "f1"}));
    SvmParams svm;
    svm.C = 2.0;
    models.push_back(fit_svm(X, y, svm, {"f0", "f1"}));

    for (const FittedModel& model : models) {
        std::stringstream buffer;
        save_model(model, buffer);
        const FittedModel loaded = load_model(buffer);
        CHECK(loaded.kind() == model.kind());
        CHECK(loaded.n_features == model.n_features);
        CHECK(loaded.feature_keys == model.feature_keys);
        CHECK(loaded.predict(probe) == model.predict(probe));
    }
}

TEST_CASE("training-input validation") {
    CHECK_THROWS_AS(fit_tree({}, {}, TreeParams{}), Error);
    CHECK_THROWS_AS(fit_tree({{1.0}}, {0}, TreeParams{}), Error);  // fewer than 2 rows
    CHECK_THROWS_AS(fit_tree({{1.0}, {2.0, 3.0}}, {0, 1}, TreeParams{}), Error);  // ragged
    CHECK_THROWS_AS(fit_tree({{1.0}, {2.0}}, {0, 2}, TreeParams{}), Error);       // bad label
    ForestParams fps;
    fps.features_per_split = 5;
    CHECK_THROWS_AS(fit_forest({{1.0}, {2.0}}, {0, 1}, fps), Error);
    CHECK_THROWS_AS(fit_svm({{1.0}, {2.0}}, {1, 1}, SvmParams{}), Error);
}
