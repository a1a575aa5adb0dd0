#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dsw::models {

using Matrix = std::vector<std::vector<double>>;
using Labels = std::vector<int>;

struct TreeParams {
    int max_depth = 12;
    int min_samples_split = 2;
    std::uint64_t seed = 0;
};

struct ForestParams {
    int n_trees = 100;
    int max_depth = 12;
    int features_per_split = 0;  // 0 resolves to ceil(sqrt(d)) at fit
    std::uint64_t seed = 0;
    bool bootstrap = true;  // test hook: false fits every tree on the full sample
};

enum class EvalMetric { Auc, Logloss };

struct BoostParams {
    int n_estimators = 100;
    double learning_rate = 0.05;  // in [0,1]
    int max_depth = 12;
    double leaf_regularization = 1.0;
    EvalMetric eval_metric = EvalMetric::Logloss;
    std::uint64_t seed = 0;
};

enum class Kernel { Rbf, Linear };

struct SvmParams {
    Kernel kernel = Kernel::Rbf;
    std::optional<double> gamma;  // nullopt = auto = 1/d at fit
    double C = 1.0;
    double tolerance = 1e-3;
    int max_passes = 10;
    std::uint64_t seed = 0;
};

// feature < 0 marks a leaf carrying `value` (a class for classification
// trees, an additive score for boosting); internal nodes route x[feature]
// <= threshold to `left`.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    double eval(const std::vector<double>& row) const;
};

struct TreeModel {
    TreeParams params;
    Tree tree;
};

struct ForestModel {
    ForestParams params;
    int features_per_split = 0;  // resolved value
    std::vector<Tree> trees;
};

struct BoostModel {
    BoostParams params;
    double base_score = 0.0;  // initial log-odds
    std::vector<Tree> trees;  // leaf values already scaled by learning_rate
    std::vector<double> metric_log;  // eval_metric on the training set per round
};

struct SvmModel {
    SvmParams params;
    double gamma = 0.0;  // effective value (auto resolved)
    Matrix support_vectors;
    std::vector<double> coefficients;  // alpha_i * y_i, y in {-1,+1}
    double bias = 0.0;
    int sweeps = 0;
    bool converged = true;

    double decision_value(const std::vector<double>& row) const;
};

enum class EstimatorKind { Tree, Forest, Boost, Svm };

const char* estimator_kind_name(EstimatorKind kind);
const char* eval_metric_name(EvalMetric metric);
EvalMetric eval_metric_from_name(const std::string& name);
const char* kernel_name(Kernel kind);
Kernel kernel_from_name(const std::string& name);

struct FittedModel {
    std::variant<TreeModel, ForestModel, BoostModel, SvmModel> impl;
    std::size_t n_features = 0;
    std::vector<std::string> feature_keys;  // recorded at fit when provided
    std::uint64_t seed = 0;

    EstimatorKind kind() const;
    Labels predict(const Matrix& X) const;
};

FittedModel fit_tree(const Matrix& X, const Labels& y, const TreeParams& params,
                     std::vector<std::string> feature_keys = {});
FittedModel fit_forest(const Matrix& X, const Labels& y, const ForestParams& params,
                       std::vector<std::string> feature_keys = {});
FittedModel fit_boost(const Matrix& X, const Labels& y, const BoostParams& params,
                      std::vector<std::string> feature_keys = {});
FittedModel fit_svm(const Matrix& X, const Labels& y, const SvmParams& params,
                    std::vector<std::string> feature_keys = {});

double kernel_eval(Kernel kind, double gamma, const std::vector<double>& a,
                   const std::vector<double>& b);

// logistic loss of raw scores against 0/1 labels; mean over rows
double logloss(const std::vector<double>& scores, const Labels& y);
// rank-based AUC with tied scores averaged
double auc(const std::vector<double>& scores, const Labels& y);

// JSON dump sufficient to reload a model whose predictions match the
// original bit-for-bit.
void save_model(const FittedModel& model, std::ostream& out);
FittedModel load_model(std::istream& in);

}  // namespace dsw::models
