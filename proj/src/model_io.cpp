#include <istream>
#include <ostream>

#include <json.hpp>

#include "dsw/error.hpp"
#include "dsw/models.hpp"

namespace dsw::models {

namespace {

using nlohmann::json;

json tree_to_json(const Tree& tree) {
    json nodes = json::array();
    for (const TreeNode& node : tree.nodes)
        nodes.push_back({node.feature, node.threshold, node.left, node.right, node.value});
    return nodes;
}

Tree tree_from_json(const json& nodes) {
    Tree tree;
    tree.nodes.reserve(nodes.size());
    for (const json& node : nodes) {
        tree.nodes.push_back(TreeNode{node.at(0).get<int>(), node.at(1).get<double>(),
                                      node.at(2).get<int>(), node.at(3).get<int>(),
                                      node.at(4).get<double>()});
    }
    return tree;
}

json trees_to_json(const std::vector<Tree>& trees) {
    json out = json::array();
    for (const Tree& tree : trees) out.push_back(tree_to_json(tree));
    return out;
}

std::vector<Tree> trees_from_json(const json& arr) {
    std::vector<Tree> trees;
    trees.reserve(arr.size());
    for (const json& tree : arr) trees.push_back(tree_from_json(tree));
    return trees;
}

}  // namespace

void save_model(const FittedModel& model, std::ostream& out) {
    json j;
    j["format"] = "dsw_model";
    j["version"] = 1;
    j["kind"] = estimator_kind_name(model.kind());
    j["n_features"] = model.n_features;
    j["feature_keys"] = model.feature_keys;
    j["seed"] = model.seed;

    if (const auto* m = std::get_if<TreeModel>(&model.impl)) {
        j["params"] = {{"max_depth", m->params.max_depth},
                       {"min_samples_split", m->params.min_samples_split},
                       {"seed", m->params.seed}};
        j["tree"] = tree_to_json(m->tree);
    } else if (const auto* m = std::get_if<ForestModel>(&model.impl)) {
        j["params"] = {{"n_trees", m->params.n_trees},
                       {"max_depth", m->params.max_depth},
                       {"features_per_split", m->params.features_per_split},
                       {"seed", m->params.seed},
                       {"bootstrap", m->params.bootstrap}};
        j["features_per_split"] = m->features_per_split;
        j["trees"] = trees_to_json(m->trees);
    } else if (const auto* m = std::get_if<BoostModel>(&model.impl)) {
        j["params"] = {{"n_estimators", m->params.n_estimators},
                       {"learning_rate", m->params.learning_rate},
                       {"max_depth", m->params.max_depth},
                       {"leaf_regularization", m->params.leaf_regularization},
                       {"eval_metric", eval_metric_name(m->params.eval_metric)},
                       {"seed", m->params.seed}};
        j["base_score"] = m->base_score;
        j["trees"] = trees_to_json(m->trees);
        j["metric_log"] = m->metric_log;
    } else {
        const auto& svm = std::get<SvmModel>(model.impl);
        j["params"] = {{"kernel", kernel_name(svm.params.kernel)},
                       {"gamma_auto", !svm.params.gamma.has_value()},
                       {"gamma", svm.params.gamma.value_or(0.0)},
                       {"C", svm.params.C},
                       {"tolerance", svm.params.tolerance},
                       {"max_passes", svm.params.max_passes},
                       {"seed", svm.params.seed}};
        j["gamma"] = svm.gamma;
        j["support_vectors"] = svm.support_vectors;
        j["coefficients"] = svm.coefficients;
        j["bias"] = svm.bias;
        j["sweeps"] = svm.sweeps;
        j["converged"] = svm.converged;
    }
    out << j.dump() << '\n';
}

FittedModel load_model(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(Errc::BadSpec, std::string("unreadable model dump: ") + e.what());
    }
    if (j.value("format", "") != "dsw_model" || j.value("version", 0) != 1)
        throw Error(Errc::BadSpec, "not a version-1 dsw_model dump");

    FittedModel model;
    model.n_features = j.at("n_features").get<std::size_t>();
    model.feature_keys = j.at("feature_keys").get<std::vector<std::string>>();
    model.seed = j.at("seed").get<std::uint64_t>();

    const std::string kind = j.at("kind").get<std::string>();
    const json& params = j.at("params");
    if (kind == "tree") {
        TreeModel m;
        m.params = {params.at("max_depth").get<int>(), params.at("min_samples_split").get<int>(),
                    params.at("seed").get<std::uint64_t>()};
        m.tree = tree_from_json(j.at("tree"));
        model.impl = std::move(m);
    } else if (kind == "forest") {
        ForestModel m;
        m.params = {params.at("n_trees").get<int>(), params.at("max_depth").get<int>(),
                    params.at("features_per_split").get<int>(),
                    params.at("seed").get<std::uint64_t>(), params.at("bootstrap").get<bool>()};
        m.features_per_split = j.at("features_per_split").get<int>();
        m.trees = trees_from_json(j.at("trees"));
        model.impl = std::move(m);
    } else if (kind == "boost") {
        BoostModel m;
        m.params = {params.at("n_estimators").get<int>(),
                    params.at("learning_rate").get<double>(),
                    params.at("max_depth").get<int>(),
                    params.at("leaf_regularization").get<double>(),
                    eval_metric_from_name(params.at("eval_metric").get<std::string>()),
                    params.at("seed").get<std::uint64_t>()};
        m.base_score = j.at("base_score").get<double>();
        m.trees = trees_from_json(j.at("trees"));
        m.metric_log = j.at("metric_log").get<std::vector<double>>();
        model.impl = std::move(m);
    } else if (kind == "svm") {
        SvmModel m;
        m.params.kernel = kernel_from_name(params.at("kernel").get<std::string>());
        if (!params.at("gamma_auto").get<bool>()) m.params.gamma = params.at("gamma").get<double>();
        m.params.C = params.at("C").get<double>();
        m.params.tolerance = params.at("tolerance").get<double>();
        m.params.max_passes = params.at("max_passes").get<int>();
        m.params.seed = params.at("seed").get<std::uint64_t>();
        m.gamma = j.at("gamma").get<double>();
        m.support_vectors = j.at("support_vectors").get<Matrix>();
        m.coefficients = j.at("coefficients").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        m.sweeps = j.at("sweeps").get<int>();
        m.converged = j.at("converged").get<bool>();
        model.impl = std::move(m);
    } else {
        throw Error(Errc::BadSpec, "unknown model kind '" + kind + "'");
    }
    return model;
}

}  // namespace dsw::models
