#include <fstream>
#include <sstream>

#include <json.hpp>

#include "crimegrid/errors.hpp"
#include "crimegrid/learn.hpp"

namespace crimegrid::learn {

using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "crimegrid_model_v1";

json tree_to_json(const Tree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
    }
    return nodes;
}

Tree tree_from_json(const json& nodes) {
    Tree tree;
    for (const auto& n : nodes) {
        TreeNode node;
        node.feature = n.at(0).get<std::int32_t>();
        node.threshold = n.at(1).get<double>();
        node.left = n.at(2).get<std::int32_t>();
        node.right = n.at(3).get<std::int32_t>();
        node.value = n.at(4).get<double>();
        tree.nodes.push_back(node);
    }
    return tree;
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open model file for writing: " + path);
    out << doc.dump(2) << '\n';
}

json read_json(const std::string& path, const std::string& expected_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw DataError(path + ": invalid model JSON: " + e.what());
    }
    if (doc.value("format", "") != kFormatTag)
        throw DataError(path + ": unsupported model format");
    if (doc.value("kind", "") != expected_kind)
        throw DataError(path + ": expected a " + expected_kind + " model");
    return doc;
}

}  // namespace

void save_forest(const std::string& path, const ForestModel& model) {
    json doc;
    doc["format"] = kFormatTag;
    doc["kind"] = "forest";
    doc["params"] = {{"n_trees", model.params.n_trees},
                     {"max_depth", model.params.max_depth},
                     {"min_leaf", model.params.min_leaf},
                     {"max_features", model.params.max_features},
                     {"bootstrap", model.params.bootstrap}};
    json trees = json::array();
    for (const auto& t : model.trees) trees.push_back(tree_to_json(t));
    doc["trees"] = std::move(trees);
    write_json(path, doc);
}

ForestModel load_forest(const std::string& path) {
    json doc = read_json(path, "forest");
    ForestModel model;
    model.params.n_trees = doc.at("params").at("n_trees").get<int>();
    model.params.max_depth = doc.at("params").at("max_depth").get<int>();
    model.params.min_leaf = doc.at("params").at("min_leaf").get<int>();
    model.params.max_features = doc.at("params").at("max_features").get<int>();
    model.params.bootstrap = doc.at("params").at("bootstrap").get<bool>();
    for (const auto& t : doc.at("trees")) model.trees.push_back(tree_from_json(t));
    return model;
}

void save_gbm(const std::string& path, const BoostModel& model) {
    json doc;
    doc["format"] = kFormatTag;
    doc["kind"] = "gbm";
    doc["params"] = {{"n_rounds", model.params.n_rounds},
                     {"learning_rate", model.params.learning_rate},
                     {"max_depth", model.params.max_depth},
                     {"min_leaf", model.params.min_leaf},
                     {"subsample", model.params.subsample}};
    doc["base_score"] = model.base_score;
    json rounds = json::array();
    for (const auto& r : model.rounds)
        rounds.push_back({{"learning_rate", r.learning_rate}, {"tree", tree_to_json(r.tree)}});
    doc["rounds"] = std::move(rounds);
    write_json(path, doc);
}

BoostModel load_gbm(const std::string& path) {
    json doc = read_json(path, "gbm");
    BoostModel model;
    model.params.n_rounds = doc.at("params").at("n_rounds").get<int>();
    model.params.learning_rate = doc.at("params").at("learning_rate").get<double>();
    model.params.max_depth = doc.at("params").at("max_depth").get<int>();
    model.params.min_leaf = doc.at("params").at("min_leaf").get<int>();
    model.params.subsample = doc.at("params").at("subsample").get<double>();
    model.base_score = doc.at("base_score").get<double>();
    for (const auto& r : doc.at("rounds")) {
        BoostRound round;
        round.learning_rate = r.at("learning_rate").get<double>();
        round.tree = tree_from_json(r.at("tree"));
        model.rounds.push_back(std::move(round));
    }
    return model;
}

void save_mlp(const std::string& path, const MlpModel& model) {
    json doc;
    doc["format"] = kFormatTag;
    doc["kind"] = "mlp";
    doc["params"] = {{"encoder_width", model.params().encoder_width},
                     {"joint1", model.params().joint1},
                     {"joint2", model.params().joint2},
                     {"learning_rate", model.params().learning_rate},
                     {"momentum", model.params().momentum},
                     {"batch_size", model.params().batch_size},
                     {"epochs", model.params().epochs}};
    doc["n_cols"] = model.n_cols();
    json groups = json::array();
    for (const auto& g : model.groups())
        groups.push_back({{"tag", std::string(1, g.tag)}, {"cols", g.cols}});
    doc["groups"] = std::move(groups);
    doc["mean"] = model.mean();
    doc["sd"] = model.sd();
    doc["theta"] = model.parameters();
    write_json(path, doc);
}

MlpModel load_mlp(const std::string& path) {
    json doc = read_json(path, "mlp");
    MlpParams params;
    params.encoder_width = doc.at("params").at("encoder_width").get<int>();
    params.joint1 = doc.at("params").at("joint1").get<int>();
    params.joint2 = doc.at("params").at("joint2").get<int>();
    params.learning_rate = doc.at("params").at("learning_rate").get<double>();
    params.momentum = doc.at("params").at("momentum").get<double>();
    params.batch_size = doc.at("params").at("batch_size").get<int>();
    params.epochs = doc.at("params").at("epochs").get<int>();
    std::vector<GroupSpec> groups;
    for (const auto& g : doc.at("groups")) {
        GroupSpec spec;
        spec.tag = g.at("tag").get<std::string>().at(0);
        spec.cols = g.at("cols").get<std::vector<std::uint32_t>>();
        groups.push_back(std::move(spec));
    }
    MlpModel model;
    mlp_from_json_parts(model, std::move(groups), doc.at("n_cols").get<std::size_t>(), params,
                        doc.at("mean").get<std::vector<double>>(),
                        doc.at("sd").get<std::vector<double>>(),
                        doc.at("theta").get<std::vector<double>>());
    return model;
}

}  // namespace crimegrid::learn
