#include "cdisc/classify.hpp"
#include "cdisc/error.hpp"
#include "json.hpp"
#include "text_io.hpp"

namespace cdisc {
namespace {

using json = nlohmann::ordered_json;

constexpr std::string_view kFormat = "cdisc-classifier";
constexpr int kVersion = 1;

json dataset_to_json(const LabeledDataset& d) {
  json rows = json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    auto r = d.row(i);
    rows.push_back({{"token", d.tokens[i]}, {"label", d.labels[i]}, {"vector", std::vector<double>(r.begin(), r.end())}});
  }
  return rows;
}

LabeledDataset dataset_from_json(const json& rows, std::size_t dim, const std::vector<std::string>& labels) {
  LabeledDataset d;
  d.dim = dim;
  d.label_names = labels;
  for (const auto& r : rows) {
    auto v = r.at("vector").get<std::vector<double>>();
    d.add(v, r.at("label").get<std::size_t>(), r.at("token").get<std::string>());
  }
  return d;
}

json to_json(const MlpClassifier& m) {
  json layers = json::array();
  for (const auto& l : m.layers()) {
    layers.push_back({{"inputs", l.inputs}, {"outputs", l.outputs}, {"weights", l.weights}, {"bias", l.bias}});
  }
  return {{"hidden", [&] {
             std::vector<std::size_t> h;
             for (std::size_t i = 0; i + 1 < m.layers().size(); ++i) h.push_back(m.layers()[i].outputs);
             return h;
           }()},
          {"layers", layers}};
}

json to_json(const KnnClassifier& m) {
  return {{"k", m.config().k},
          {"metric", std::string(to_string(m.config().metric))},
          {"train", dataset_to_json(m.training_set())}};
}

json to_json(const RandomForest& m) {
  const auto& c = m.config();
  json trees = json::array();
  for (const auto& t : m.trees()) {
    json nodes = json::array();
    for (const auto& n : t.nodes()) nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.label}));
    trees.push_back(nodes);
  }
  return {{"trees", c.trees},
          {"max_features", c.max_features},
          {"min_samples_split", c.min_samples_split},
          {"max_depth", c.max_depth},
          {"bootstrap", c.bootstrap},
          {"seed", c.seed},
          {"classes", m.classes()},
          {"forest", trees}};
}

}  // namespace

std::string format_model(const ClassifierModel& model) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["kind"] = std::string(to_string(model.kind()));
  j["dim"] = model.dim;
  j["labels"] = model.label_names;
  j["parameters"] = std::visit([](const auto& m) { return to_json(m); }, model.model);
  return j.dump(1) + "\n";
}

ClassifierModel parse_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_model, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat) throw Error(Errc::invalid_model, "not a classifier model file");
    if (j.at("version").get<int>() != kVersion) throw Error(Errc::invalid_model, "unsupported model version");
    ClassifierModel out;
    out.dim = j.at("dim").get<std::size_t>();
    out.label_names = j.at("labels").get<std::vector<std::string>>();
    const auto& p = j.at("parameters");
    switch (parse_classifier_kind(j.at("kind").get<std::string>())) {
      case ClassifierKind::mlp: {
        std::vector<DenseLayer> layers;
        for (const auto& l : p.at("layers")) {
          layers.push_back({l.at("inputs").get<std::size_t>(), l.at("outputs").get<std::size_t>(),
                            l.at("weights").get<std::vector<double>>(), l.at("bias").get<std::vector<double>>()});
        }
        MlpClassifier net(std::move(layers));
        if (net.input_dim() != out.dim || net.classes() != out.label_names.size()) {
          throw Error(Errc::invalid_model, "network shape does not match the model header");
        }
        out.model = std::move(net);
        break;
      }
      case ClassifierKind::knn: {
        KnnConfig cfg{p.at("k").get<std::size_t>(), parse_metric(p.at("metric").get<std::string>())};
        out.model = KnnClassifier(dataset_from_json(p.at("train"), out.dim, out.label_names), cfg);
        break;
      }
      case ClassifierKind::random_forest: {
        ForestConfig cfg;
        cfg.trees = p.at("trees").get<std::size_t>();
        cfg.max_features = p.at("max_features").get<std::size_t>();
        cfg.min_samples_split = p.at("min_samples_split").get<std::size_t>();
        cfg.max_depth = p.at("max_depth").get<std::size_t>();
        cfg.bootstrap = p.at("bootstrap").get<bool>();
        cfg.seed = p.at("seed").get<std::uint64_t>();
        const auto classes = p.at("classes").get<std::size_t>();
        std::vector<DecisionTree> trees;
        for (const auto& t : p.at("forest")) {
          std::vector<TreeNode> nodes;
          for (const auto& n : t) {
            TreeNode node{n.at(0).get<std::int64_t>(), n.at(1).get<double>(), n.at(2).get<std::uint32_t>(),
                          n.at(3).get<std::uint32_t>(), n.at(4).get<std::size_t>()};
            if (node.label >= classes) throw Error(Errc::invalid_model, "tree leaf label out of range");
            if (node.feature >= static_cast<std::int64_t>(out.dim)) {
              throw Error(Errc::invalid_model, "tree split feature out of range");
            }
            nodes.push_back(node);
          }
          for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& n = nodes[i];
            if (n.feature >= 0 && (n.left <= i || n.right <= i || n.left >= nodes.size() || n.right >= nodes.size())) {
              throw Error(Errc::invalid_model, "tree child index out of range");
            }
          }
          trees.emplace_back(std::move(nodes));
        }
        if (trees.size() != cfg.trees) throw Error(Errc::invalid_model, "tree count does not match header");
        out.model = RandomForest(std::move(trees), classes, cfg);
        break;
      }
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_model, std::string("malformed model file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_model) throw;
    throw Error(Errc::invalid_model, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ClassifierModel& model) {
  detail::write_file(path, format_model(model));
}

ClassifierModel load_model(const std::filesystem::path& path) { return parse_model(detail::read_file(path)); }

}  // namespace cdisc
