#include "pdeeg/error.hpp"
#include "pdeeg/models.hpp"
#include "pdeeg/parallel.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <string>

namespace pdeeg {

using nlohmann::json;

std::string_view model_kind_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::RandomForest: return "RF";
    case ModelKind::ExtraTrees: return "ET";
    case ModelKind::LinearSvm: return "SVM";
    case ModelKind::Knn: return "KNN";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::RandomForest, ModelKind::ExtraTrees, ModelKind::LinearSvm,
                 ModelKind::Knn})
    if (model_kind_name(k) == name) return k;
  throw Error(Errc::ConfigError, "unknown classifier '" + std::string(name) + "'");
}

TrainedModel fit(const ClassifierSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                 std::uint64_t seed) {
  TrainedModel m;
  switch (spec.kind) {
    case ModelKind::RandomForest: m = fit_random_forest(x, y, spec.params.forest, seed); break;
    case ModelKind::ExtraTrees: m = fit_extra_trees(x, y, spec.params.forest, seed); break;
    case ModelKind::LinearSvm: m = fit_linear_svm(x, y, spec.params.svm); break;
    case ModelKind::Knn: m = fit_knn(x, y, spec.params.knn.n_neighbors); break;
  }
  // Keep the full parameter set so a reloaded model reports what it was built with.
  m.params = spec.params;
  m.seed = seed;
  return m;
}

bool label_from_score(ModelKind kind, double score) {
  return kind == ModelKind::LinearSvm ? score >= 0.0 : score > 0.5;
}

namespace {

double forest_score(const Forest& f, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  int votes = 0;
  for (const auto& t : f.trees) votes += t.vote(row);
  return static_cast<double>(votes) / static_cast<double>(f.trees.size());
}

double knn_score(const KnnModel& m, const Eigen::Ref<const Eigen::RowVectorXd>& row,
                 std::vector<std::pair<double, Eigen::Index>>& scratch) {
  const Eigen::Index n = m.train_x.rows();
  scratch.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    scratch[static_cast<std::size_t>(i)] = {(m.train_x.row(i) - row).squaredNorm(), i};
  const auto k = static_cast<std::size_t>(m.effective_k);
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   scratch.end());
  int positives = 0;
  for (std::size_t i = 0; i < k; ++i) positives += m.train_y[scratch[i].second];
  return static_cast<double>(positives) / static_cast<double>(k);
}

}  // namespace

Prediction predict(const TrainedModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.width)
    throw Error(Errc::WidthMismatch, "model expects " + std::to_string(model.width) +
                                         " columns, got " + std::to_string(x.cols()));
  Prediction p;
  const Eigen::Index n = x.rows();
  p.scores.resize(n);
  p.labels.resize(n);
  if (const auto* svm = model.svm()) {
    p.scores = (x * svm->weights).array() + svm->bias;
  } else if (const auto* forest = model.forest()) {
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      const auto r = static_cast<Eigen::Index>(i);
      p.scores[r] = forest_score(*forest, x.row(r));
    });
  } else if (const auto* knn = model.knn()) {
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      thread_local std::vector<std::pair<double, Eigen::Index>> scratch;
      const auto r = static_cast<Eigen::Index>(i);
      p.scores[r] = knn_score(*knn, x.row(r), scratch);
    });
  }
  for (Eigen::Index i = 0; i < n; ++i) p.labels[i] = label_from_score(model.kind, p.scores[i]);
  return p;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr const char* kFormat = "pdeeg-model";
constexpr int kVersion = 1;

json node_to_json(const DecisionTree& tree, int id) {
  const auto& n = tree.nodes[static_cast<std::size_t>(id)];
  json j = {{"depth", n.depth}, {"samples", n.samples}, {"positive_fraction", n.positive_fraction}};
  if (n.feature >= 0) {
    j["feature"] = n.feature;
    j["threshold"] = n.threshold;
    j["left"] = node_to_json(tree, n.left);
    j["right"] = node_to_json(tree, n.right);
  }
  return j;
}

int node_from_json(const json& j, DecisionTree& tree) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  TreeNode n;
  n.depth = j.at("depth").get<int>();
  n.samples = j.at("samples").get<int>();
  n.positive_fraction = j.at("positive_fraction").get<double>();
  if (j.contains("feature")) {
    n.feature = j.at("feature").get<int>();
    n.threshold = j.at("threshold").get<double>();
    n.left = node_from_json(j.at("left"), tree);
    n.right = node_from_json(j.at("right"), tree);
  }
  tree.nodes[static_cast<std::size_t>(id)] = n;
  return id;
}

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json params_to_json(const HyperParams& p) {
  return {{"forest",
           {{"n_estimators", p.forest.n_estimators},
            {"max_leaf_nodes", p.forest.max_leaf_nodes},
            {"max_depth", p.forest.max_depth},
            {"min_samples_split", p.forest.min_samples_split}}},
          {"svm",
           {{"c", p.svm.c},
            {"kernel", "linear"},
            {"shrinking", p.svm.shrinking},
            {"standardize", p.svm.standardize},
            {"tolerance", p.svm.tolerance},
            {"max_iter", p.svm.max_iter}}},
          {"knn", {{"n_neighbors", p.knn.n_neighbors}}}};
}

HyperParams params_from_json(const json& j) {
  HyperParams p;
  const auto& f = j.at("forest");
  p.forest.n_estimators = f.at("n_estimators").get<int>();
  p.forest.max_leaf_nodes = f.at("max_leaf_nodes").get<int>();
  p.forest.max_depth = f.at("max_depth").get<int>();
  p.forest.min_samples_split = f.at("min_samples_split").get<int>();
  const auto& s = j.at("svm");
  p.svm.c = s.at("c").get<double>();
  p.svm.shrinking = s.at("shrinking").get<bool>();
  p.svm.standardize = s.at("standardize").get<bool>();
  p.svm.tolerance = s.at("tolerance").get<double>();
  p.svm.max_iter = s.at("max_iter").get<long>();
  p.knn.n_neighbors = j.at("knn").at("n_neighbors").get<int>();
  return p;
}

}  // namespace

json model_to_json(const TrainedModel& model) {
  json doc = {{"format", kFormat},
              {"version", kVersion},
              {"kind", std::string(model_kind_name(model.kind))},
              {"params", params_to_json(model.params)},
              {"feature_names", model.feature_names},
              {"seed", model.seed},
              {"width", model.width},
              {"warnings", model.warnings}};
  if (const auto* f = model.forest()) {
    json trees = json::array();
    for (const auto& t : f->trees) trees.push_back(node_to_json(t, 0));
    doc["trees"] = std::move(trees);
    doc["importances"] = vector_to_json(f->importances);
  } else if (const auto* s = model.svm()) {
    doc["weights"] = vector_to_json(s->weights);
    doc["bias"] = s->bias;
    doc["iterations"] = s->iterations;
    doc["final_gap"] = s->final_gap;
  } else if (const auto* k = model.knn()) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < k->train_x.rows(); ++i)
      rows.push_back(vector_to_json(k->train_x.row(i).transpose()));
    doc["train_x"] = std::move(rows);
    doc["train_y"] = std::vector<int>(k->train_y.begin(), k->train_y.end());
    doc["effective_k"] = k->effective_k;
  }
  return doc;
}

TrainedModel model_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kFormat)
      throw Error(Errc::ConfigError, "not a pdeeg model document");
    if (doc.at("version").get<int>() != kVersion)
      throw Error(Errc::ConfigError,
                  "unsupported model version " + std::to_string(doc.at("version").get<int>()));
    TrainedModel m;
    m.kind = parse_model_kind(doc.at("kind").get<std::string>());
    m.params = params_from_json(doc.at("params"));
    m.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.width = doc.at("width").get<Eigen::Index>();
    m.warnings = doc.at("warnings").get<std::vector<std::string>>();
    switch (m.kind) {
      case ModelKind::RandomForest:
      case ModelKind::ExtraTrees: {
        Forest f;
        f.extra = m.kind == ModelKind::ExtraTrees;
        for (const auto& t : doc.at("trees")) {
          DecisionTree tree;
          node_from_json(t, tree);
          f.trees.push_back(std::move(tree));
        }
        f.importances = vector_from_json(doc.at("importances"));
        m.body = std::move(f);
        break;
      }
      case ModelKind::LinearSvm: {
        LinearSvm s;
        s.weights = vector_from_json(doc.at("weights"));
        s.bias = doc.at("bias").get<double>();
        s.iterations = doc.at("iterations").get<long>();
        s.final_gap = doc.at("final_gap").get<double>();
        m.body = std::move(s);
        break;
      }
      case ModelKind::Knn: {
        KnnModel k;
        const auto& rows = doc.at("train_x");
        k.train_x.resize(static_cast<Eigen::Index>(rows.size()), m.width);
        for (std::size_t i = 0; i < rows.size(); ++i)
          k.train_x.row(static_cast<Eigen::Index>(i)) = vector_from_json(rows[i]).transpose();
        const auto ys = doc.at("train_y").get<std::vector<int>>();
        k.train_y = Eigen::Map<const Eigen::VectorXi>(ys.data(), static_cast<Eigen::Index>(ys.size()));
        k.effective_k = doc.at("effective_k").get<int>();
        m.body = std::move(k);
        break;
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("malformed model document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Search space

namespace {

struct Axis {
  std::size_t size;
  std::function<void(HyperParams&, std::size_t)> apply;
};

std::vector<Axis> axes(const SearchSpace& s) {
  std::vector<Axis> out;
  auto add = [&](const auto& list, auto setter) {
    if (!list.empty())
      out.push_back({list.size(), [&list, setter](HyperParams& p, std::size_t i) {
                       setter(p, list[i]);
                     }});
  };
  switch (s.kind) {
    case ModelKind::RandomForest:
    case ModelKind::ExtraTrees:
      add(s.n_estimators, [](HyperParams& p, int v) { p.forest.n_estimators = v; });
      add(s.max_leaf_nodes, [](HyperParams& p, int v) { p.forest.max_leaf_nodes = v; });
      add(s.max_depth, [](HyperParams& p, int v) { p.forest.max_depth = v; });
      break;
    case ModelKind::LinearSvm:
      add(s.c, [](HyperParams& p, double v) { p.svm.c = v; });
      break;
    case ModelKind::Knn:
      add(s.n_neighbors, [](HyperParams& p, int v) { p.knn.n_neighbors = v; });
      break;
  }
  return out;
}

}  // namespace

std::size_t SearchSpace::size() const {
  const auto a = axes(*this);
  if (a.empty()) return 0;
  std::size_t n = 1;
  for (const auto& ax : a) n *= ax.size;
  return n;
}

HyperParams SearchSpace::at(std::size_t index, const HyperParams& base) const {
  const auto a = axes(*this);
  HyperParams p = base;
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    it->apply(p, index % it->size);
    index /= it->size;
  }
  return p;
}

}  // namespace pdeeg
