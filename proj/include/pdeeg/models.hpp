#pragma once

// Binary classifiers over dense feature matrices: random forest, extra
// trees, linear SVM and k-nearest neighbours. Labels are 0/1 with 1 the
// positive class.

#include <Eigen/Dense>

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pdeeg {

enum class ModelKind { RandomForest, ExtraTrees, LinearSvm, Knn };

std::string_view model_kind_name(ModelKind kind) noexcept;  // "RF", "ET", "SVM", "KNN"
/// Accepts the short names above. Throws Error(ConfigError).
ModelKind parse_model_kind(std::string_view name);

struct ForestParams {
  int n_estimators = 1000;
  int max_leaf_nodes = 100;  // <= 0: unlimited
  int max_depth = 10;
  int min_samples_split = 2;
};

struct SvmParams {
  double c = 1.0;
  bool shrinking = false;  // no active-set shrinking; every pass sweeps all variables
  bool standardize = true;
  double tolerance = 1e-3;
  long max_iter = 2'000'000;
};

struct KnnParams {
  int n_neighbors = 1000;
};

/// Defaults are the tuned values reported for the cohort.
struct HyperParams {
  ForestParams forest;
  SvmParams svm;
  KnnParams knn;
};

struct ClassifierSpec {
  ModelKind kind = ModelKind::RandomForest;
  HyperParams params;
};

// ---------------------------------------------------------------------------
// Trees

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x <= threshold goes left
  int left = -1;
  int right = -1;
  int depth = 0;
  int samples = 0;
  double positive_fraction = 0.0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  /// Majority vote of the leaf (ties vote 0).
  int vote(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  int leaf_count() const;
  int max_depth() const;
};

struct Forest {
  std::vector<DecisionTree> trees;
  Eigen::VectorXd importances;  // mean impurity decrease, sums to 1 (or all 0)
  bool extra = false;
};

struct LinearSvm {
  Eigen::VectorXd weights;  // in input units
  double bias = 0.0;
  long iterations = 0;
  double final_gap = 0.0;
};

struct KnnModel {
  Eigen::MatrixXd train_x;
  Eigen::VectorXi train_y;
  int effective_k = 1;
};

struct TrainedModel {
  ModelKind kind = ModelKind::RandomForest;
  HyperParams params;
  std::vector<std::string> feature_names;
  std::uint64_t seed = 0;
  Eigen::Index width = 0;
  std::variant<Forest, LinearSvm, KnnModel> body;
  std::vector<std::string> warnings;  // e.g. DegenerateLabels, effective_k clamp

  const Forest* forest() const { return std::get_if<Forest>(&body); }
  const LinearSvm* svm() const { return std::get_if<LinearSvm>(&body); }
  const KnnModel* knn() const { return std::get_if<KnnModel>(&body); }
};

/// Bootstrap samples, sqrt(d) candidate features per split, best Gini
/// threshold per candidate, best-first growth bounded by depth and leaves.
/// A single-class y yields a constant predictor flagged DegenerateLabels.
TrainedModel fit_random_forest(const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                               const ForestParams& params, std::uint64_t seed);

/// Like fit_random_forest on the full sample, with one uniform random
/// threshold per candidate feature.
TrainedModel fit_extra_trees(const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                             const ForestParams& params, std::uint64_t seed);

/// Soft-margin linear SVM by SMO (maximal violating pair, no shrinking).
/// Errors: SingleClass, NoConvergence.
TrainedModel fit_linear_svm(const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                            const SvmParams& params = {});

/// Stores the training set; effective_k = min(k, n_train).
/// Errors: EmptyTrainingSet, InvalidSpec (k < 1).
TrainedModel fit_knn(const Eigen::MatrixXd& x, const Eigen::VectorXi& y, int k);

/// Dispatches on spec.kind.
TrainedModel fit(const ClassifierSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                 std::uint64_t seed);

struct Prediction {
  Eigen::VectorXi labels;
  Eigen::VectorXd scores;
};

/// Scores: forests = positive vote fraction, SVM = signed decision value,
/// KNN = positive neighbour fraction. Labels: score > 0.5 for fractions
/// (vote ties go to 0), score >= 0 for the SVM. Errors: WidthMismatch.
Prediction predict(const TrainedModel& model, const Eigen::MatrixXd& x);

/// Decision threshold used by predict for the model kind.
bool label_from_score(ModelKind kind, double score);

/// Versioned JSON document (trees as nested nodes, SVM as weights + bias,
/// KNN as its stored training set).
nlohmann::json model_to_json(const TrainedModel& model);
/// Errors: ConfigError on a malformed or unsupported document.
TrainedModel model_from_json(const nlohmann::json& doc);

// ---------------------------------------------------------------------------
// Hyperparameter search

/// Discrete grid; an empty list keeps the base value for that parameter.
struct SearchSpace {
  ModelKind kind = ModelKind::RandomForest;
  std::vector<int> n_estimators;
  std::vector<int> max_leaf_nodes;
  std::vector<int> max_depth;
  std::vector<double> c;
  std::vector<int> n_neighbors;

  /// Number of distinct configurations (0 when no list applies to kind).
  std::size_t size() const;
  /// Configuration `index` in row-major grid order, on top of base.
  HyperParams at(std::size_t index, const HyperParams& base) const;
};

struct SearchResult {
  HyperParams best;
  double best_accuracy = 0.0;
  std::vector<std::size_t> drawn;   // grid indices in draw order
  std::vector<double> accuracies;   // mean CV accuracy per draw
};

/// Draws min(n_draws, size) distinct configurations uniformly, scores each by
/// mean k-fold accuracy, keeps the best (first drawn on ties).
/// Errors: EmptySpace, InvalidSpec (n_draws < 1).
SearchResult random_grid_search(const SearchSpace& space, const Eigen::MatrixXd& x,
                                const Eigen::VectorXi& y, int k_folds, int n_draws,
                                std::uint64_t seed, const HyperParams& base = {});

}  // namespace pdeeg
