#include "pdeeg/error.hpp"
#include "pdeeg/models.hpp"
#include "pdeeg/parallel.hpp"
#include "pdeeg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

namespace pdeeg {

const TreeNode& DecisionTree::leaf_for(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  const TreeNode* node = &nodes.front();
  while (node->feature >= 0)
    node = &nodes[static_cast<std::size_t>(row[node->feature] <= node->threshold ? node->left
                                                                                 : node->right)];
  return *node;
}

int DecisionTree::vote(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  return leaf_for(row).positive_fraction > 0.5 ? 1 : 0;
}

int DecisionTree::leaf_count() const {
  return static_cast<int>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

int DecisionTree::max_depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

namespace {

double gini(double positives, double total) {
  if (total <= 0.0) return 0.0;
  const double p = positives / total;
  return 2.0 * p * (1.0 - p);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double improvement = -1.0;  // n_node * gini - n_left * gini_left - n_right * gini_right
};

struct Frontier {
  int node = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  Split split;
};

struct FrontierOrder {
  bool operator()(const Frontier& a, const Frontier& b) const {
    if (a.split.improvement != b.split.improvement)
      return a.split.improvement < b.split.improvement;
    return a.node > b.node;  // earlier nodes first on ties
  }
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXi& y, const ForestParams& params,
              bool extra, std::uint64_t seed)
      : x_(x), y_(y), params_(params), extra_(extra), rng_(seed) {
    const auto d = static_cast<int>(x.cols());
    mtry_ = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))));
    features_.resize(static_cast<std::size_t>(d));
    std::iota(features_.begin(), features_.end(), 0);
    importance_ = Eigen::VectorXd::Zero(d);
  }

  DecisionTree build(std::vector<int> samples) {
    samples_ = std::move(samples);
    DecisionTree tree;
    tree.nodes.push_back(make_node(0, samples_.size(), 0));

    std::priority_queue<Frontier, std::vector<Frontier>, FrontierOrder> frontier;
    auto consider = [&](int node, std::size_t begin, std::size_t end) {
      Split s = find_split(tree.nodes[static_cast<std::size_t>(node)], begin, end);
      if (s.feature >= 0) frontier.push({node, begin, end, s});
    };
    consider(0, 0, samples_.size());

    int leaves = 1;
    while (!frontier.empty() &&
           (params_.max_leaf_nodes <= 0 || leaves < params_.max_leaf_nodes)) {
      const Frontier f = frontier.top();
      frontier.pop();
      const auto mid = static_cast<std::size_t>(
          std::partition(samples_.begin() + static_cast<std::ptrdiff_t>(f.begin),
                         samples_.begin() + static_cast<std::ptrdiff_t>(f.end),
                         [&](int s) { return x_(s, f.split.feature) <= f.split.threshold; }) -
          samples_.begin());
      const int depth = tree.nodes[static_cast<std::size_t>(f.node)].depth + 1;
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(make_node(f.begin, mid, depth));
      const int right = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(make_node(mid, f.end, depth));
      auto& parent = tree.nodes[static_cast<std::size_t>(f.node)];
      parent.feature = f.split.feature;
      parent.threshold = f.split.threshold;
      parent.left = left;
      parent.right = right;
      importance_[f.split.feature] += f.split.improvement;
      ++leaves;
      consider(left, f.begin, mid);
      consider(right, mid, f.end);
    }
    return tree;
  }

  const Eigen::VectorXd& importance() const { return importance_; }

 private:
  TreeNode make_node(std::size_t begin, std::size_t end, int depth) const {
    TreeNode n;
    n.depth = depth;
    n.samples = static_cast<int>(end - begin);
    int pos = 0;
    for (std::size_t i = begin; i < end; ++i) pos += y_[samples_[i]];
    n.positive_fraction = n.samples > 0 ? static_cast<double>(pos) / n.samples : 0.0;
    return n;
  }

  Split find_split(const TreeNode& node, std::size_t begin, std::size_t end) {
    Split best;
    const double total = static_cast<double>(end - begin);
    const double positives = node.positive_fraction * total;
    const double parent_impurity = gini(positives, total);
    if (node.depth >= params_.max_depth || node.samples < params_.min_samples_split ||
        parent_impurity <= 0.0)
      return best;

    // Draw features without replacement until mtry non-constant ones are seen.
    int evaluated = 0;
    const auto d = features_.size();
    for (std::size_t drawn = 0; drawn < d && evaluated < mtry_; ++drawn) {
      std::uniform_int_distribution<std::size_t> pick(drawn, d - 1);
      std::swap(features_[drawn], features_[pick(rng_)]);
      const int f = features_[drawn];
      const Split s = extra_ ? random_split(f, begin, end, positives, parent_impurity)
                             : best_split(f, begin, end, positives, parent_impurity);
      if (s.feature < 0) continue;  // constant in this node
      ++evaluated;
      if (s.improvement > best.improvement) best = s;
    }
    return best;
  }

  Split best_split(int f, std::size_t begin, std::size_t end, double positives,
                   double parent_impurity) {
    buffer_.clear();
    for (std::size_t i = begin; i < end; ++i)
      buffer_.emplace_back(x_(samples_[i], f), y_[samples_[i]]);
    std::sort(buffer_.begin(), buffer_.end());
    Split best;
    if (buffer_.front().first == buffer_.back().first) return best;

    const double total = static_cast<double>(buffer_.size());
    double left_n = 0.0, left_pos = 0.0;
    for (std::size_t i = 0; i + 1 < buffer_.size(); ++i) {
      left_n += 1.0;
      left_pos += buffer_[i].second;
      if (buffer_[i].first == buffer_[i + 1].first) continue;
      const double right_n = total - left_n;
      const double right_pos = positives - left_pos;
      const double improvement = total * parent_impurity - left_n * gini(left_pos, left_n) -
                                 right_n * gini(right_pos, right_n);
      if (improvement > best.improvement) {
        best.feature = f;
        best.improvement = improvement;
        double t = 0.5 * (buffer_[i].first + buffer_[i + 1].first);
        if (!(t < buffer_[i + 1].first)) t = buffer_[i].first;
        best.threshold = t;
      }
    }
    return best;
  }

  Split random_split(int f, std::size_t begin, std::size_t end, double positives,
                     double parent_impurity) {
    double lo = x_(samples_[begin], f), hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      const double v = x_(samples_[i], f);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    Split s;
    if (lo == hi) return s;
    std::uniform_real_distribution<double> draw(lo, hi);
    const double t = draw(rng_);
    double left_n = 0.0, left_pos = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      if (x_(samples_[i], f) <= t) {
        left_n += 1.0;
        left_pos += y_[samples_[i]];
      }
    }
    const double total = static_cast<double>(end - begin);
    const double right_n = total - left_n;
    if (left_n == 0.0 || right_n == 0.0) return s;
    s.feature = f;
    s.threshold = t;
    s.improvement = total * parent_impurity - left_n * gini(left_pos, left_n) -
                    right_n * gini(positives - left_pos, right_n);
    return s;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXi& y_;
  ForestParams params_;
  bool extra_;
  std::mt19937_64 rng_;
  int mtry_ = 1;
  std::vector<int> features_;
  std::vector<int> samples_;
  std::vector<std::pair<double, int>> buffer_;
  Eigen::VectorXd importance_;
};

TrainedModel fit_forest(const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                        const ForestParams& params, std::uint64_t seed, bool extra) {
  if (x.rows() == 0 || x.cols() == 0) throw Error(Errc::EmptyTrainingSet, "no training rows");
  if (y.size() != x.rows()) throw Error(Errc::WidthMismatch, "label count differs from rows");
  if (params.n_estimators < 1 || params.max_depth < 1)
    throw Error(Errc::InvalidSpec, "n_estimators and max_depth must be >= 1");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0 && y[i] != 1) throw Error(Errc::InvalidSpec, "labels must be 0 or 1");

  TrainedModel model;
  model.kind = extra ? ModelKind::ExtraTrees : ModelKind::RandomForest;
  model.params.forest = params;
  model.seed = seed;
  model.width = x.cols();
  const int positives = y.sum();
  if (positives == 0 || positives == y.size())
    model.warnings.push_back("DegenerateLabels: training labels contain a single class");

  const auto n = static_cast<std::size_t>(x.rows());
  const auto count = static_cast<std::size_t>(params.n_estimators);
  Forest forest;
  forest.extra = extra;
  forest.trees.resize(count);
  std::vector<Eigen::VectorXd> importances(count);

  parallel_for(count, [&](std::size_t t) {
    const std::uint64_t tree_seed = synth::derive_seed(seed, t);
    TreeBuilder builder(x, y, params, extra, tree_seed);
    std::vector<int> samples(n);
    if (extra) {
      std::iota(samples.begin(), samples.end(), 0);
    } else {
      std::mt19937_64 boot(synth::derive_seed(tree_seed, 0xB007));
      std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
      for (auto& s : samples) s = pick(boot);
    }
    forest.trees[t] = builder.build(std::move(samples));
    importances[t] = builder.importance();
  });

  forest.importances = Eigen::VectorXd::Zero(x.cols());
  for (const auto& imp : importances) {
    const double s = imp.sum();
    if (s > 0.0) forest.importances += imp / s;
  }
  const double total = forest.importances.sum();
  if (total > 0.0) forest.importances /= total;
  model.body = std::move(forest);
  return model;
}

}  // namespace

TrainedModel fit_random_forest(const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                               const ForestParams& params, std::uint64_t seed) {
  return fit_forest(x, y, params, seed, false);
}

TrainedModel fit_extra_trees(const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                             const ForestParams& params, std::uint64_t seed) {
  return fit_forest(x, y, params, seed, true);
}

}  // namespace pdeeg
