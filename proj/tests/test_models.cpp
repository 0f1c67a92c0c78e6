#include <doctest.h>

#include "oracles.hpp"
#include "pdeeg/error.hpp"
#include "pdeeg/models.hpp"

#include <cmath>
#include <random>

using namespace pdeeg;

namespace {

struct Data {
  Eigen::MatrixXd x;
  Eigen::VectorXi y;
};

Data xor4() {
  Data d{Eigen::MatrixXd(4, 2), Eigen::VectorXi(4)};
  d.x << 0, 0, 0, 1, 1, 0, 1, 1;
  d.y << 0, 1, 1, 0;
  return d;
}

Data blobs(int per_class, double gap, std::uint64_t seed, int dims = 2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Data d{Eigen::MatrixXd(2 * per_class, dims), Eigen::VectorXi(2 * per_class)};
  for (int i = 0; i < 2 * per_class; ++i) {
    const int label = i < per_class ? 0 : 1;
    for (int j = 0; j < dims; ++j) d.x(i, j) = n01(rng) + (label ? gap : -gap) * (j == 0 ? 1.0 : 0.5);
    d.y[i] = label;
  }
  return d;
}

double accuracy(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  return static_cast<double>((a.array() == b.array()).count()) / static_cast<double>(a.size());
}

const ForestParams kSmallForest{.n_estimators = 25, .max_leaf_nodes = 100, .max_depth = 10, .min_samples_split = 2};

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::IoError;
}

}  // namespace

TEST_CASE("kind names") {
  for (auto k : {ModelKind::RandomForest, ModelKind::ExtraTrees, ModelKind::LinearSvm, ModelKind::Knn})
    CHECK(parse_model_kind(model_kind_name(k)) == k);
  CHECK(model_kind_name(ModelKind::ExtraTrees) == "ET");
  CHECK(error_of([] { parse_model_kind("GBM"); }) == Errc::ConfigError);
}

TEST_CASE("forests learn XOR") {
  const auto d = xor4();
  const ForestParams p{.n_estimators = 50, .max_leaf_nodes = 100, .max_depth = 10, .min_samples_split = 2};
  CHECK(accuracy(predict(fit_extra_trees(d.x, d.y, p, 1), d.x).labels, d.y) == 1.0);
  // Bootstrap draws of four points can miss a corner; a wider ensemble votes it back.
  const ForestParams wide{.n_estimators = 400, .max_leaf_nodes = 100, .max_depth = 10, .min_samples_split = 2};
  CHECK(accuracy(predict(fit_random_forest(d.x, d.y, wide, 1), d.x).labels, d.y) == 1.0);
  const auto single = fit_extra_trees(d.x, d.y, {.n_estimators = 1}, 3);
  CHECK(accuracy(predict(single, d.x).labels, d.y) == 1.0);
}

TEST_CASE("single-class training gives a constant predictor") {
  const auto d = blobs(10, 1.0, 2);
  const Eigen::VectorXi ones = Eigen::VectorXi::Ones(d.y.size());
  for (auto fitter : {&fit_random_forest, &fit_extra_trees}) {
    const auto m = fitter(d.x, ones, kSmallForest, 4);
    const auto p = predict(m, d.x);
    CHECK(accuracy(p.labels, ones) == 1.0);
    CHECK((p.scores.array() == p.scores[0]).all());
    REQUIRE(!m.warnings.empty());
    CHECK(m.warnings[0].rfind("DegenerateLabels", 0) == 0);
  }
  CHECK(error_of([&] { fit_linear_svm(d.x, ones); }) == Errc::SingleClass);
}

TEST_CASE("trees respect depth and leaf limits") {
  const auto d = blobs(300, 0.3, 5, 6);
  for (auto fitter : {&fit_random_forest, &fit_extra_trees}) {
    const auto m = fitter(d.x, d.y, {.n_estimators = 20, .max_leaf_nodes = 100, .max_depth = 10}, 6);
    for (const auto& t : m.forest()->trees) {
      CHECK(t.max_depth() <= 10);
      CHECK(t.leaf_count() <= 100);
      int leaves = 0;
      for (const auto& n : t.nodes) {
        CHECK(n.depth <= 10);
        if (n.feature < 0) ++leaves;
        else CHECK(n.left > 0);
      }
      CHECK(leaves == t.leaf_count());
    }
    const auto shallow = fitter(d.x, d.y, {.n_estimators = 5, .max_leaf_nodes = 7, .max_depth = 2}, 6);
    for (const auto& t : shallow.forest()->trees) {
      CHECK(t.max_depth() <= 2);
      CHECK(t.leaf_count() <= 4);
    }
  }
}

TEST_CASE("ensembles do at least as well as their average member") {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = blobs(60, 0.4, 100 + seed, 4);
    const auto m = fit_random_forest(d.x, d.y, {.n_estimators = 15, .max_leaf_nodes = 8, .max_depth = 3}, seed);
    const double ensemble = accuracy(predict(m, d.x).labels, d.y);
    double members = 0.0;
    for (const auto& t : m.forest()->trees) {
      Eigen::VectorXi v(d.x.rows());
      for (Eigen::Index r = 0; r < d.x.rows(); ++r) v[r] = t.vote(d.x.row(r));
      members += accuracy(v, d.y) / static_cast<double>(m.forest()->trees.size());
    }
    if (ensemble >= members) ++wins;
  }
  CHECK(wins >= 18);
}

TEST_CASE("importances are normalized") {
  const auto d = blobs(50, 1.0, 7, 5);
  const auto m = fit_random_forest(d.x, d.y, kSmallForest, 8);
  CHECK(m.forest()->importances.sum() == doctest::Approx(1.0));
  CHECK((m.forest()->importances.array() >= 0.0).all());
  Eigen::Index top = 0;
  m.forest()->importances.maxCoeff(&top);
  CHECK(top == 0);
}

TEST_CASE("extra trees are deterministic") {
  const auto d = blobs(40, 0.5, 9, 3);
  const auto a = fit_extra_trees(d.x, d.y, {.n_estimators = 1}, 12);
  const auto b = fit_extra_trees(d.x, d.y, {.n_estimators = 1}, 12);
  CHECK(model_to_json(a) == model_to_json(b));
}

TEST_CASE("extra trees thresholds spread across the feature range") {
  const int n = 40;
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXi y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(i) / (n - 1);
    y[i] = x(i, 0) > 0.5;
  }
  const ForestParams stump{.n_estimators = 1, .max_leaf_nodes = 2, .max_depth = 1};
  int low = 0, high = 0, rf_off_centre = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const double t = fit_extra_trees(x, y, stump, seed).forest()->trees[0].nodes[0].threshold;
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
    if (t < 0.25) ++low;
    if (t > 0.75) ++high;
    if (seed < 100) {
      const double r = fit_random_forest(x, y, stump, seed).forest()->trees[0].nodes[0].threshold;
      if (std::abs(r - 0.5) > 0.05) ++rf_off_centre;
    }
  }
  CHECK(low > 150);
  CHECK(high > 150);
  CHECK(rf_off_centre < 20);
}

TEST_CASE("memorized points score one") {
  Data d = blobs(10, 0.2, 10);
  for (int i = 0; i < 10; ++i) d.x.row(10 + i) = d.x.row(10);
  const auto rf = fit_random_forest(d.x, d.y, {.n_estimators = 30}, 11);
  CHECK(predict(rf, d.x.row(10)).scores[0] == 1.0);
  const auto et = fit_extra_trees(d.x, d.y, {.n_estimators = 30}, 11);
  CHECK(predict(et, d.x.row(10)).scores[0] == 1.0);
}

TEST_CASE("SVM on two points") {
  Eigen::MatrixXd x(2, 1);
  x << -1.0, 1.0;
  Eigen::VectorXi y(2);
  y << 0, 1;
  const auto m = fit_linear_svm(x, y);
  const auto p = predict(m, x);
  CHECK(p.labels == y);
  const double boundary = -m.svm()->bias / m.svm()->weights[0];
  CHECK(std::abs(boundary) < 1e-6);
}

TEST_CASE("SVM reaches the maximum margin on separable blobs") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto d = blobs(30, 3.0, seed);
    const auto m = fit_linear_svm(d.x, d.y, {.c = 100.0, .standardize = false, .tolerance = 1e-6});
    CHECK(accuracy(predict(m, d.x).labels, d.y) == 1.0);
    const auto& w = m.svm()->weights;
    double margin = INFINITY;
    for (Eigen::Index i = 0; i < d.x.rows(); ++i)
      margin = std::min(margin, (d.y[i] ? 1.0 : -1.0) * (d.x.row(i).dot(w) + m.svm()->bias) / w.norm());
    CHECK(margin >= 0.9 * oracle::max_margin_2d(d.x, d.y));
  }
  const auto d = blobs(30, 3.0, 4);
  CHECK(accuracy(predict(fit_linear_svm(d.x, d.y), d.x).labels, d.y) == 1.0);
}

TEST_CASE("SVM label flip negates the decision function") {
  const auto d = blobs(25, 0.8, 5);
  const SvmParams p{.c = 1.0, .tolerance = 1e-6};
  const auto a = fit_linear_svm(d.x, d.y, p);
  const Eigen::VectorXi flipped = (1 - d.y.array()).matrix();
  const auto b = fit_linear_svm(d.x, flipped, p);
  CHECK((a.svm()->weights + b.svm()->weights).norm() <= 1e-4 * a.svm()->weights.norm());
  CHECK(std::abs(a.svm()->bias + b.svm()->bias) <= 1e-4 * (1.0 + std::abs(a.svm()->bias)));
}

TEST_CASE("SVM score is affine") {
  const auto d = blobs(25, 1.0, 6, 3);
  const auto m = fit_linear_svm(d.x, d.y);
  const auto s1 = predict(m, d.x).scores;
  const auto s3 = predict(m, 3.0 * d.x).scores;
  const double b = m.svm()->bias;
  CHECK(((s3.array() - b) - 3.0 * (s1.array() - b)).abs().maxCoeff() < 1e-9);
  const auto p = predict(m, d.x);
  for (Eigen::Index i = 0; i < p.scores.size(); ++i) CHECK(p.labels[i] == (p.scores[i] >= 0.0 ? 1 : 0));
}

TEST_CASE("SVM reports non-convergence") {
  const auto d = blobs(50, 0.1, 7);
  CHECK(error_of([&] { fit_linear_svm(d.x, d.y, {.tolerance = 1e-12, .max_iter = 3}); }) == Errc::NoConvergence);
  CHECK(error_of([&] { fit_linear_svm(d.x, d.y, {.c = 0.0}); }) == Errc::InvalidSpec);
}

TEST_CASE("nearest neighbours agree with a full sort") {
  Eigen::MatrixXd x(3, 2);
  x << 0, 0, 3, 0, 0, 5;
  Eigen::VectorXi y(3);
  y << 1, 0, 1;
  Eigen::MatrixXd q(4, 2);
  q << 0.1, 0.1, 2.9, 0.2, 1.0, 4.0, -3.0, -3.0;
  for (int k = 1; k <= 3; ++k) {
    const auto p = predict(fit_knn(x, y, k), q);
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
      const double want = oracle::knn_fraction(x, y, q.row(r), k);
      CHECK(p.scores[r] == doctest::Approx(want));
      CHECK(p.labels[r] == (want > 0.5 ? 1 : 0));
    }
  }
}

TEST_CASE("nearest neighbour edge cases") {
  const auto d = blobs(20, 0.3, 8, 4);
  CHECK(accuracy(predict(fit_knn(d.x, d.y, 1), d.x).labels, d.y) == 1.0);
  Eigen::VectorXi skewed = d.y;
  skewed.head(5).setOnes();
  const auto all = fit_knn(d.x, skewed, 1000);
  CHECK(all.knn()->effective_k == 40);
  REQUIRE(!all.warnings.empty());
  CHECK(all.warnings[0].rfind("KnnClamped", 0) == 0);
  CHECK((predict(all, d.x).labels.array() == 1).all());
  CHECK(error_of([&] { fit_knn(d.x, d.y, 0); }) == Errc::InvalidSpec);
  CHECK(error_of([&] { fit_knn(Eigen::MatrixXd(0, 4), Eigen::VectorXi(0), 1); }) == Errc::EmptyTrainingSet);
  CHECK(error_of([&] { predict(fit_knn(d.x, d.y, 1), Eigen::MatrixXd::Zero(2, 3)); }) == Errc::WidthMismatch);
}

TEST_CASE("random forest scores are vote fractions") {
  const auto d = blobs(30, 0.3, 9, 3);
  const auto m = fit_random_forest(d.x, d.y, kSmallForest, 1);
  const auto p = predict(m, d.x);
  for (Eigen::Index i = 0; i < p.scores.size(); ++i) {
    const double votes = p.scores[i] * 25.0;
    CHECK(std::abs(votes - std::round(votes)) < 1e-9);
    CHECK(p.labels[i] == (p.scores[i] > 0.5 ? 1 : 0));
  }
}

TEST_CASE("models serialize and reload exactly") {
  const auto d = blobs(30, 0.6, 10, 3);
  for (auto kind : {ModelKind::RandomForest, ModelKind::ExtraTrees, ModelKind::LinearSvm, ModelKind::Knn}) {
    CAPTURE(model_kind_name(kind));
    ClassifierSpec spec{kind, {}};
    spec.params.forest.n_estimators = 10;
    spec.params.knn.n_neighbors = 5;
    const auto a = fit(spec, d.x, d.y, 77);
    const auto b = fit(spec, d.x, d.y, 77);
    CHECK(model_to_json(a).dump() == model_to_json(b).dump());
    const auto back = model_from_json(nlohmann::json::parse(model_to_json(a).dump()));
    CHECK(back.kind == kind);
    const auto pa = predict(a, d.x), pb = predict(back, d.x);
    CHECK(pa.labels == pb.labels);
    CHECK((pa.scores - pb.scores).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(error_of([] { model_from_json(nlohmann::json{{"format", "other"}}); }) == Errc::ConfigError);
}

TEST_CASE("grid search") {
  SearchSpace space{.kind = ModelKind::Knn, .n_neighbors = {7}};
  CHECK(space.size() == 1);
  const auto d = blobs(20, 2.5, 11);
  const auto one = random_grid_search(space, d.x, d.y, 3, 10, 1);
  CHECK(one.best.knn.n_neighbors == 7);
  CHECK(one.drawn.size() == 1);

  space.n_neighbors = {1, static_cast<int>(d.x.rows())};
  const auto r = random_grid_search(space, d.x, d.y, 4, 2, 5);
  CHECK(r.best.knn.n_neighbors == 1);
  CHECK(r.drawn.size() == 2);
  const auto again = random_grid_search(space, d.x, d.y, 4, 2, 5);
  CHECK(again.drawn == r.drawn);
  CHECK(again.accuracies == r.accuracies);

  SearchSpace forest{.kind = ModelKind::RandomForest, .n_estimators = {5, 10}, .max_depth = {2, 4, 6}};
  CHECK(forest.size() == 6);
  const auto hp = forest.at(5, {});
  CHECK(hp.forest.n_estimators == 10);
  CHECK(hp.forest.max_depth == 6);
  CHECK(error_of([&] { random_grid_search(SearchSpace{.kind = ModelKind::LinearSvm}, d.x, d.y, 3, 2, 1); }) ==
        Errc::EmptySpace);
  CHECK(error_of([&] { random_grid_search(space, d.x, d.y, 3, 0, 1); }) == Errc::InvalidSpec);
}
