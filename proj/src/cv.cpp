#include "pdeeg/error.hpp"
#include "pdeeg/eval.hpp"
#include "pdeeg/parallel.hpp"
#include "pdeeg/synth.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

namespace pdeeg {

using nlohmann::json;

namespace {

void check_k(Eigen::Index units, int k, const char* what) {
  if (k < 2) throw Error(Errc::InvalidSpec, "k must be >= 2, got " + std::to_string(k));
  if (k > units)
    throw Error(Errc::KTooLarge, "k = " + std::to_string(k) + " exceeds " +
                                     std::to_string(units) + " " + what);
}

std::vector<Fold> deal(const std::vector<std::vector<Eigen::Index>>& pools, int k,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Fold> folds(static_cast<std::size_t>(k));
  std::size_t next = 0;
  for (auto pool : pools) {
    std::shuffle(pool.begin(), pool.end(), rng);
    for (auto row : pool) folds[next++ % folds.size()].push_back(row);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace

std::vector<Fold> kfold_split(Eigen::Index n_rows, int k, std::uint64_t seed) {
  check_k(n_rows, k, "rows");
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n_rows));
  std::iota(all.begin(), all.end(), 0);
  return deal({all}, k, seed);
}

std::vector<Fold> kfold_split(const Eigen::VectorXi& labels, int k, std::uint64_t seed) {
  check_k(labels.size(), k, "rows");
  std::vector<std::vector<Eigen::Index>> pools(2);
  for (Eigen::Index i = 0; i < labels.size(); ++i) pools[labels[i] == 1 ? 1 : 0].push_back(i);
  return deal(pools, k, seed);
}

std::vector<Fold> kfold_split_grouped(const Eigen::VectorXi& labels,
                                      std::span<const std::string> groups, int k,
                                      std::uint64_t seed) {
  if (static_cast<Eigen::Index>(groups.size()) != labels.size())
    throw Error(Errc::LengthMismatch, "one group name per row is required");
  std::map<std::string, std::vector<Eigen::Index>> rows_of;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto [it, fresh] = rows_of.try_emplace(groups[i]);
    if (fresh) order.push_back(groups[i]);
    it->second.push_back(static_cast<Eigen::Index>(i));
  }
  check_k(static_cast<Eigen::Index>(order.size()), k, "groups");

  // Deal group ids, then expand each group to its rows.
  std::vector<std::vector<Eigen::Index>> pools(2);
  for (std::size_t g = 0; g < order.size(); ++g) {
    const auto first = rows_of[order[g]].front();
    pools[labels[first] == 1 ? 1 : 0].push_back(static_cast<Eigen::Index>(g));
  }
  auto group_folds = deal(pools, k, seed);
  std::vector<Fold> folds(group_folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (auto g : group_folds[f]) {
      const auto& rows = rows_of[order[static_cast<std::size_t>(g)]];
      folds[f].insert(folds[f].end(), rows.begin(), rows.end());
    }
    std::sort(folds[f].begin(), folds[f].end());
  }
  return folds;
}

std::vector<Eigen::Index> complement(const Fold& test, Eigen::Index n_rows) {
  std::vector<Eigen::Index> out;
  out.reserve(static_cast<std::size_t>(n_rows) - test.size());
  std::size_t j = 0;
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    if (j < test.size() && test[j] == i) {
      ++j;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------

double cv_accuracy(const ClassifierSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                   int k, std::uint64_t seed) {
  const auto folds = kfold_split(y, k, seed);
  std::vector<double> acc(folds.size());
  parallel_for(folds.size(), [&](std::size_t f) {
    const auto train = complement(folds[f], x.rows());
    const auto model = fit(spec, x(train, Eigen::all), y(train), synth::derive_seed(seed, f));
    const auto pred = predict(model, x(folds[f], Eigen::all));
    acc[f] = metrics(confusion(y(folds[f]), pred.labels)).accuracy;
  });
  return std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(acc.size());
}

SearchResult random_grid_search(const SearchSpace& space, const Eigen::MatrixXd& x,
                                const Eigen::VectorXi& y, int k_folds, int n_draws,
                                std::uint64_t seed, const HyperParams& base) {
  const std::size_t size = space.size();
  if (size == 0) throw Error(Errc::EmptySpace, "search space has no configurations");
  if (n_draws < 1) throw Error(Errc::InvalidSpec, "n_draws must be >= 1");

  std::vector<std::size_t> pool(size);
  std::iota(pool.begin(), pool.end(), 0);
  std::mt19937_64 rng(seed);
  const std::size_t draws = std::min(size, static_cast<std::size_t>(n_draws));
  for (std::size_t i = 0; i < draws; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, size - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }

  SearchResult r;
  r.drawn.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(draws));
  r.accuracies.resize(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    const ClassifierSpec spec{space.kind, space.at(r.drawn[i], base)};
    r.accuracies[i] = cv_accuracy(spec, x, y, k_folds, seed);
    if (i == 0 || r.accuracies[i] > r.best_accuracy) {
      r.best_accuracy = r.accuracies[i];
      r.best = spec.params;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

CvReport cross_validate(const ClassifierSpec& spec, const Eigen::MatrixXd& x,
                        const Eigen::VectorXi& y, const CvOptions& options,
                        std::span<const std::string> groups,
                        std::span<const std::string> columns) {
  const Eigen::Index n = x.rows();
  if (y.size() != n) throw Error(Errc::LengthMismatch, "label count differs from rows");
  const long positives = y.sum();
  if (positives == 0 || positives == n)
    throw Error(Errc::SingleClass, "cross-validation needs both classes");

  CvReport report;
  report.kind = spec.kind;
  report.params = spec.params;
  report.options = options;
  if (options.search.enabled && !options.search.nested) {
    SearchSpace space = options.search.space;
    space.kind = spec.kind;
    report.params = random_grid_search(space, x, y, options.search.inner_k,
                                       options.search.n_draws, options.seed, spec.params)
                        .best;
  }

  std::vector<Fold> folds;
  if (options.grouped_by_subject) {
    if (groups.empty())
      throw Error(Errc::InvalidSpec, "subject-grouped folds need subject names");
    folds = kfold_split_grouped(y, groups, options.k, options.seed);
  } else {
    folds = kfold_split(y, options.k, options.seed);
  }

  report.folds.resize(folds.size());
  report.oof_scores = Eigen::VectorXd::Zero(n);
  Eigen::VectorXi oof_labels = Eigen::VectorXi::Zero(n);
  std::vector<Eigen::VectorXd> importances(folds.size());

  parallel_for(folds.size(), [&](std::size_t f) {
    auto& fr = report.folds[f];
    fr.test_rows = folds[f];
    const auto train = complement(folds[f], n);
    const Eigen::MatrixXd xt = x(train, Eigen::all);
    const Eigen::VectorXi yt = y(train);
    const long tp = yt.sum();
    if (tp == 0 || tp == yt.size())
      fr.warnings.push_back("FoldSingleClass: training fold " + std::to_string(f) +
                            " has a single class");

    ClassifierSpec fold_spec{spec.kind, report.params};
    if (options.search.enabled && options.search.nested) {
      SearchSpace space = options.search.space;
      space.kind = spec.kind;
      fold_spec.params = random_grid_search(space, xt, yt, options.search.inner_k,
                                            options.search.n_draws,
                                            synth::derive_seed(options.seed, 100 + f), report.params)
                             .best;
    }
    fr.params = fold_spec.params;

    const auto model = fit(fold_spec, xt, yt, synth::derive_seed(options.seed, f));
    for (const auto& w : model.warnings) fr.warnings.push_back(w);
    const auto pred = predict(model, x(folds[f], Eigen::all));
    fr.confusion = confusion(y(folds[f]), pred.labels);
    fr.metrics = metrics(fr.confusion);
    for (std::size_t i = 0; i < folds[f].size(); ++i) {
      report.oof_scores[folds[f][i]] = pred.scores[static_cast<Eigen::Index>(i)];
      oof_labels[folds[f][i]] = pred.labels[static_cast<Eigen::Index>(i)];
    }
    if (const auto* forest = model.forest()) importances[f] = forest->importances;
  });

  std::vector<Metrics> per_fold;
  for (const auto& fr : report.folds) {
    per_fold.push_back(fr.metrics);
    report.pooled += fr.confusion;
    for (const auto& w : fr.warnings)
      if (std::find(report.warnings.begin(), report.warnings.end(), w) == report.warnings.end())
        report.warnings.push_back(w);
  }
  report.mean = mean_metrics(per_fold);
  report.pooled_metrics = metrics(report.pooled);
  report.roc = roc_curve(y, report.oof_scores);
  report.roc_auc = report.roc.auc;
  report.pr = pr_curve(y, report.oof_scores);

  if (spec.kind == ModelKind::RandomForest || spec.kind == ModelKind::ExtraTrees) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.cols());
    for (const auto& imp : importances) sum += imp;
    std::vector<std::string> names(columns.begin(), columns.end());
    if (names.empty())
      for (Eigen::Index c = 0; c < x.cols(); ++c) names.push_back("x" + std::to_string(c));
    report.importance = summarize_importance(sum, names);
  }
  return report;
}

CvReport cross_validate(const ClassifierSpec& spec, const FeatureMatrix& fm,
                        const CvOptions& options) {
  return cross_validate(spec, fm.values, fm.labels, options, fm.subjects, fm.columns);
}

// ---------------------------------------------------------------------------

namespace {

json to_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}};
}

json to_json(const Metrics& m) {
  return {{"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"precision_undefined", m.precision_undefined},
          {"recall_undefined", m.recall_undefined},
          {"f1_undefined", m.f1_undefined}};
}

json to_json(const HyperParams& p, ModelKind kind) {
  switch (kind) {
    case ModelKind::RandomForest:
    case ModelKind::ExtraTrees:
      return {{"n_estimators", p.forest.n_estimators},
              {"max_leaf_nodes", p.forest.max_leaf_nodes},
              {"max_depth", p.forest.max_depth},
              {"min_samples_split", p.forest.min_samples_split}};
    case ModelKind::LinearSvm:
      return {{"kernel", "linear"},
              {"c", p.svm.c},
              {"shrinking", p.svm.shrinking},
              {"standardize", p.svm.standardize}};
    case ModelKind::Knn:
      return {{"n_neighbors", p.knn.n_neighbors}};
  }
  return json::object();
}

}  // namespace

json cv_report_to_json(const CvReport& r) {
  json folds = json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"test_size", f.test_rows.size()},
                     {"confusion", to_json(f.confusion)},
                     {"metrics", to_json(f.metrics)},
                     {"params", to_json(f.params, r.kind)},
                     {"warnings", f.warnings}});
  json roc = json::array();
  for (const auto& p : r.roc.points)
    roc.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}, {"threshold", p.threshold}});
  json pr = json::array();
  for (const auto& p : r.pr)
    pr.push_back({{"recall", p.recall}, {"precision", p.precision}, {"threshold", p.threshold}});

  json doc = {{"classifier", std::string(model_kind_name(r.kind))},
              {"params", to_json(r.params, r.kind)},
              {"cv",
               {{"k", r.options.k},
                {"seed", r.options.seed},
                {"grouped_by_subject", r.options.grouped_by_subject},
                {"search", r.options.search.enabled
                               ? (r.options.search.nested ? "nested" : "flat")
                               : "off"}}},
              {"folds", std::move(folds)},
              {"metrics", to_json(r.mean)},
              {"roc_auc", r.roc_auc},
              {"pooled_confusion", to_json(r.pooled)},
              {"pooled_metrics", to_json(r.pooled_metrics)},
              {"roc", std::move(roc)},
              {"pr", std::move(pr)},
              {"warnings", r.warnings}};
  if (r.importance) {
    const auto& imp = *r.importance;
    json cols = json::object();
    for (std::size_t i = 0; i < imp.columns.size(); ++i)
      cols[imp.columns[i]] = imp.per_column[static_cast<Eigen::Index>(i)];
    json bands = json::object();
    for (std::size_t i = 0; i < imp.bands.size(); ++i)
      bands[imp.bands[i]] = imp.per_band[static_cast<Eigen::Index>(i)];
    json types = json::object();
    for (std::size_t i = 0; i < imp.feature_types.size(); ++i)
      types[imp.feature_types[i]] = imp.per_feature_type[static_cast<Eigen::Index>(i)];
    doc["feature_importance"] = {{"per_column", cols}, {"per_band", bands}, {"per_feature_type", types}};
  }
  return doc;
}

}  // namespace pdeeg
