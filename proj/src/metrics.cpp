#include "pdeeg/error.hpp"
#include "pdeeg/eval.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace pdeeg {

void ConfusionMatrix::add(int truth, int predicted) {
  if (truth == 1) {
    if (predicted == 1) ++tp;
    else ++fn;
  } else {
    if (predicted == 1) ++fp;
    else ++tn;
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  tn += o.tn;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

ConfusionMatrix confusion(const Eigen::VectorXi& truth, const Eigen::VectorXi& predicted) {
  if (truth.size() != predicted.size())
    throw Error(Errc::LengthMismatch, "truth and prediction lengths differ");
  ConfusionMatrix cm;
  for (Eigen::Index i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

namespace {

double ratio(double num, double den, bool& undefined) {
  if (den == 0.0) {
    undefined = true;
    return 0.0;
  }
  return num / den;
}

}  // namespace

Metrics metrics(const ConfusionMatrix& cm) {
  if (cm.total() <= 0) throw Error(Errc::EmptyConfusion, "confusion matrix has no rows");
  Metrics m;
  const auto tp = static_cast<double>(cm.tp);
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  m.precision = ratio(tp, tp + static_cast<double>(cm.fp), m.precision_undefined);
  m.recall = ratio(tp, tp + static_cast<double>(cm.fn), m.recall_undefined);
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall, m.f1_undefined);
  return m;
}

Metrics mean_metrics(std::span<const Metrics> per_fold) {
  Metrics m;
  if (per_fold.empty()) return m;
  for (const auto& f : per_fold) {
    m.accuracy += f.accuracy;
    m.precision += f.precision;
    m.recall += f.recall;
    m.f1 += f.f1;
    m.precision_undefined |= f.precision_undefined;
    m.recall_undefined |= f.recall_undefined;
    m.f1_undefined |= f.f1_undefined;
  }
  const auto n = static_cast<double>(per_fold.size());
  m.accuracy /= n;
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  return m;
}

// ---------------------------------------------------------------------------
// Curves

namespace {

struct Sweep {
  double threshold;
  long tp;
  long fp;
};

// Cumulative counts after admitting every score >= threshold, one entry per
// distinct score in descending order.
std::vector<Sweep> sweep(const Eigen::VectorXi& truth, const Eigen::VectorXd& scores, long& pos,
                         long& neg) {
  if (truth.size() != scores.size())
    throw Error(Errc::LengthMismatch, "truth and score lengths differ");
  pos = truth.sum();
  neg = truth.size() - pos;
  if (pos == 0 || neg == 0)
    throw Error(Errc::SingleClassTruth, "curve needs both classes in the truth labels");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(truth.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return scores[a] > scores[b]; });
  std::vector<Sweep> out;
  long tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (truth[order[i]] == 1) ++tp;
    else ++fp;
    if (i + 1 == order.size() || scores[order[i + 1]] != scores[order[i]])
      out.push_back({scores[order[i]], tp, fp});
  }
  return out;
}

}  // namespace

RocCurve roc_curve(const Eigen::VectorXi& truth, const Eigen::VectorXd& scores) {
  long pos = 0, neg = 0;
  const auto steps = sweep(truth, scores, pos, neg);
  RocCurve c;
  c.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  for (const auto& s : steps) {
    const RocPoint p{static_cast<double>(s.fp) / static_cast<double>(neg),
                     static_cast<double>(s.tp) / static_cast<double>(pos), s.threshold};
    const auto& q = c.points.back();
    c.auc += (p.fpr - q.fpr) * (p.tpr + q.tpr) / 2.0;
    c.points.push_back(p);
  }
  return c;
}

std::vector<PrPoint> pr_curve(const Eigen::VectorXi& truth, const Eigen::VectorXd& scores) {
  long pos = 0, neg = 0;
  const auto steps = sweep(truth, scores, pos, neg);
  std::vector<PrPoint> out;
  out.push_back({0.0, 1.0, std::numeric_limits<double>::infinity()});
  for (const auto& s : steps)
    out.push_back({static_cast<double>(s.tp) / static_cast<double>(pos),
                   static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp), s.threshold});
  return out;
}

// ---------------------------------------------------------------------------
// Importance

ImportanceReport summarize_importance(const Eigen::VectorXd& per_column,
                                      std::span<const std::string> columns,
                                      std::span<const BandSpec> bands) {
  if (per_column.size() != static_cast<Eigen::Index>(columns.size()))
    throw Error(Errc::WidthMismatch, "importance width differs from column names");
  ImportanceReport r;
  r.columns.assign(columns.begin(), columns.end());
  r.per_column = per_column;
  const double total = per_column.sum();
  if (total > 0.0) r.per_column /= total;

  for (const auto& b : bands) r.bands.push_back(b.name);
  r.per_band = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bands.size()));
  std::vector<double> type_scores;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t b = 0; b < bands.size(); ++b) {
      const std::string prefix = bands[b].name + "_";
      if (columns[c].rfind(prefix, 0) != 0) continue;
      const double v = r.per_column[static_cast<Eigen::Index>(c)];
      r.per_band[static_cast<Eigen::Index>(b)] += v;
      const std::string type = columns[c].substr(prefix.size());
      auto it = std::find(r.feature_types.begin(), r.feature_types.end(), type);
      if (it == r.feature_types.end()) {
        r.feature_types.push_back(type);
        type_scores.push_back(v);
      } else {
        type_scores[static_cast<std::size_t>(it - r.feature_types.begin())] += v;
      }
      break;
    }
  }
  r.per_feature_type = Eigen::Map<const Eigen::VectorXd>(
      type_scores.data(), static_cast<Eigen::Index>(type_scores.size()));
  return r;
}

ImportanceReport feature_importance(const TrainedModel& model,
                                    std::span<const std::string> columns,
                                    std::span<const BandSpec> bands) {
  const auto* f = model.forest();
  if (!f)
    throw Error(Errc::UnsupportedModel, "feature importance needs a forest, got " +
                                            std::string(model_kind_name(model.kind)));
  return summarize_importance(f->importances, columns, bands);
}

}  // namespace pdeeg
