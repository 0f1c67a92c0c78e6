#pragma once

// Cross-validation, classification metrics, ROC/PR curves, feature
// importance, band correlation and OLS significance statistics.

#include "pdeeg/features.hpp"
#include "pdeeg/models.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdeeg {

struct ConfusionMatrix {
  long tp = 0;
  long tn = 0;
  long fp = 0;
  long fn = 0;

  long total() const { return tp + tn + fp + fn; }
  void add(int truth, int predicted);
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(const Eigen::VectorXi& truth, const Eigen::VectorXi& predicted);

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when the ratio was 0/0 and reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

/// Errors: EmptyConfusion.
Metrics metrics(const ConfusionMatrix& cm);

/// Element-wise mean; a flag is set if it was set in any input.
Metrics mean_metrics(std::span<const Metrics> per_fold);

// ---------------------------------------------------------------------------
// Folds

using Fold = std::vector<Eigen::Index>;  // test rows, ascending

/// k disjoint test sets covering 0..n-1 with sizes differing by at most 1.
/// Errors: KTooLarge (k > n), InvalidSpec (k < 2).
std::vector<Fold> kfold_split(Eigen::Index n_rows, int k, std::uint64_t seed);

/// As above, stratified: each class is shuffled and dealt round-robin.
std::vector<Fold> kfold_split(const Eigen::VectorXi& labels, int k, std::uint64_t seed);

/// Whole groups (e.g. subjects) are dealt to folds, stratified by the group's
/// label. Fold sizes follow the group sizes. Errors: KTooLarge (k > groups).
std::vector<Fold> kfold_split_grouped(const Eigen::VectorXi& labels,
                                      std::span<const std::string> groups, int k,
                                      std::uint64_t seed);

/// Rows not in `test`, ascending.
std::vector<Eigen::Index> complement(const Fold& test, Eigen::Index n_rows);

// ---------------------------------------------------------------------------
// Curves

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // score >= threshold predicts positive
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0, 0) to (1, 1)
  double auc = 0.0;
};

/// Errors: SingleClassTruth, LengthMismatch.
RocCurve roc_curve(const Eigen::VectorXi& truth, const Eigen::VectorXd& scores);

struct PrPoint {
  double recall = 0.0;
  double precision = 1.0;
  double threshold = 0.0;
};

/// Starts at (recall 0, precision 1); one point per distinct score in
/// descending order. Errors: SingleClassTruth, LengthMismatch.
std::vector<PrPoint> pr_curve(const Eigen::VectorXi& truth, const Eigen::VectorXd& scores);

// ---------------------------------------------------------------------------
// Importance

struct ImportanceReport {
  std::vector<std::string> columns;
  Eigen::VectorXd per_column;  // sums to 1
  std::vector<std::string> bands;
  Eigen::VectorXd per_band;  // sum over the band's columns
  std::vector<std::string> feature_types;
  Eigen::VectorXd per_feature_type;  // sum over that feature's band columns
};

/// Groups "<band>_<feature>" columns. Columns matching no band are kept in
/// per_column only.
ImportanceReport summarize_importance(const Eigen::VectorXd& per_column,
                                      std::span<const std::string> columns,
                                      std::span<const BandSpec> bands = default_bands());

/// Errors: UnsupportedModel (not a forest), WidthMismatch.
ImportanceReport feature_importance(const TrainedModel& model,
                                    std::span<const std::string> columns,
                                    std::span<const BandSpec> bands = default_bands());

// ---------------------------------------------------------------------------
// Cross-validation

struct SearchOptions {
  bool enabled = false;
  bool nested = true;  // false: tune once on all rows, then cross-validate
  SearchSpace space;
  int n_draws = 10;
  int inner_k = 3;
};

struct CvOptions {
  int k = 10;
  std::uint64_t seed = 0;
  bool grouped_by_subject = false;
  SearchOptions search;
};

struct FoldResult {
  Fold test_rows;
  ConfusionMatrix confusion;
  Metrics metrics;
  HyperParams params;
  std::vector<std::string> warnings;
};

struct CvReport {
  ModelKind kind = ModelKind::RandomForest;
  HyperParams params;
  CvOptions options;
  std::vector<FoldResult> folds;
  Metrics mean;  // mean of per-fold metrics
  ConfusionMatrix pooled;
  Metrics pooled_metrics;
  double roc_auc = 0.0;  // from pooled out-of-fold scores
  RocCurve roc;
  std::vector<PrPoint> pr;
  Eigen::VectorXd oof_scores;
  std::optional<ImportanceReport> importance;  // forests only
  std::vector<std::string> warnings;
};

/// Errors: SingleClass (one class overall), KTooLarge, propagated fit errors.
CvReport cross_validate(const ClassifierSpec& spec, const FeatureMatrix& fm,
                        const CvOptions& options);

/// Matrix-only variant; grouped splitting requires `groups`.
CvReport cross_validate(const ClassifierSpec& spec, const Eigen::MatrixXd& x,
                        const Eigen::VectorXi& y, const CvOptions& options,
                        std::span<const std::string> groups = {},
                        std::span<const std::string> columns = {});

nlohmann::json cv_report_to_json(const CvReport& report);

// ---------------------------------------------------------------------------
// Statistics

struct CorrelationMatrix {
  std::vector<std::string> names;  // band aggregates, then "diagnosis"
  Eigen::MatrixXd values;
  std::vector<bool> zero_variance;
};

/// Pearson correlation between per-band aggregates (mean of the band's
/// z-scored columns) and the label. Zero-variance variables correlate 0 and
/// are flagged. Errors: InvalidSpec (fewer than 2 rows).
CorrelationMatrix correlation_matrix(const FeatureMatrix& fm,
                                     std::span<const BandSpec> bands = default_bands());

/// Pearson correlation; 0 when either side has zero variance.
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct PValueCensus {
  int below_0001 = 0;  // p < 0.001
  int below_001 = 0;   // 0.001 <= p < 0.01
  int below_005 = 0;   // 0.01 <= p < 0.05
  int rest = 0;        // p >= 0.05
};

struct OlsStats {
  Eigen::VectorXd slopes;    // univariate, per column
  Eigen::VectorXd p_values;  // two-sided slope t-test, per column
  PValueCensus census;
  bool full_model = false;
  std::string full_model_note;
  double r_squared = 0.0;
  double log_likelihood = 0.0;
  Eigen::VectorXd coefficients;  // intercept first
};

/// Two-sided Student t tail probability P(|T| >= |t|).
double student_t_two_sided(double t, double dof);

/// Errors: InvalidSpec (fewer than 3 rows). A rank-deficient full model is
/// skipped and noted; univariate results are always reported.
OlsStats ols_stats(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Full-model fit only. Errors: RankDeficient, InvalidSpec.
OlsStats ols_full_model(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// ---------------------------------------------------------------------------
// Search

/// Mean k-fold accuracy of `spec` on (x, y).
double cv_accuracy(const ClassifierSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                   int k, std::uint64_t seed);

}  // namespace pdeeg
