#include "pdeeg/error.hpp"
#include "pdeeg/eval.hpp"

#include <unsupported/Eigen/SpecialFunctions>

#include <cmath>
#include <limits>
#include <numbers>

namespace pdeeg {

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw Error(Errc::LengthMismatch, "correlation of unequal lengths");
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double saa = da.square().sum();
  const double sbb = db.square().sum();
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return (da * db).sum() / std::sqrt(saa * sbb);
}

CorrelationMatrix correlation_matrix(const FeatureMatrix& fm, std::span<const BandSpec> bands) {
  const Eigen::Index n = fm.rows();
  if (n < 2) throw Error(Errc::InvalidSpec, "correlation needs at least 2 rows");

  std::vector<Eigen::VectorXd> vars;
  CorrelationMatrix cm;
  for (const auto& b : bands) {
    Eigen::VectorXd agg = Eigen::VectorXd::Zero(n);
    int used = 0;
    const std::string prefix = b.name + "_";
    for (std::size_t c = 0; c < fm.columns.size(); ++c) {
      if (fm.columns[c].rfind(prefix, 0) != 0) continue;
      const Eigen::VectorXd col = fm.values.col(static_cast<Eigen::Index>(c));
      const double mean = col.mean();
      const double sd = std::sqrt((col.array() - mean).square().mean());
      ++used;
      if (sd > 0.0) agg += (col.array() - mean).matrix() / sd;
    }
    if (used > 0) agg /= used;
    cm.names.push_back(b.name);
    vars.push_back(std::move(agg));
  }
  cm.names.push_back("diagnosis");
  vars.push_back(fm.labels.cast<double>());

  const auto m = static_cast<Eigen::Index>(vars.size());
  cm.values = Eigen::MatrixXd::Identity(m, m);
  cm.zero_variance.resize(vars.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& v = vars[static_cast<std::size_t>(i)];
    cm.zero_variance[static_cast<std::size_t>(i)] = (v.array() - v.mean()).square().sum() <= 0.0;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (cm.zero_variance[static_cast<std::size_t>(i)]) cm.values(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double r = pearson(vars[static_cast<std::size_t>(i)], vars[static_cast<std::size_t>(j)]);
      cm.values(i, j) = r;
      cm.values(j, i) = r;
    }
  }
  return cm;
}

double student_t_two_sided(double t, double dof) {
  if (!(dof > 0.0)) throw Error(Errc::InvalidSpec, "degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return Eigen::numext::betainc(dof / 2.0, 0.5, x);
}

namespace {

void add_to_census(PValueCensus& c, double p) {
  if (p < 0.001) ++c.below_0001;
  else if (p < 0.01) ++c.below_001;
  else if (p < 0.05) ++c.below_005;
  else ++c.rest;
}

}  // namespace

OlsStats ols_full_model(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols() + 1;
  if (y.size() != n) throw Error(Errc::LengthMismatch, "label count differs from rows");
  if (n <= p)
    throw Error(Errc::InvalidSpec, "full model needs more rows (" + std::to_string(n) +
                                       ") than parameters (" + std::to_string(p) + ")");
  Eigen::MatrixXd design(n, p);
  design.col(0).setOnes();
  design.rightCols(p - 1) = x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < p)
    throw Error(Errc::RankDeficient, "design matrix has rank " + std::to_string(qr.rank()) +
                                         " < " + std::to_string(p));
  OlsStats s;
  s.full_model = true;
  s.coefficients = qr.solve(y);
  const double rss = (y - design * s.coefficients).squaredNorm();
  const double tss = (y.array() - y.mean()).square().sum();
  s.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;
  const double nd = static_cast<double>(n);
  s.log_likelihood = rss > 0.0
                         ? -0.5 * nd * (std::log(2.0 * std::numbers::pi * rss / nd) + 1.0)
                         : std::numeric_limits<double>::infinity();
  return s;
}

OlsStats ols_stats(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.rows();
  if (n < 3) throw Error(Errc::InvalidSpec, "OLS statistics need at least 3 rows");
  if (y.size() != n) throw Error(Errc::LengthMismatch, "label count differs from rows");

  OlsStats s;
  try {
    s = ols_full_model(x, y);
  } catch (const Error& e) {
    if (e.code() != Errc::RankDeficient && e.code() != Errc::InvalidSpec) throw;
    s.full_model = false;
    s.full_model_note = e.what();
  }

  const double dof = static_cast<double>(n - 2);
  const Eigen::ArrayXd dy = y.array() - y.mean();
  s.slopes.resize(x.cols());
  s.p_values.resize(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const Eigen::ArrayXd dx = x.col(c).array() - x.col(c).mean();
    const double sxx = dx.square().sum();
    if (sxx <= 0.0) {
      s.slopes[c] = 0.0;
      s.p_values[c] = 1.0;
    } else {
      const double slope = (dx * dy).sum() / sxx;
      const double rss = (dy - slope * dx).square().sum();
      const double se = std::sqrt(rss / dof / sxx);
      s.slopes[c] = slope;
      if (se > 0.0) {
        s.p_values[c] = student_t_two_sided(slope / se, dof);
      } else {
        s.p_values[c] = slope != 0.0 ? 0.0 : 1.0;
      }
    }
    add_to_census(s.census, s.p_values[c]);
  }
  return s;
}

}  // namespace pdeeg
