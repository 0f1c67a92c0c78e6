#include "pdeeg/error.hpp"
#include "pdeeg/models.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pdeeg {

namespace {
constexpr double kTau = 1e-12;
}

// Dual problem: min 0.5 a'Qa - e'a, 0 <= a <= C, y'a = 0, Q_ij = y_i y_j <x_i, x_j>.
// Each step solves the two-variable subproblem on the maximal violating pair.
TrainedModel fit_linear_svm(const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
                            const SvmParams& params) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n == 0) throw Error(Errc::EmptyTrainingSet, "no training rows");
  if (y.size() != n) throw Error(Errc::WidthMismatch, "label count differs from rows");
  if (!(params.c > 0.0)) throw Error(Errc::InvalidSpec, "C must be positive");
  if (!x.allFinite()) throw Error(Errc::InvalidSpec, "features must be finite");
  const int positives = y.sum();
  if (positives == 0 || positives == n)
    throw Error(Errc::SingleClass, "linear SVM needs both classes");

  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(d);
  Eigen::RowVectorXd sigma = Eigen::RowVectorXd::Ones(d);
  if (params.standardize) {
    mu = x.colwise().mean();
    for (Eigen::Index j = 0; j < d; ++j) {
      const double sd = std::sqrt((x.col(j).array() - mu[j]).square().mean());
      sigma[j] = sd > 0.0 ? sd : 1.0;
    }
  }
  const Eigen::MatrixXd z = (x.rowwise() - mu).array().rowwise() / sigma.array();

  Eigen::VectorXd ys(n);
  for (Eigen::Index i = 0; i < n; ++i) ys[i] = y[i] == 1 ? 1.0 : -1.0;
  const Eigen::VectorXd diag = z.rowwise().squaredNorm();
  const double c = params.c;

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  Eigen::VectorXd qi(n), qj(n);

  auto in_up = [&](Eigen::Index t) {
    return (ys[t] > 0 && alpha[t] < c) || (ys[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](Eigen::Index t) {
    return (ys[t] > 0 && alpha[t] > 0) || (ys[t] < 0 && alpha[t] < c);
  };

  long iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (;; ++iter) {
    Eigen::Index i = -1, j = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -ys[t] * grad[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    gap = gmax - gmin;
    if (i < 0 || j < 0 || gap < params.tolerance) break;
    if (iter >= params.max_iter)
      throw Error(Errc::NoConvergence, "SMO stopped after " + std::to_string(iter) +
                                           " iterations with KKT gap " + std::to_string(gap));

    qi = (z * z.row(i).transpose()).cwiseProduct(ys) * ys[i];
    qj = (z * z.row(j).transpose()).cwiseProduct(ys) * ys[j];
    const double old_i = alpha[i];
    const double old_j = alpha[j];

    if (ys[i] != ys[j]) {
      double quad = diag[i] + diag[j] + 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = diag[i] + diag[j] - 2.0 * qi[j];
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    grad += qi * (alpha[i] - old_i) + qj * (alpha[j] - old_j);
  }

  // Offset from free support vectors, or the midpoint of the feasible range.
  double free_sum = 0.0;
  int free_count = 0;
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = ys[t] * grad[t];
    if (alpha[t] >= c) {
      if (ys[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (ys[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / free_count : (ub + lb) / 2.0;

  const Eigen::VectorXd w_std = z.transpose() * alpha.cwiseProduct(ys);
  LinearSvm svm;
  svm.weights = w_std.cwiseQuotient(sigma.transpose());
  svm.bias = -rho - mu.dot(svm.weights);
  svm.iterations = iter;
  svm.final_gap = gap;

  TrainedModel model;
  model.kind = ModelKind::LinearSvm;
  model.params.svm = params;
  model.width = d;
  model.body = std::move(svm);
  return model;
}

}  // namespace pdeeg
