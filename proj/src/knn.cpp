#include "pdeeg/error.hpp"
#include "pdeeg/models.hpp"

#include <string>

namespace pdeeg {

TrainedModel fit_knn(const Eigen::MatrixXd& x, const Eigen::VectorXi& y, int k) {
  if (x.rows() == 0) throw Error(Errc::EmptyTrainingSet, "no training rows");
  if (y.size() != x.rows()) throw Error(Errc::WidthMismatch, "label count differs from rows");
  if (k < 1) throw Error(Errc::InvalidSpec, "n_neighbors must be >= 1");

  KnnModel knn;
  knn.train_x = x;
  knn.train_y = y;
  knn.effective_k = static_cast<int>(std::min<Eigen::Index>(k, x.rows()));

  TrainedModel model;
  model.kind = ModelKind::Knn;
  model.params.knn.n_neighbors = k;
  model.width = x.cols();
  if (knn.effective_k < k)
    model.warnings.push_back("KnnClamped: n_neighbors " + std::to_string(k) + " exceeds " +
                             std::to_string(x.rows()) + " training rows, using " +
                             std::to_string(knn.effective_k));
  model.body = std::move(knn);
  return model;
}

}  // namespace pdeeg
