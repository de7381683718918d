#include "netcoh/model.hpp"

#include <cmath>

#include "netcoh/errors.hpp"

namespace netcoh {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::linear:
      return "linear";
    case Family::logistic:
      return "logistic";
    case Family::cox:
      return "cox";
  }
  return "linear";
}

Family parse_family(std::string_view name) {
  if (name == "linear") return Family::linear;
  if (name == "logistic") return Family::logistic;
  if (name == "cox") return Family::cox;
  throw InvalidInput("unknown family '" + std::string(name) + "' (expected linear, logistic or cox)");
}

double default_gamma(Family f) {
  switch (f) {
    case Family::linear:
      return 0.0;
    case Family::logistic:
      return 0.01;
    case Family::cox:
      return 0.1;
  }
  return 0.0;
}

Standardization Standardization::fit(const Eigen::MatrixXd& X) {
  Standardization s;
  const auto n = static_cast<double>(X.rows());
  s.center = X.colwise().mean().transpose();
  s.scale.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double var = (X.col(j).array() - s.center[j]).square().sum() / n;
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(s.center[j]))))
      throw InvalidInput("covariate column " + std::to_string(j) + " is constant");
    s.scale[j] = sd;
  }
  return s;
}

Standardization Standardization::identity(Eigen::Index p) {
  return {Eigen::VectorXd::Zero(p), Eigen::VectorXd::Ones(p)};
}

Eigen::MatrixXd Standardization::apply(const Eigen::MatrixXd& X) const {
  if (X.cols() != center.size()) throw InvalidInput("design has the wrong number of columns");
  Eigen::MatrixXd out = X.rowwise() - center.transpose();
  return out.array().rowwise() / scale.transpose().array();
}

Eigen::VectorXd FitCore::linear_predictor(const Eigen::MatrixXd& X_raw,
                                          const Eigen::VectorXd& alpha) const {
  if (alpha.size() != X_raw.rows()) throw InvalidInput("alpha length does not match the design rows");
  if (beta_hat.size() == 0) return alpha;
  return alpha + standardization.apply(X_raw) * beta_hat;
}

}  // namespace netcoh
