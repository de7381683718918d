#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>

namespace netcoh {

enum class Family { linear, logistic, cox };

std::string_view to_string(Family f);
Family parse_family(std::string_view name);

/// Default ridge on the Laplacian per family: 0 (linear), 0.01 (logistic), 0.1 (cox).
double default_gamma(Family f);

/// Column centering and scaling to unit population variance, stored so that
/// new rows can be mapped onto the training scale.
struct Standardization {
  Eigen::VectorXd center;
  Eigen::VectorXd scale;

  /// Throws InvalidInput on a constant column.
  static Standardization fit(const Eigen::MatrixXd& X);
  static Standardization identity(Eigen::Index p);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
  Eigen::Index size() const { return center.size(); }
};

/// State shared by every fitted model: individual effects, coefficients on the
/// standardized scale and the penalty that produced them.
struct FitCore {
  Family family = Family::linear;
  Eigen::VectorXd alpha_hat;
  Eigen::VectorXd beta_hat;
  double lambda = 0.0;
  double gamma = 0.0;
  Standardization standardization;

  /// alpha + standardize(X) beta, using the supplied alpha (one per row of X).
  Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& X_raw, const Eigen::VectorXd& alpha) const;
  Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& X_raw) const {
    return linear_predictor(X_raw, alpha_hat);
  }
};

}  // namespace netcoh
