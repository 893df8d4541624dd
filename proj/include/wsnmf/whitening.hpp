#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "wsnmf/signals.hpp"

namespace wsnmf {

enum class WhiteningMethod { PCA, ZCA, PCA_COR, ZCA_COR };

std::string to_string(WhiteningMethod m);
/// Accepts "pca", "zca", "pca-cor", "zca-cor" (case-insensitive, '_' or '-').
WhiteningMethod parse_whitening_method(std::string_view name);

inline constexpr double kDefaultEigFloor = 1e-10;

struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  std::size_t n_obs = 0;
};

/// Sigma = u diag(values) u^T, values nonincreasing.
struct EigenPair {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
};

/// Sigma = V^{1/2} P V^{1/2} with V = diag(Sigma), and P = G diag(theta) G^T.
struct CorrelationDecomp {
  Eigen::VectorXd variances;
  Eigen::MatrixXd correlation;
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
};

struct WhiteningModel {
  WhiteningMethod method = WhiteningMethod::ZCA;
  Moments moments;
  EigenPair eig;
  std::optional<CorrelationDecomp> corr;  // set for the *-cor methods
  Eigen::MatrixXd matrix;                 // d x d
  double eig_floor = kDefaultEigFloor;
};

/// Mean and unbiased (n-1) covariance of the d signals, time samples as
/// observations. Needs n >= 2.
Moments estimate_moments(const Ensemble& e);
Moments estimate_moments(const Eigen::MatrixXd& rows);

/// Symmetric eigendecomposition, eigenvalues descending. Each eigenvector is
/// signed so its largest-magnitude entry (lowest index on ties) is positive.
/// Throws DomainError if the input is not symmetric within 1e-10 relative.
EigenPair sym_eig(const Eigen::MatrixXd& sym);

/// Builds one of the four whitening matrices. Eigenvalues are clamped below at
/// eig_floor * max eigenvalue before inversion:
///   PCA      diag(l)^{-1/2} u^T
///   ZCA      u diag(l)^{-1/2} u^T            (= Sigma^{-1/2})
///   PCA-cor  diag(theta)^{-1/2} G^T V^{-1/2}
///   ZCA-cor  P^{-1/2} V^{-1/2}
/// Throws DegenerateInputError when the covariance has no positive spectrum.
WhiteningModel whitening_matrix(WhiteningMethod method, const Moments& moments,
                                double eig_floor = kDefaultEigFloor);

inline WhiteningModel fit_whitening(WhiteningMethod method, const Ensemble& e,
                                    double eig_floor = kDefaultEigFloor) {
  return whitening_matrix(method, estimate_moments(e), eig_floor);
}

/// Z = W (X - mu 1^T). Ids, labels and dt are kept.
Ensemble whiten(const Ensemble& e, const WhiteningModel& model);
Eigen::MatrixXd whiten(const Eigen::MatrixXd& rows, const WhiteningModel& model);

/// ||offdiag(S)||_F^2 / ||S||_F^2, in [0, 1]; 0 for the zero matrix.
double diagonality(const Eigen::MatrixXd& sym);

/// Entry (i, j) = Pearson correlation of original signal i with processed
/// signal j. Throws DomainError naming the first constant signal.
Eigen::MatrixXd cross_correlation(const Ensemble& original, const Ensemble& processed);

}  // namespace wsnmf
