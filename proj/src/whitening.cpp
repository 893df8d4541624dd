#include "wsnmf/whitening.hpp"

#include <algorithm>
#include <numeric>
#include <vector>
#include <cctype>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "wsnmf/errors.hpp"

namespace wsnmf {

namespace {

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) > std::abs(vectors(best, j))) best = i;
    }
    if (vectors(best, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

// lambda^{-1/2} with lambda clamped at floor * max(lambda).
Eigen::VectorXd inv_sqrt_floored(const Eigen::VectorXd& values, double floor) {
  const double top = values.size() > 0 ? values.maxCoeff() : 0.0;
  if (!(top > 0.0)) {
    throw DegenerateInputError("covariance has no positive eigenvalue");
  }
  const double lo = floor * top;
  return values.unaryExpr([lo](double v) { return 1.0 / std::sqrt(std::max(v, lo)); });
}

}  // namespace

std::string to_string(WhiteningMethod m) {
  switch (m) {
    case WhiteningMethod::PCA: return "pca";
    case WhiteningMethod::ZCA: return "zca";
    case WhiteningMethod::PCA_COR: return "pca-cor";
    case WhiteningMethod::ZCA_COR: return "zca-cor";
  }
  return "?";
}

WhiteningMethod parse_whitening_method(std::string_view name) {
  std::string key;
  for (char c : name) {
    key.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "pca") return WhiteningMethod::PCA;
  if (key == "zca") return WhiteningMethod::ZCA;
  if (key == "pca-cor") return WhiteningMethod::PCA_COR;
  if (key == "zca-cor") return WhiteningMethod::ZCA_COR;
  throw DomainError("unknown whitening method '" + std::string(name) + "'");
}

Moments estimate_moments(const Eigen::MatrixXd& rows) {
  if (rows.cols() < 2) throw DomainError("moments need at least 2 observations");
  Moments m;
  m.n_obs = static_cast<std::size_t>(rows.cols());
  m.mean = rows.rowwise().mean();
  const Eigen::MatrixXd centered = rows.colwise() - m.mean;
  const Eigen::MatrixXd cov =
      (centered * centered.transpose()) / static_cast<double>(rows.cols() - 1);
  m.covariance = 0.5 * (cov + cov.transpose());
  return m;
}

Moments estimate_moments(const Ensemble& e) {
  if (e.empty()) throw DomainError("moments of an empty ensemble");
  return estimate_moments(e.matrix());
}

EigenPair sym_eig(const Eigen::MatrixXd& sym) {
  if (sym.rows() != sym.cols()) throw DomainError("sym_eig: matrix is not square");
  const double scale = sym.norm();
  if ((sym - sym.transpose()).norm() > 1e-10 * scale) {
    throw DomainError("sym_eig: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw DomainError("sym_eig: eigendecomposition did not converge");
  }
  // Eigen returns ascending order. A stable descending sort keeps tied
  // eigenvalues in solver order, so Sigma = I yields u = I.
  const Eigen::Index d = sym.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::VectorXd& vals = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return vals(a) > vals(b); });
  EigenPair out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    out.values(k) = vals(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  fix_signs(out.vectors);
  return out;
}

WhiteningModel whitening_matrix(WhiteningMethod method, const Moments& moments,
                                double eig_floor) {
  if (!(eig_floor > 0.0)) throw DomainError("eig_floor must be > 0");
  const Eigen::MatrixXd& cov = moments.covariance;
  if (cov.rows() == 0 || cov.rows() != cov.cols()) {
    throw DomainError("covariance must be a non-empty square matrix");
  }

  WhiteningModel model;
  model.method = method;
  model.moments = moments;
  model.eig_floor = eig_floor;
  model.eig = sym_eig(cov);
  const Eigen::VectorXd lam_inv_sqrt = inv_sqrt_floored(model.eig.values, eig_floor);
  const Eigen::MatrixXd& u = model.eig.vectors;

  switch (method) {
    case WhiteningMethod::PCA:
      model.matrix = lam_inv_sqrt.asDiagonal() * u.transpose();
      return model;
    case WhiteningMethod::ZCA:
      model.matrix = u * lam_inv_sqrt.asDiagonal() * u.transpose();
      model.matrix = 0.5 * (model.matrix + model.matrix.transpose());
      return model;
    case WhiteningMethod::PCA_COR:
    case WhiteningMethod::ZCA_COR:
      break;
  }

  CorrelationDecomp corr;
  corr.variances = cov.diagonal();
  const Eigen::VectorXd v_inv_sqrt = inv_sqrt_floored(corr.variances, eig_floor);
  corr.correlation = v_inv_sqrt.asDiagonal() * cov * v_inv_sqrt.asDiagonal();
  corr.correlation = 0.5 * (corr.correlation + corr.correlation.transpose());
  EigenPair p = sym_eig(corr.correlation);
  corr.vectors = std::move(p.vectors);
  corr.values = std::move(p.values);
  const Eigen::VectorXd theta_inv_sqrt = inv_sqrt_floored(corr.values, eig_floor);
  const Eigen::MatrixXd& g = corr.vectors;

  if (method == WhiteningMethod::PCA_COR) {
    model.matrix = theta_inv_sqrt.asDiagonal() * g.transpose() * v_inv_sqrt.asDiagonal();
  } else {
    Eigen::MatrixXd p_inv_sqrt = g * theta_inv_sqrt.asDiagonal() * g.transpose();
    p_inv_sqrt = 0.5 * (p_inv_sqrt + p_inv_sqrt.transpose());
    model.matrix = p_inv_sqrt * v_inv_sqrt.asDiagonal();
  }
  model.corr = std::move(corr);
  return model;
}

Eigen::MatrixXd whiten(const Eigen::MatrixXd& rows, const WhiteningModel& model) {
  if (rows.rows() != model.matrix.cols()) {
    throw DomainError("whiten: ensemble has " + std::to_string(rows.rows()) +
                      " signals, model expects " + std::to_string(model.matrix.cols()));
  }
  return model.matrix * (rows.colwise() - model.moments.mean);
}

Ensemble whiten(const Ensemble& e, const WhiteningModel& model) {
  return e.with_samples(whiten(e.matrix(), model));
}

double diagonality(const Eigen::MatrixXd& sym) {
  if (sym.rows() != sym.cols()) throw DomainError("diagonality: matrix is not square");
  const double total = sym.squaredNorm();
  if (total == 0.0) return 0.0;
  // Summed directly so tiny off-diagonal energy survives next to a large diagonal.
  double off = 0.0;
  for (Eigen::Index j = 0; j < sym.cols(); ++j) {
    for (Eigen::Index i = 0; i < sym.rows(); ++i) {
      if (i != j) off += sym(i, j) * sym(i, j);
    }
  }
  return std::clamp(off / total, 0.0, 1.0);
}

Eigen::MatrixXd cross_correlation(const Ensemble& original, const Ensemble& processed) {
  if (original.d() != processed.d() || original.n() != processed.n()) {
    throw DomainError("cross_correlation: ensembles differ in shape");
  }
  if (original.n() < 2) throw DomainError("cross_correlation: need n >= 2");

  // Standardize each row once; constant rows are reported by id.
  auto standardize = [](const Ensemble& e, const char* which) {
    Eigen::MatrixXd m = e.matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m.row(i).array() -= m.row(i).mean();
      const double norm = m.row(i).norm();
      if (norm == 0.0) {
        throw DomainError(std::string("cross_correlation: ") + which + " signal '" +
                          e[static_cast<std::size_t>(i)].id + "' is constant");
      }
      m.row(i) /= norm;
    }
    return m;
  };
  const Eigen::MatrixXd a = standardize(original, "original");
  const Eigen::MatrixXd b = standardize(processed, "processed");
  return (a * b.transpose()).cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace wsnmf
