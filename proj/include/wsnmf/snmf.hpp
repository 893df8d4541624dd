#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wsnmf {

/// Matrix with finite, non-negative entries. Validated on construction.
class NonNegMatrix {
 public:
  NonNegMatrix() = default;
  explicit NonNegMatrix(Eigen::MatrixXd values);

  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }

 private:
  Eigen::MatrixXd values_;
};

using Activations = NonNegMatrix;

/// Fixed F x M atom matrix with one label per column. Every column is
/// non-negative with unit Euclidean norm.
class Dictionary {
 public:
  Dictionary() = default;
  /// Checks the invariants as given; throws DegenerateAtomError for a zero
  /// column and DomainError for anything else.
  Dictionary(Eigen::MatrixXd atoms, std::vector<std::string> labels);

  /// Scales each column to unit norm first.
  static Dictionary normalized(Eigen::MatrixXd atoms, std::vector<std::string> labels);

  const Eigen::MatrixXd& atoms() const { return atoms_; }
  const std::vector<std::string>& labels() const { return labels_; }
  Eigen::Index features() const { return atoms_.rows(); }
  Eigen::Index size() const { return atoms_.cols(); }

 private:
  Eigen::MatrixXd atoms_;
  std::vector<std::string> labels_;
};

enum class InitMode { Ones, WtM };

struct SolverConfig {
  double beta = 1.0;       // 1 = generalized KL
  double sparsity = 0.1;   // weight of the l1 penalty on H
  int max_iters = 500;
  double rel_tol = 1e-6;
  double epsilon = 1e-12;  // floor on the reconstruction WH
  InitMode init = InitMode::WtM;
};

void validate(const SolverConfig& cfg);

/// d_beta(x | y). x >= 0, y > 0; +inf when x = 0 and beta <= 0.
double beta_divergence(double x, double y, double beta);

/// Elementwise sum of d_beta over same-shape matrices.
double beta_divergence(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double beta);

/// D_beta(M | max(WH, eps)) + sparsity * sum(H).
double objective(const NonNegMatrix& m, const Dictionary& w, const Activations& h,
                 const SolverConfig& cfg);

/// One multiplicative step on H with W fixed:
///   H <- H * W^T(M * R^{beta-2}) / (W^T R^{beta-1} + sparsity),  R = max(WH, eps)
Activations update_activations(const NonNegMatrix& m, const Dictionary& w,
                               const Activations& h, const SolverConfig& cfg);

struct SolveResult {
  Activations activations;
  std::vector<double> trace;  // objective at init and after every iteration
  int iterations = 0;
};

/// Iterates update_activations from cfg.init until the relative objective
/// change drops below cfg.rel_tol or cfg.max_iters is reached.
SolveResult solve_activations(const NonNegMatrix& m, const Dictionary& w,
                              const SolverConfig& cfg);

struct Factorization {
  Dictionary dictionary;
  Activations activations;
  std::vector<double> trace;
};

/// One multiplicative step on W, followed by unit-norm column rescaling with
/// the matching rows of H scaled up (WH is unchanged by the rescaling).
Factorization update_dictionary(const NonNegMatrix& m, const Dictionary& w,
                                const Activations& h, const SolverConfig& cfg);

/// Unsupervised fit of both factors from a seeded uniform(eps, 1) start.
Factorization fit_nmf(const NonNegMatrix& m, int rank, const SolverConfig& cfg,
                      std::uint64_t seed);

}  // namespace wsnmf
