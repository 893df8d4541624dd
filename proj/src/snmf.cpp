#include "wsnmf/snmf.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "wsnmf/errors.hpp"

namespace wsnmf {

namespace {

constexpr double kUnitNormTol = 1e-10;

void check_shapes(const NonNegMatrix& m, const Dictionary& w, const Activations& h) {
  if (m.rows() != w.features() || w.size() != h.rows() || m.cols() != h.cols()) {
    throw DomainError("shape mismatch: M is " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + ", W is " + std::to_string(w.features()) +
                      "x" + std::to_string(w.size()) + ", H is " + std::to_string(h.rows()) +
                      "x" + std::to_string(h.cols()));
  }
}

Eigen::MatrixXd floored_reconstruction(const Eigen::MatrixXd& w, const Eigen::MatrixXd& h,
                                       double eps) {
  return (w * h).cwiseMax(eps);
}

// R^{p} with exact shortcuts for the common integer exponents.
Eigen::MatrixXd power(const Eigen::MatrixXd& r, double p) {
  if (p == 0.0) return Eigen::MatrixXd::Ones(r.rows(), r.cols());
  if (p == 1.0) return r;
  if (p == -1.0) return r.cwiseInverse();
  return r.array().pow(p).matrix();
}

// Objective values below eps^2 of the starting value are round-off in the
// reconstruction, so iterating further only measures noise.
constexpr double kResolution =
    std::numeric_limits<double>::epsilon() * std::numeric_limits<double>::epsilon();

bool converged(double start, double prev, double cur, double rel_tol) {
  // A zero objective is the global minimum; nothing is left to improve.
  if (prev == 0.0 || cur == 0.0) return true;
  if (cur <= kResolution * start) return true;
  return std::abs(prev - cur) <= rel_tol * std::abs(prev);
}

}  // namespace

NonNegMatrix::NonNegMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      const double v = values_(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") is negative or non-finite");
      }
    }
  }
}

Dictionary::Dictionary(Eigen::MatrixXd atoms, std::vector<std::string> labels)
    : atoms_(std::move(atoms)), labels_(std::move(labels)) {
  if (static_cast<Eigen::Index>(labels_.size()) != atoms_.cols()) {
    throw DomainError("dictionary has " + std::to_string(atoms_.cols()) + " atoms but " +
                      std::to_string(labels_.size()) + " labels");
  }
  NonNegMatrix check(atoms_);
  for (Eigen::Index j = 0; j < atoms_.cols(); ++j) {
    const double norm = atoms_.col(j).norm();
    if (norm == 0.0) {
      throw DegenerateAtomError("atom " + std::to_string(j) + " ('" +
                                labels_[static_cast<std::size_t>(j)] + "') is all zeros");
    }
    if (std::abs(norm - 1.0) > kUnitNormTol) {
      throw DomainError("atom " + std::to_string(j) + " does not have unit norm");
    }
  }
}

Dictionary Dictionary::normalized(Eigen::MatrixXd atoms, std::vector<std::string> labels) {
  for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
    const double norm = atoms.col(j).norm();
    if (norm > 0.0) atoms.col(j) /= norm;
  }
  return Dictionary(std::move(atoms), std::move(labels));
}

void validate(const SolverConfig& cfg) {
  if (!std::isfinite(cfg.beta)) throw DomainError("beta must be finite");
  if (!(cfg.sparsity >= 0.0)) throw DomainError("sparsity must be >= 0");
  if (cfg.max_iters < 1) throw DomainError("max_iters must be >= 1");
  if (!(cfg.rel_tol > 0.0)) throw DomainError("rel_tol must be > 0");
  if (!(cfg.epsilon > 0.0)) throw DomainError("epsilon must be > 0");
}

double beta_divergence(double x, double y, double beta) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("beta_divergence: x must be >= 0");
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("beta_divergence: y must be > 0");
  if (x == y) return 0.0;

  // Written in u = (x - y) / y with log1p/expm1 so the value keeps its
  // relative accuracy when x is close to y instead of cancelling to noise.
  const double u = (x - y) / y;
  double d;
  if (beta == 1.0) {
    d = (x == 0.0) ? y : y * ((1.0 + u) * std::log1p(u) - u);
  } else if (beta == 0.0) {
    if (x == 0.0) return std::numeric_limits<double>::infinity();
    d = u - std::log1p(u);
  } else {
    if (x == 0.0 && beta < 0.0) return std::numeric_limits<double>::infinity();
    const double ratio_pow_m1 = (x == 0.0) ? -1.0 : std::expm1(beta * std::log1p(u));
    d = std::pow(y, beta) * (ratio_pow_m1 - beta * u) / (beta * (beta - 1.0));
  }
  return d > 0.0 ? d : 0.0;
}

double beta_divergence(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double beta) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DomainError("beta_divergence: shape mismatch");
  }
  double sum = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) sum += beta_divergence(x(i, j), y(i, j), beta);
  }
  return sum;
}

double objective(const NonNegMatrix& m, const Dictionary& w, const Activations& h,
                 const SolverConfig& cfg) {
  check_shapes(m, w, h);
  const Eigen::MatrixXd r = floored_reconstruction(w.atoms(), h.values(), cfg.epsilon);
  return beta_divergence(m.values(), r, cfg.beta) + cfg.sparsity * h.values().sum();
}

Activations update_activations(const NonNegMatrix& m, const Dictionary& w,
                               const Activations& h, const SolverConfig& cfg) {
  check_shapes(m, w, h);
  const Eigen::MatrixXd& W = w.atoms();
  const Eigen::MatrixXd r = floored_reconstruction(W, h.values(), cfg.epsilon);
  const Eigen::MatrixXd num =
      W.transpose() * m.values().cwiseProduct(power(r, cfg.beta - 2.0));
  const Eigen::MatrixXd den =
      (W.transpose() * power(r, cfg.beta - 1.0)).array() + cfg.sparsity;
  Eigen::MatrixXd next = h.values();
  for (Eigen::Index j = 0; j < next.cols(); ++j) {
    for (Eigen::Index i = 0; i < next.rows(); ++i) {
      if (den(i, j) > 0.0) next(i, j) *= num(i, j) / den(i, j);
    }
  }
  return Activations(std::move(next));
}

SolveResult solve_activations(const NonNegMatrix& m, const Dictionary& w,
                              const SolverConfig& cfg) {
  validate(cfg);
  if (m.rows() != w.features()) {
    throw DomainError("shape mismatch: M has " + std::to_string(m.rows()) +
                      " rows, W has " + std::to_string(w.features()));
  }
  const Eigen::Index k = w.size();
  const Eigen::Index t = m.cols();

  SolveResult result;
  result.activations =
      cfg.init == InitMode::Ones
          ? Activations(Eigen::MatrixXd::Ones(k, t))
          : Activations((w.atoms().transpose() * m.values()).array() + cfg.epsilon);
  result.trace.push_back(objective(m, w, result.activations, cfg));

  for (int it = 0; it < cfg.max_iters; ++it) {
    result.activations = update_activations(m, w, result.activations, cfg);
    const double cur = objective(m, w, result.activations, cfg);
    const double prev = result.trace.back();
    result.trace.push_back(cur);
    result.iterations = it + 1;
    if (converged(result.trace.front(), prev, cur, cfg.rel_tol)) break;
  }
  return result;
}

Factorization update_dictionary(const NonNegMatrix& m, const Dictionary& w,
                                const Activations& h, const SolverConfig& cfg) {
  check_shapes(m, w, h);
  const Eigen::MatrixXd& H = h.values();
  const Eigen::MatrixXd r = floored_reconstruction(w.atoms(), H, cfg.epsilon);
  const Eigen::MatrixXd num = m.values().cwiseProduct(power(r, cfg.beta - 2.0)) * H.transpose();
  const Eigen::MatrixXd den = power(r, cfg.beta - 1.0) * H.transpose();

  Eigen::MatrixXd W = w.atoms();
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      // A zero denominator means the atom is unused: leave it in place.
      if (den(i, j) > 0.0) W(i, j) *= num(i, j) / den(i, j);
    }
  }

  Eigen::MatrixXd next_h = H;
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    const double norm = W.col(j).norm();
    if (!(norm > 0.0)) {
      throw DegenerateAtomError("atom " + std::to_string(j) + " collapsed to zero");
    }
    W.col(j) /= norm;
    next_h.row(j) *= norm;
  }
  return {Dictionary(std::move(W), w.labels()), Activations(std::move(next_h)), {}};
}

Factorization fit_nmf(const NonNegMatrix& m, int rank, const SolverConfig& cfg,
                      std::uint64_t seed) {
  validate(cfg);
  const Eigen::Index f = m.rows();
  const Eigen::Index t = m.cols();
  if (rank < 1 || rank > std::min(f, t)) {
    throw DomainError("rank " + std::to_string(rank) + " outside [1, " +
                      std::to_string(std::min(f, t)) + "]");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(cfg.epsilon, 1.0);
  auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = unif(rng);
    }
    return out;
  };
  Eigen::MatrixXd w0 = draw(f, rank);
  Eigen::MatrixXd h0 = draw(rank, t);
  for (Eigen::Index j = 0; j < rank; ++j) {
    const double norm = w0.col(j).norm();
    w0.col(j) /= norm;
    h0.row(j) *= norm;
  }

  std::vector<std::string> labels;
  for (int j = 0; j < rank; ++j) labels.push_back("atom-" + std::to_string(j));

  Factorization fit{Dictionary(std::move(w0), std::move(labels)), Activations(std::move(h0)), {}};
  fit.trace.push_back(objective(m, fit.dictionary, fit.activations, cfg));
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Activations h = update_activations(m, fit.dictionary, fit.activations, cfg);
    Factorization next = update_dictionary(m, fit.dictionary, h, cfg);
    fit.dictionary = std::move(next.dictionary);
    fit.activations = std::move(next.activations);
    const double cur = objective(m, fit.dictionary, fit.activations, cfg);
    const double prev = fit.trace.back();
    fit.trace.push_back(cur);
    if (converged(fit.trace.front(), prev, cur, cfg.rel_tol)) break;
  }
  return fit;
}

}  // namespace wsnmf
