#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "wsnmf/errors.hpp"
#include "wsnmf/snmf.hpp"

namespace wsnmf {
namespace {

using testing::uniform;

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

SolverConfig config(double beta, double sparsity) {
  SolverConfig cfg;
  cfg.beta = beta;
  cfg.sparsity = sparsity;
  return cfg;
}

TEST(BetaDivergence, IdenticalArgumentsGiveZero) {
  for (double beta : {-1.0, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    for (double x : {1e-6, 0.3, 1.0, 42.0}) {
      EXPECT_NEAR(beta_divergence(x, x, beta), 0.0, 1e-12) << beta << ' ' << x;
    }
  }
}

TEST(BetaDivergence, NamedBranches) {
  EXPECT_NEAR(beta_divergence(2.0, 1.0, 1.0), 2.0 * std::numbers::ln2 - 1.0, 1e-12);
  EXPECT_NEAR(beta_divergence(3.0, 1.0, 2.0), 2.0, 1e-12);
  EXPECT_NEAR(beta_divergence(2.0, 1.0, 0.0), 1.0 - std::numbers::ln2, 1e-12);
}

TEST(BetaDivergence, ZeroDataEdgeCases) {
  EXPECT_DOUBLE_EQ(beta_divergence(0.0, 3.0, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(beta_divergence(0.0, 3.0, 2.0), 4.5);
  EXPECT_EQ(beta_divergence(0.0, 3.0, 0.0), std::numeric_limits<double>::infinity());
}

TEST(BetaDivergence, RejectsInvalidArguments) {
  EXPECT_THROW(beta_divergence(-1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(beta_divergence(1.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(beta_divergence(Eigen::MatrixXd::Ones(2, 2), Eigen::MatrixXd::Ones(2, 3), 1.0),
               DomainError);
}

TEST(BetaDivergence, LimitContinuity) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd xs = uniform(rng, 200, 2, 0.05, 5.0);
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const double x = xs(i, 0), y = xs(i, 1);
    for (double limit : {1.0, 0.0}) {
      const double exact = beta_divergence(x, y, limit);
      for (double h : {1e-6, -1e-6}) {
        const double near = beta_divergence(x, y, limit + h);
        EXPECT_LE(std::abs(near - exact), 1e-4 * std::max(exact, 1e-300)) << x << ' ' << y;
      }
    }
  }
}

TEST(BetaDivergence, MatrixSumsEntries) {
  Eigen::MatrixXd x(1, 2), y(1, 2);
  x << 2, 3;
  y << 1, 1;
  EXPECT_NEAR(beta_divergence(x, y, 2.0), 0.5 + 2.0, 1e-12);
}

TEST(NonNegMatrix, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(NonNegMatrix(scalar(-1e-300)), DomainError);
  EXPECT_THROW(NonNegMatrix(scalar(NAN)), DomainError);
  EXPECT_THROW(NonNegMatrix(scalar(INFINITY)), DomainError);
  EXPECT_NO_THROW(NonNegMatrix(scalar(0.0)));
}

TEST(DictionaryInvariants, NormsLabelsAndZeroColumns) {
  Eigen::MatrixXd w(2, 2);
  w << 3, 0, 4, 2;
  const Dictionary d = Dictionary::normalized(w, {"a", "b"});
  EXPECT_NEAR(d.atoms().col(0).norm(), 1.0, 1e-15);
  EXPECT_NEAR(d.atoms()(1, 0), 0.8, 1e-15);
  EXPECT_THROW(Dictionary(w, {"a", "b"}), DomainError);
  EXPECT_THROW(Dictionary::normalized(w, {"a"}), DomainError);
  Eigen::MatrixXd z = w;
  z.col(1).setZero();
  EXPECT_THROW(Dictionary::normalized(z, {"a", "b"}), DegenerateAtomError);
}

TEST(Objective, HandExamples) {
  const NonNegMatrix m(scalar(2.0));
  const Dictionary w(scalar(1.0), {"a"});
  const Activations h(scalar(1.0));
  EXPECT_NEAR(objective(m, w, h, config(1.0, 0.0)), 2.0 * std::numbers::ln2 - 1.0, 1e-12);
  EXPECT_NEAR(objective(m, w, h, config(1.0, 0.5)), 2.0 * std::numbers::ln2 - 0.5, 1e-12);
  EXPECT_NEAR(objective(m, w, Activations(scalar(2.0)), config(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Objective, ShapeMismatch) {
  const Dictionary w(Eigen::MatrixXd::Identity(2, 2), {"a", "b"});
  EXPECT_THROW(objective(NonNegMatrix(Eigen::MatrixXd::Ones(3, 1)), w,
                         Activations(Eigen::MatrixXd::Ones(2, 1)), SolverConfig{}),
               DomainError);
  EXPECT_THROW(update_activations(NonNegMatrix(Eigen::MatrixXd::Ones(2, 1)), w,
                                  Activations(Eigen::MatrixXd::Ones(3, 1)), SolverConfig{}),
               DomainError);
}

TEST(UpdateActivations, HandStep) {
  const Activations h = update_activations(NonNegMatrix(scalar(2.0)), Dictionary(scalar(1.0), {"a"}),
                                           Activations(scalar(1.0)), config(1.0, 0.0));
  EXPECT_DOUBLE_EQ(h.values()(0, 0), 2.0);
}

TEST(UpdateActivations, ExactSolutionIsFixedPoint) {
  std::mt19937_64 rng(4);
  const Dictionary w = Dictionary::normalized(uniform(rng, 6, 3, 0.1, 1.0), {"a", "b", "c"});
  const Eigen::MatrixXd h0 = uniform(rng, 3, 4, 0.1, 1.0);
  const NonNegMatrix m(w.atoms() * h0);
  const Activations h = update_activations(m, w, Activations(h0), config(1.0, 0.0));
  EXPECT_LT((h.values() - h0).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(UpdateActivations, ObjectiveNonIncreasingOverSteps) {
  std::mt19937_64 rng(6);
  const NonNegMatrix m(uniform(rng, 5, 4));
  const Dictionary w = Dictionary::normalized(uniform(rng, 5, 3, 0.01, 1.0), {"a", "b", "c"});
  const SolverConfig cfg = config(1.0, 0.1);
  Activations h(Eigen::MatrixXd::Ones(3, 4));
  double prev = objective(m, w, h, cfg);
  for (int it = 0; it < 200; ++it) {
    h = update_activations(m, w, h, cfg);
    const double cur = objective(m, w, h, cfg);
    EXPECT_LE(cur, prev + 1e-10 * std::abs(prev)) << it;
    prev = cur;
  }
}

TEST(SolveActivations, ExactRecovery) {
  std::mt19937_64 rng(8);
  const Dictionary w = Dictionary::normalized(uniform(rng, 8, 3), {"a", "b", "c"});
  const NonNegMatrix m(w.atoms() * uniform(rng, 3, 5));
  SolverConfig cfg = config(1.0, 0.0);
  cfg.rel_tol = 1e-15;
  const SolveResult r = solve_activations(m, w, cfg);
  EXPECT_LE(beta_divergence(m.values(), w.atoms() * r.activations.values(), 1.0), 1e-8);
}

TEST(SolveActivations, ZeroDataGivesZeroActivations) {
  const Dictionary w = Dictionary::normalized(Eigen::MatrixXd::Ones(4, 2) + Eigen::MatrixXd::Identity(4, 2), {"a", "b"});
  const SolveResult r =
      solve_activations(NonNegMatrix(Eigen::MatrixXd::Zero(4, 3)), w, config(1.0, 0.1));
  EXPECT_LE(r.activations.values().maxCoeff(), 1e-8);
}

TEST(SolveActivations, TraceRecordsInitAndEveryIteration) {
  std::mt19937_64 rng(9);
  const Dictionary w = Dictionary::normalized(uniform(rng, 6, 2), {"a", "b"});
  const NonNegMatrix m(uniform(rng, 6, 3));
  SolverConfig cfg = config(1.0, 0.1);
  cfg.max_iters = 7;
  cfg.rel_tol = 1e-300;
  const SolveResult r = solve_activations(m, w, cfg);
  EXPECT_EQ(r.iterations, 7);
  EXPECT_EQ(r.trace.size(), 8u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(r.trace[i], r.trace[i - 1] * (1.0 + 1e-10));
  }
}

TEST(SolveActivations, InitModes) {
  std::mt19937_64 rng(10);
  const Dictionary w = Dictionary::normalized(uniform(rng, 5, 2), {"a", "b"});
  const NonNegMatrix m(uniform(rng, 5, 2));
  SolverConfig cfg = config(1.0, 0.0);
  cfg.max_iters = 1;
  cfg.init = InitMode::Ones;
  const SolveResult ones = solve_activations(m, w, cfg);
  EXPECT_DOUBLE_EQ(ones.trace[0],
                   objective(m, w, Activations(Eigen::MatrixXd::Ones(2, 2)), cfg));
  cfg.init = InitMode::WtM;
  const SolveResult wtm = solve_activations(m, w, cfg);
  const Eigen::MatrixXd h0 = (w.atoms().transpose() * m.values()).array() + cfg.epsilon;
  EXPECT_DOUBLE_EQ(wtm.trace[0], objective(m, w, Activations(h0), cfg));
}

TEST(SolveActivations, Deterministic) {
  std::mt19937_64 rng(12);
  const Dictionary w = Dictionary::normalized(uniform(rng, 9, 4), {"a", "b", "c", "d"});
  const NonNegMatrix m(uniform(rng, 9, 3));
  const SolveResult a = solve_activations(m, w, SolverConfig{});
  const SolveResult b = solve_activations(m, w, SolverConfig{});
  EXPECT_EQ(a.activations.values(), b.activations.values());
  EXPECT_EQ(a.trace, b.trace);
}

TEST(SolveActivations, NnlsOracleForSingleAtom) {
  std::mt19937_64 rng(13);
  SolverConfig cfg = config(2.0, 0.0);
  cfg.rel_tol = 1e-15;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd w = uniform(rng, 2, 1, 0.01, 1.0);
    const Eigen::MatrixXd m = uniform(rng, 2, 1);
    const Dictionary dict = Dictionary::normalized(w, {"a"});
    const double expected = std::max(0.0, (dict.atoms().transpose() * m)(0, 0));
    const SolveResult r = solve_activations(NonNegMatrix(m), dict, cfg);
    EXPECT_NEAR(r.activations.values()(0, 0), expected, 1e-6);
  }
}

TEST(SolveActivations, KlScalingHomogeneity) {
  std::mt19937_64 rng(14);
  const Dictionary w = Dictionary::normalized(uniform(rng, 8, 3), {"a", "b", "c"});
  const Eigen::MatrixXd m = w.atoms() * uniform(rng, 3, 4, 0.1, 1.0);
  SolverConfig cfg = config(1.0, 0.0);
  cfg.rel_tol = 1e-15;
  cfg.max_iters = 5000;
  const Eigen::MatrixXd h1 = solve_activations(NonNegMatrix(m), w, cfg).activations.values();
  for (double c : {0.01, 3.0, 250.0}) {
    const Eigen::MatrixXd hc = solve_activations(NonNegMatrix(c * m), w, cfg).activations.values();
    EXPECT_LE((hc - c * h1).norm(), 1e-6 * (c * h1).norm()) << c;
  }
}

TEST(SolveActivations, InvalidConfig) {
  SolverConfig cfg;
  cfg.max_iters = 0;
  EXPECT_THROW(validate(cfg), DomainError);
  cfg = {};
  cfg.rel_tol = 0.0;
  EXPECT_THROW(validate(cfg), DomainError);
  cfg = {};
  cfg.sparsity = -0.1;
  EXPECT_THROW(validate(cfg), DomainError);
}

TEST(UpdateDictionary, ExactSolutionIsFixedPoint) {
  std::mt19937_64 rng(15);
  const Dictionary w = Dictionary::normalized(uniform(rng, 6, 2, 0.1, 1.0), {"a", "b"});
  const Eigen::MatrixXd h = uniform(rng, 2, 5, 0.1, 1.0);
  const NonNegMatrix m(w.atoms() * h);
  const Factorization f = update_dictionary(m, w, Activations(h), config(1.0, 0.0));
  EXPECT_LT((f.dictionary.atoms() - w.atoms()).norm(), 1e-10);
  EXPECT_LT((f.activations.values() - h).norm(), 1e-10);
}

TEST(UpdateDictionary, RenormalizationPreservesObjective) {
  std::mt19937_64 rng(16);
  const NonNegMatrix m(uniform(rng, 7, 5));
  const Dictionary w = Dictionary::normalized(uniform(rng, 7, 3), {"a", "b", "c"});
  const Activations h(uniform(rng, 3, 5));
  const SolverConfig cfg = config(1.0, 0.0);
  const Factorization f = update_dictionary(m, w, h, cfg);
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(f.dictionary.atoms().col(j).norm(), 1.0, 1e-12);

  // Redo the raw step by hand and compare with the renormalized result.
  const Eigen::MatrixXd r = (w.atoms() * h.values()).cwiseMax(cfg.epsilon);
  const Eigen::MatrixXd num = (m.values().array() / r.array()).matrix() * h.values().transpose();
  const Eigen::MatrixXd den = Eigen::MatrixXd::Ones(7, 5) * h.values().transpose();
  const Eigen::MatrixXd raw = (w.atoms().array() * num.array() / den.array()).matrix();
  const double before = beta_divergence(m.values(), (raw * h.values()).cwiseMax(cfg.epsilon), 1.0);
  EXPECT_NEAR(objective(m, f.dictionary, f.activations, cfg), before, 1e-12 * before);
}

TEST(UpdateDictionary, AlternatingRecoversRankTwo) {
  std::mt19937_64 rng(18);
  const NonNegMatrix m(uniform(rng, 10, 2, 0.1, 1.0) * uniform(rng, 2, 8, 0.1, 1.0));
  SolverConfig cfg = config(1.0, 0.0);
  Dictionary w = Dictionary::normalized(uniform(rng, 10, 2, 0.1, 1.0), {"a", "b"});
  Activations h(uniform(rng, 2, 8, 0.1, 1.0));
  for (int it = 0; it < 300; ++it) {
    h = update_activations(m, w, h, cfg);
    Factorization f = update_dictionary(m, w, h, cfg);
    w = std::move(f.dictionary);
    h = std::move(f.activations);
  }
  EXPECT_LE(beta_divergence(m.values(), w.atoms() * h.values(), 1.0), 1e-6);
}

TEST(UpdateDictionary, CollapsedColumnIsDegenerate) {
  const NonNegMatrix m(Eigen::MatrixXd::Ones(3, 2));
  const Dictionary w = Dictionary::normalized(Eigen::MatrixXd::Ones(3, 2), {"a", "b"});
  Eigen::MatrixXd h(2, 2);
  h << 1, 1, 0, 0;  // atom b receives no activation and its column stays put
  EXPECT_NO_THROW(update_dictionary(m, w, Activations(h), config(1.0, 0.0)));
  Eigen::MatrixXd zero_data = Eigen::MatrixXd::Zero(3, 2);
  EXPECT_THROW(update_dictionary(NonNegMatrix(zero_data), w, Activations(Eigen::MatrixXd::Ones(2, 2)),
                                 config(1.0, 0.0)),
               DegenerateAtomError);
}

TEST(FitNmf, RankOneExact) {
  std::mt19937_64 rng(19);
  const NonNegMatrix m(uniform(rng, 6, 1, 0.1, 1.0) * uniform(rng, 1, 5, 0.1, 1.0));
  SolverConfig cfg = config(1.0, 0.0);
  cfg.max_iters = 2000;
  cfg.rel_tol = 1e-15;
  const Factorization f = fit_nmf(m, 1, cfg, 7);
  EXPECT_LE(beta_divergence(m.values(), f.dictionary.atoms() * f.activations.values(), 1.0), 1e-8);
}

TEST(FitNmf, DeterministicAndMonotone) {
  std::mt19937_64 rng(20);
  const NonNegMatrix m(uniform(rng, 6, 5));
  SolverConfig cfg = config(1.0, 0.0);
  const Factorization a = fit_nmf(m, 5, cfg, 99);
  const Factorization b = fit_nmf(m, 5, cfg, 99);
  EXPECT_EQ(a.dictionary.atoms(), b.dictionary.atoms());
  EXPECT_EQ(a.activations.values(), b.activations.values());
  ASSERT_GE(a.trace.size(), 2u);
  EXPECT_LE(a.trace.back(), a.trace.front());
}

TEST(FitNmf, RankOutOfRange) {
  const NonNegMatrix m(Eigen::MatrixXd::Ones(4, 3));
  EXPECT_THROW(fit_nmf(m, 0, SolverConfig{}, 1), DomainError);
  EXPECT_THROW(fit_nmf(m, 4, SolverConfig{}, 1), DomainError);
}

}  // namespace
}  // namespace wsnmf
