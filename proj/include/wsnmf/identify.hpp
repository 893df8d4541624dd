#pragma once

#include <map>
#include <string>
#include <vector>

#include "wsnmf/signals.hpp"
#include "wsnmf/snmf.hpp"
#include "wsnmf/whitening.hpp"

namespace wsnmf {

/// Winner reported when every activation is zero.
inline constexpr const char* kIndeterminate = "indeterminate";

/// Supervised identification model built from labeled reference traces.
/// Everything except the references and settings is derived in build_model.
struct IdentificationModel {
  Ensemble references;
  WhiteningMethod method = WhiteningMethod::ZCA;
  SolverConfig solver;
  double eig_floor = kDefaultEigFloor;

  WhiteningModel whitening;     // fit on the references
  Dictionary dictionary;        // rectified whitened references
  Dictionary raw_dictionary;    // rectified references, for the unwhitened arm
};

struct IdentificationResult {
  std::map<std::string, double> scores;  // summed activation mass per label
  std::string winner;
  double margin = 0.0;  // (top - runner-up) / top
  Activations activations;
};

/// |x|, laid out with time samples as rows and one column per signal.
NonNegMatrix rectify(const Ensemble& e);
NonNegMatrix rectify(const Eigen::MatrixXd& rows);

IdentificationModel build_model(const Ensemble& refs, WhiteningMethod method,
                                const SolverConfig& solver,
                                double eig_floor = kDefaultEigFloor);

/// Refits the whitening on references + query and returns the whitened query.
Signal transductive_whiten(const Signal& query, const IdentificationModel& model);

IdentificationResult identify(const Signal& query, const IdentificationModel& model,
                              bool use_whitening = true);

/// Row = true label, column = predicted label. Columns carry one extra
/// trailing entry for kIndeterminate.
struct Evaluation {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> confusion;
  double accuracy = 0.0;
  std::vector<IdentificationResult> results;  // one per test signal, input order
};

Evaluation evaluate(const Ensemble& test, const IdentificationModel& model,
                    bool use_whitening = true);

}  // namespace wsnmf
