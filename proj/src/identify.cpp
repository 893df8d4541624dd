#include "wsnmf/identify.hpp"

#include <algorithm>

#include "wsnmf/errors.hpp"

namespace wsnmf {

namespace {

void check_query(const Signal& query, const IdentificationModel& model) {
  validate(query);
  if (query.size() != model.references.n()) {
    throw DomainError("query '" + query.id + "' has " + std::to_string(query.size()) +
                      " samples, references have " + std::to_string(model.references.n()));
  }
}

}  // namespace

NonNegMatrix rectify(const Eigen::MatrixXd& rows) {
  return NonNegMatrix(rows.transpose().cwiseAbs());
}

NonNegMatrix rectify(const Ensemble& e) { return rectify(e.matrix()); }

IdentificationModel build_model(const Ensemble& refs, WhiteningMethod method,
                                const SolverConfig& solver, double eig_floor) {
  if (refs.d() < 2) throw DomainError("need at least two reference signals");
  for (const auto& s : refs.signals()) {
    if (s.label.empty()) throw DomainError("reference '" + s.id + "' has an empty label");
  }
  validate(solver);

  IdentificationModel model;
  model.references = refs;
  model.method = method;
  model.solver = solver;
  model.eig_floor = eig_floor;
  model.raw_dictionary =
      Dictionary::normalized(rectify(refs).values(), refs.labels());
  model.whitening = fit_whitening(method, refs, eig_floor);
  model.dictionary = Dictionary::normalized(
      rectify(whiten(refs.matrix(), model.whitening)).values(), refs.labels());
  return model;
}

Signal transductive_whiten(const Signal& query, const IdentificationModel& model) {
  check_query(query, model);
  std::vector<Signal> joint = model.references.signals();
  Signal q = query;
  q.dt = model.references.dt();
  joint.push_back(std::move(q));
  const Ensemble ensemble(std::move(joint));

  const auto whitening = fit_whitening(model.method, ensemble, model.eig_floor);
  const Eigen::MatrixXd z = whiten(ensemble.matrix(), whitening);

  Signal out = query;
  const auto last = z.row(z.rows() - 1);
  out.samples.assign(last.begin(), last.end());
  return out;
}

IdentificationResult identify(const Signal& query, const IdentificationModel& model,
                              bool use_whitening) {
  check_query(query, model);
  const Signal input = use_whitening ? transductive_whiten(query, model) : query;
  const Dictionary& w = use_whitening ? model.dictionary : model.raw_dictionary;

  const Eigen::Map<const Eigen::RowVectorXd> row(input.samples.data(),
                                                 static_cast<Eigen::Index>(input.size()));
  const NonNegMatrix m = rectify(Eigen::MatrixXd(row));
  SolveResult solved = solve_activations(m, w, model.solver);

  IdentificationResult result;
  for (const auto& label : w.labels()) result.scores[label] = 0.0;
  const Eigen::MatrixXd& h = solved.activations.values();
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    result.scores[w.labels()[static_cast<std::size_t>(k)]] += h(k, 0);
  }
  result.activations = std::move(solved.activations);

  // std::map iterates labels lexicographically, so the first maximum wins ties.
  double top = -1.0, second = 0.0;
  for (const auto& [label, score] : result.scores) {
    if (score > top) {
      second = std::max(second, top);
      top = score;
      result.winner = label;
    } else {
      second = std::max(second, score);
    }
  }
  if (!(top > 0.0)) {
    result.winner = kIndeterminate;
    result.margin = 0.0;
  } else if (result.scores.size() == 1) {
    result.margin = 1.0;
  } else {
    result.margin = (top - second) / top;
  }
  return result;
}

Evaluation evaluate(const Ensemble& test, const IdentificationModel& model,
                    bool use_whitening) {
  if (test.empty()) throw DomainError("empty test set");

  Evaluation eval;
  for (const auto& label : model.references.labels()) {
    if (std::find(eval.labels.begin(), eval.labels.end(), label) == eval.labels.end()) {
      eval.labels.push_back(label);
    }
  }
  auto index_of = [&](const std::string& label) -> std::size_t {
    const auto it = std::find(eval.labels.begin(), eval.labels.end(), label);
    return static_cast<std::size_t>(it - eval.labels.begin());
  };
  for (const auto& s : test.signals()) {
    if (index_of(s.label) == eval.labels.size()) {
      throw DomainError("test signal '" + s.id + "' has unknown label '" + s.label + "'");
    }
  }

  const std::size_t k = eval.labels.size();
  eval.confusion.assign(k, std::vector<int>(k + 1, 0));
  int correct = 0;
  for (const auto& s : test.signals()) {
    IdentificationResult r = identify(s, model, use_whitening);
    const std::size_t row = index_of(s.label);
    const std::size_t col = r.winner == kIndeterminate ? k : index_of(r.winner);
    ++eval.confusion[row][col];
    if (col == row) ++correct;
    eval.results.push_back(std::move(r));
  }
  eval.accuracy = static_cast<double>(correct) / static_cast<double>(test.d());
  return eval;
}

}  // namespace wsnmf
