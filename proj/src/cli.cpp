#include "wsnmf/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wsnmf/errors.hpp"
#include "wsnmf/identify.hpp"
#include "wsnmf/model_file.hpp"

namespace wsnmf {

namespace fs = std::filesystem;

namespace {

struct SynthOptions {
  BenchmarkSpec spec;
  std::string out_dir;
};

struct SolverOptions {
  std::string method = "zca";
  SolverConfig cfg;
};

struct FitOptions {
  std::string train;
  std::string model_out;
  SolverOptions solver;
};

struct IdentifyOptions {
  std::string model;
  std::string query;
  bool no_whiten = false;
  bool json = false;
};

struct EvalOptions {
  std::string model;
  std::string test;
  std::string out;
  bool no_whiten = false;
  bool json = false;
};

struct DiagnoseOptions {
  std::string model;
  std::string out_dir;
};

void add_solver_flags(CLI::App& cmd, SolverOptions& opt) {
  cmd.add_option("--method", opt.method, "Whitening method")
      ->check(CLI::IsMember({"pca", "zca", "pca-cor", "zca-cor"}, CLI::ignore_case))
      ->capture_default_str();
  cmd.add_option("--beta", opt.cfg.beta, "Beta-divergence exponent")->capture_default_str();
  cmd.add_option("--lambda", opt.cfg.sparsity, "Sparsity weight on the activations")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd.add_option("--max-iters", opt.cfg.max_iters, "Iteration cap of the activation solver")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--tol", opt.cfg.rel_tol, "Relative objective change that stops the solver")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create directory '" + dir.string() + "'");
  }
}

int cmd_synth(const SynthOptions& opt, std::ostream& out) {
  validate(opt.spec);
  const fs::path dir(opt.out_dir);
  ensure_dir(dir);

  const Ensemble train = synth_ensemble(opt.spec, 0, 1);
  const Ensemble test = synth_ensemble(opt.spec, 1, opt.spec.traces_per_class);
  save_ensemble(train, dir / "train.csv");
  save_ensemble(test, dir / "test.csv");

  Eigen::MatrixXd templates(opt.spec.n_classes, static_cast<Eigen::Index>(opt.spec.n_samples));
  for (int c = 0; c < opt.spec.n_classes; ++c) {
    const auto t = class_template(opt.spec, c);
    templates.row(c) = Eigen::Map<const Eigen::RowVectorXd>(t.data(), templates.cols());
  }
  out << "seed: " << opt.spec.seed << '\n';
  out << "classes: " << opt.spec.n_classes << ", traces per class: "
      << opt.spec.traces_per_class << ", samples: " << opt.spec.n_samples << '\n';
  // Zero templates (vacant scene at similarity 0) have no correlation.
  try {
    out << "mean template correlation: " << mean_offdiagonal_correlation(templates) << '\n';
  } catch (const DomainError&) {
    out << "mean template correlation: n/a\n";
  }
  out << "mean train trace correlation: " << mean_offdiagonal_correlation(train.matrix())
      << '\n';
  out << "wrote " << (dir / "train.csv").string() << " (" << train.d() << " traces), "
      << (dir / "test.csv").string() << " (" << test.d() << " traces)\n";
  return kExitOk;
}

int cmd_fit(const FitOptions& opt, std::ostream& out) {
  const Ensemble train = load_ensemble(opt.train);
  const IdentificationModel model =
      build_model(train, parse_whitening_method(opt.solver.method), opt.solver.cfg);
  save_model(model, opt.model_out);

  const double before = diagonality(model.whitening.moments.covariance);
  const double after = diagonality(estimate_moments(whiten(train, model.whitening)).covariance);
  out << "atoms: " << model.dictionary.size() << '\n';
  out << "method: " << to_string(model.method) << '\n';
  out << "diagonality before: " << format_double(before) << '\n';
  out << "diagonality after: " << format_double(after) << '\n';
  out << "wrote " << opt.model_out << '\n';
  return kExitOk;
}

std::vector<std::pair<std::string, double>> ranked(const IdentificationResult& r) {
  std::vector<std::pair<std::string, double>> v(r.scores.begin(), r.scores.end());
  std::stable_sort(v.begin(), v.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return v;
}

int cmd_identify(const IdentifyOptions& opt, std::ostream& out) {
  const IdentificationModel model = load_model(opt.model);
  const Ensemble queries = load_ensemble(opt.query);
  if (queries.empty()) throw std::runtime_error("query file '" + opt.query + "' has no signals");

  nlohmann::json doc = nlohmann::json::array();
  for (const auto& q : queries.signals()) {
    if (q.size() != model.references.n()) {
      throw std::runtime_error("query '" + q.id + "' has " + std::to_string(q.size()) +
                               " samples, model expects " +
                               std::to_string(model.references.n()));
    }
    const IdentificationResult r = identify(q, model, !opt.no_whiten);
    const auto top = ranked(r);
    if (opt.json) {
      doc.push_back({{"id", q.id}, {"winner", r.winner}, {"margin", r.margin},
                     {"scores", r.scores}});
      continue;
    }
    out << q.id << '\t' << r.winner << '\t' << "margin=" << r.margin;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, top.size()); ++i) {
      out << '\t' << top[i].first << '=' << top[i].second;
    }
    out << '\n';
  }
  if (opt.json) out << doc.dump(2) << '\n';
  return kExitOk;
}

void write_confusion_csv(const Evaluation& eval, const fs::path& path) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write '" + path.string() + "'");
  file << "true\\predicted";
  for (const auto& l : eval.labels) file << ',' << l;
  file << ',' << kIndeterminate << '\n';
  for (std::size_t i = 0; i < eval.labels.size(); ++i) {
    file << eval.labels[i];
    for (int c : eval.confusion[i]) file << ',' << c;
    file << '\n';
  }
  if (!file) throw std::runtime_error("write failed for '" + path.string() + "'");
}

int cmd_eval(const EvalOptions& opt, std::ostream& out) {
  const IdentificationModel model = load_model(opt.model);
  const Ensemble test = load_ensemble(opt.test);
  const Evaluation eval = evaluate(test, model, !opt.no_whiten);
  write_confusion_csv(eval, opt.out);
  if (opt.json) {
    nlohmann::json doc = {{"accuracy", eval.accuracy},
                          {"whitened", !opt.no_whiten},
                          {"labels", eval.labels},
                          {"confusion", eval.confusion}};
    out << doc.dump(2) << '\n';
  } else {
    out << "whitening: " << (opt.no_whiten ? "off" : to_string(model.method)) << '\n';
    out << "accuracy: " << format_double(eval.accuracy) << '\n';
    out << "wrote " << opt.out << '\n';
  }
  return kExitOk;
}

int cmd_diagnose(const DiagnoseOptions& opt, std::ostream& out) {
  const IdentificationModel model = load_model(opt.model);
  const fs::path dir(opt.out_dir);
  ensure_dir(dir);

  const Ensemble whitened = whiten(model.references, model.whitening);
  const Eigen::MatrixXd& before = model.whitening.moments.covariance;
  const Eigen::MatrixXd after = estimate_moments(whitened).covariance;
  write_matrix_csv(before, dir / "cov_before.csv");
  write_matrix_csv(after, dir / "cov_after.csv");
  write_matrix_csv(cross_correlation(model.references, whitened), dir / "crosscorr.csv");

  out << "diagonality before: " << format_double(diagonality(before)) << '\n';
  out << "diagonality after: " << format_double(diagonality(after)) << '\n';
  out << "wrote cov_before.csv, cov_after.csv, crosscorr.csv to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

void write_matrix_csv(const Eigen::MatrixXd& m, const fs::path& path) {
  std::ostringstream buf;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) buf << ',';
      buf << format_double(m(i, j));
    }
    buf << '\n';
  }
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write '" + path.string() + "'");
  file << buf.str();
  if (!file) throw std::runtime_error("write failed for '" + path.string() + "'");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Whitened sparse NMF identification of buried-object radar traces", "wsnmf"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic train/test benchmark");
  synth_cmd->add_option("-o,--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--classes", synth.spec.n_classes, "Number of classes")
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  synth_cmd->add_option("--traces-per-class", synth.spec.traces_per_class,
                        "Traces per class; the first goes to train.csv")
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  synth_cmd->add_option("--similarity", synth.spec.similarity,
                        "Target correlation between class templates")
      ->check(CLI::Range(0.0, 0.999999))
      ->capture_default_str();
  synth_cmd->add_option("--noise", synth.spec.noise_sigma, "Receiver noise std")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth_cmd->add_option("--ground", synth.spec.ground_bounce_amplitude,
                        "Median ground-bounce amplitude")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth_cmd->add_option("--ground-jitter", synth.spec.ground_amplitude_jitter,
                        "Std of the per-trace ground-bounce log-gain")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed, "Generator seed")->capture_default_str();

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Build an identification model from references");
  fit_cmd->add_option("train", fit.train, "Reference ensemble CSV")->required();
  fit_cmd->add_option("-o,--out", fit.model_out, "Model file to write")->required();
  add_solver_flags(*fit_cmd, fit.solver);

  IdentifyOptions ident;
  auto* ident_cmd = app.add_subcommand("identify", "Identify each trace of a query CSV");
  ident_cmd->add_option("model", ident.model, "Model file")->required();
  ident_cmd->add_option("query", ident.query, "Query ensemble CSV")->required();
  ident_cmd->add_flag("--no-whiten", ident.no_whiten, "Match raw traces (ablation)");
  ident_cmd->add_flag("--json", ident.json, "Machine-readable output");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a labeled test set");
  eval_cmd->add_option("model", eval.model, "Model file")->required();
  eval_cmd->add_option("test", eval.test, "Labeled test ensemble CSV")->required();
  eval_cmd->add_option("-o,--out", eval.out, "Confusion matrix CSV to write")
      ->default_val("confusion.csv")
      ->capture_default_str();
  eval_cmd->add_flag("--no-whiten", eval.no_whiten, "Match raw traces (ablation)");
  eval_cmd->add_flag("--json", eval.json, "Machine-readable output");

  DiagnoseOptions diag;
  auto* diag_cmd = app.add_subcommand("diagnose", "Export whitening diagnostics as CSV");
  diag_cmd->add_option("model", diag.model, "Model file")->required();
  diag_cmd->add_option("-o,--out", diag.out_dir, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, out);
    if (*fit_cmd) return cmd_fit(fit, out);
    if (*ident_cmd) return cmd_identify(ident, out);
    if (*eval_cmd) return cmd_eval(eval, out);
    if (*diag_cmd) return cmd_diagnose(diag, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace wsnmf
