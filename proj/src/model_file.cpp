#include "wsnmf/model_file.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wsnmf/errors.hpp"

namespace wsnmf {

using nlohmann::json;

namespace {

std::string init_name(InitMode mode) { return mode == InitMode::Ones ? "ones" : "wtm"; }

InitMode parse_init(const std::string& name) {
  if (name == "ones") return InitMode::Ones;
  if (name == "wtm") return InitMode::WtM;
  throw ParseError("unknown solver init '" + name + "'", 0);
}

}  // namespace

std::string serialize_model(const IdentificationModel& model) {
  json refs = json::array();
  for (const auto& s : model.references.signals()) {
    refs.push_back({{"id", s.id}, {"label", s.label}, {"dt", s.dt}, {"samples", s.samples}});
  }
  const SolverConfig& cfg = model.solver;
  json doc = {
      {"format_version", kModelFormatVersion},
      {"whitening_method", to_string(model.method)},
      {"eig_floor", model.eig_floor},
      {"solver",
       {{"beta", cfg.beta},
        {"sparsity", cfg.sparsity},
        {"max_iters", cfg.max_iters},
        {"rel_tol", cfg.rel_tol},
        {"epsilon", cfg.epsilon},
        {"init", init_name(cfg.init)}}},
      {"references", std::move(refs)},
  };
  return doc.dump(1) + "\n";
}

IdentificationModel deserialize_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what(), 0);
  }
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw ParseError("unsupported model format_version " + std::to_string(version), 0);
    }
    SolverConfig cfg;
    const json& s = doc.at("solver");
    cfg.beta = s.at("beta").get<double>();
    cfg.sparsity = s.at("sparsity").get<double>();
    cfg.max_iters = s.at("max_iters").get<int>();
    cfg.rel_tol = s.at("rel_tol").get<double>();
    cfg.epsilon = s.at("epsilon").get<double>();
    cfg.init = parse_init(s.at("init").get<std::string>());

    std::vector<Signal> refs;
    for (const json& r : doc.at("references")) {
      Signal sig;
      sig.id = r.at("id").get<std::string>();
      sig.label = r.at("label").get<std::string>();
      sig.dt = r.at("dt").get<double>();
      sig.samples = r.at("samples").get<std::vector<double>>();
      refs.push_back(std::move(sig));
    }
    return build_model(Ensemble(std::move(refs)),
                       parse_whitening_method(doc.at("whitening_method").get<std::string>()),
                       cfg, doc.at("eig_floor").get<double>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what(), 0);
  }
}

void save_model(const IdentificationModel& model, const std::filesystem::path& path) {
  const std::string text = serialize_model(model);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

IdentificationModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace wsnmf
