#pragma once

#include <filesystem>
#include <string>

#include "wsnmf/identify.hpp"

namespace wsnmf {

inline constexpr int kModelFormatVersion = 1;

/// JSON document holding the references and settings of a model. The
/// whitening and dictionaries are rebuilt on load, so a loaded model is
/// bit-identical to the one that was saved.
std::string serialize_model(const IdentificationModel& model);
IdentificationModel deserialize_model(const std::string& text);

void save_model(const IdentificationModel& model, const std::filesystem::path& path);
IdentificationModel load_model(const std::filesystem::path& path);

}  // namespace wsnmf
