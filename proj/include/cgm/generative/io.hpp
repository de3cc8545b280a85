#pragma once

#include <filesystem>

#include "cgm/generative/model.hpp"

namespace cgm {

/// Writes model.cgmt (tensor archive) and model.txt (config and constraint
/// sidecar) into `dir`.
void save_model(const std::filesystem::path& dir, const GenerativeModel& model);
GenerativeModel load_model(const std::filesystem::path& dir);

} // namespace cgm
