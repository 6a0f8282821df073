#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "jitvd/neural/model.hpp"

namespace jitvd::neural {

inline constexpr int kCheckpointVersion = 1;

/// JSON container: format tag, version, hyperparameters, vocabulary and every
/// tensor as {name, rows, cols, data}. Doubles round-trip exactly.
nlohmann::json checkpoint_to_json(const JitVdModel& model);
JitVdModel checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const JitVdModel& model, const std::filesystem::path& path);
JitVdModel load_checkpoint(const std::filesystem::path& path);

}  // namespace jitvd::neural
