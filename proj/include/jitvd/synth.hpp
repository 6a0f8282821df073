#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jitvd/corpus.hpp"

namespace jitvd {

struct SynthConfig {
  int projects = 50;
  int commits_per_project = 10;
  double dangerous_ratio = 0.5;
  std::uint64_t seed = 0;
};

/// Where a labeled commit's edit landed. `old_version` is true when the line
/// refers to the before-version (deleted statements).
struct PlantedSite {
  std::string commit;
  std::string path;
  int line = 0;
  bool old_version = false;
  std::string edit;  // e.g. "widen-bound", "remove-free", "delete-guard", "add-guard"
};

struct SynthCorpus {
  CommitCorpus corpus;
  Labeling labels;  // ground truth from the generator
  std::vector<PlantedSite> sites;
};

/// Random MiniC programs (buffer copies, output-parameter reads, guarded
/// writes, arithmetic helpers) evolved by one edit per commit. Dangerous
/// edits widen a bounds check, drop the free of a buffer filled through an
/// output parameter, or delete a guard; safe edits are equivalent refactors
/// and guard additions. Every project starts with an unlabeled import commit.
SynthCorpus generate_synthetic(const SynthConfig& cfg);

nlohmann::json sites_to_json(const std::vector<PlantedSite>& sites);
std::vector<PlantedSite> sites_from_json(const nlohmann::json& j);

/// Writes manifest.json, labels.json and planted.json into `dir`.
void write_synthetic(const SynthCorpus& s, const std::filesystem::path& dir);

}  // namespace jitvd
