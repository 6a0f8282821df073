#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jitvd/corpus.hpp"
#include "jitvd/ctg.hpp"
#include "jitvd/eval.hpp"
#include "jitvd/localize.hpp"
#include "jitvd/neural/model.hpp"
#include "jitvd/neural/skipgram.hpp"
#include "jitvd/neural/train.hpp"

namespace jitvd {

enum class SplitKind { DevProcess, CrossProject };
std::string_view split_kind_name(SplitKind k);

struct PipelineConfig {
  std::uint64_t seed = 0;
  neural::HyperParams model;
  neural::TrainConfig train;
  neural::SkipGramConfig pretrain;
  int min_count = 1;
  bool trim = true;
  std::optional<int> hop_limit;
  ExplainerConfig explainer;
  SplitKind split = SplitKind::CrossProject;
  double split_ratio = 0.8;
  MiningConfig mining;
};

/// Sections: seed (required), model, train, pretrain, trim, explainer, split,
/// mining. Unknown keys are rejected. The top-level seed fills every
/// component seed that is not given explicitly.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json pipeline_config_to_json(const PipelineConfig& c);

/// Node-id range of one file inside a multi-file change graph.
struct FileSpan {
  std::string path;
  NodeId first = 0;
  std::size_t count = 0;
  std::string before;
  std::string after;
};

struct ChangeGraph {
  CodeTransformationGraph ctg;
  std::vector<FileSpan> files;
  std::vector<std::string> warnings;
};

/// CTG of one file pair (absent versions are empty units), trimmed unless
/// `trim` is false. Throws on unparseable input.
CodeTransformationGraph file_ctg(std::string_view before, std::string_view after, bool trim,
                                 std::optional<int> hop_limit, const std::string& path = {});

/// Per-file CTGs in path order joined into one graph. Unparseable files are
/// skipped with a warning.
ChangeGraph commit_graph(const CommitRecord& c, const PipelineConfig& cfg);
ChangeGraph pair_graph(const std::string& before, const std::string& after, const PipelineConfig& cfg,
                       const std::string& path = "input");

/// "path:line: text" of a ranked statement, taken from the new version when
/// the statement exists there.
std::string describe_statement(const ChangeGraph& g, const RankedStatement& s);

struct Dataset {
  std::vector<std::string> ids;
  std::vector<CodeTransformationGraph> graphs;
  std::vector<neural::Label> labels;
  std::vector<double> change_rates;
  std::vector<std::string> warnings;
};

Dataset build_dataset(const CommitCorpus& corpus, std::span<const LabeledCommit> commits, const PipelineConfig& cfg);

/// Vocabulary, skip-gram pretraining, then supervised training on the
/// non-empty graphs of `data`.
neural::JitVdModel train_model(const Dataset& data, const PipelineConfig& cfg, neural::TrainHistory* history = nullptr,
                               std::size_t limit = SIZE_MAX);

std::vector<neural::Prediction> predict_all(const neural::JitVdModel& model, const Dataset& data);

/// Test-side metrics and change-rate buckets. With `curve` the model is
/// retrained on 1..5 cumulative chronological folds of `train`.
EvalReport evaluate(const neural::JitVdModel& model, const Dataset& train, const Dataset& test,
                    const PipelineConfig& cfg, bool curve);

}  // namespace jitvd
