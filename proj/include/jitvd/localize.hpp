#pragma once

#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "jitvd/ctg.hpp"
#include "jitvd/neural/model.hpp"

namespace jitvd {

/// (src, dst, relation) of a CTG edge.
using EdgeKey = std::tuple<NodeId, NodeId, Relation>;

/// Scores in [0, 1]; the maximum is 1 unless every score is 0.
using EdgeImportance = std::map<EdgeKey, double>;

enum class AttentionLayers { Final, Mean };
enum class ExplainMethod { Attention, Occlusion };

struct ExplainerConfig {
  ExplainMethod method = ExplainMethod::Attention;
  AttentionLayers layers = AttentionLayers::Final;
  int top_k = 5;
};

ExplainerConfig explainer_config_from_json(const nlohmann::json& j, ExplainerConfig base = {});
nlohmann::json explainer_config_to_json(const ExplainerConfig& c);

/// Divides every score by the largest one (no-op when all are 0).
void normalize(EdgeImportance& im);

/// Attention weight of each edge, read at the final layer or averaged over
/// layers. In bidirectional mode an edge takes the larger weight of its two
/// directions. Throws NotAttentionModel for convolution models.
EdgeImportance attention_edge_importance(const neural::JitVdModel& model, const CodeTransformationGraph& g,
                                         AttentionLayers layers = AttentionLayers::Final);

/// Unnormalized drop max(0, p(g) - p(g without e)) per edge.
EdgeImportance occlusion_raw(const neural::JitVdModel& model, const CodeTransformationGraph& g);
EdgeImportance occlusion_edge_importance(const neural::JitVdModel& model, const CodeTransformationGraph& g);

/// Copy of g without the edge at position `index`.
CodeTransformationGraph without_edge(const CodeTransformationGraph& g, std::size_t index);

/// Per node: max over relation classes of the summed scores of incident
/// edges (incoming and outgoing). A self-loop counts once.
std::vector<double> node_importance(const EdgeImportance& im, const CodeTransformationGraph& g);

struct RankedStatement {
  NodeId node_id = kNoNode;
  int line_old = 0;
  int line_new = 0;
  Alpha alpha = Alpha::Unchanged;
  double score = 0.0;
};

using StatementRanking = std::vector<RankedStatement>;

/// Score of statement s is the sum of node scores over s and its structure
/// descendants. Sorted by descending score, then ascending node id.
StatementRanking statement_suspiciousness(std::span<const double> node_scores, const CodeTransformationGraph& g);

StatementRanking explain(const neural::JitVdModel& model, const CodeTransformationGraph& g, const ExplainerConfig& cfg);

nlohmann::json ranking_to_json(const StatementRanking& r);

/// One line per entry of the top k: rank, score, lines and the text returned
/// by `describe` for that statement.
std::string ranking_report(const StatementRanking& r, int k,
                           const std::function<std::string(const RankedStatement&)>& describe);

}  // namespace jitvd
