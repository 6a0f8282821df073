#include "jitvd/localize.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace jitvd {

using neural::JitVdModel;

ExplainerConfig explainer_config_from_json(const nlohmann::json& j, ExplainerConfig c) {
  if (!j.is_object()) throw ConfigError("explainer config must be an object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "method") {
        const auto s = v.get<std::string>();
        if (s == "attention")
          c.method = ExplainMethod::Attention;
        else if (s == "occlusion")
          c.method = ExplainMethod::Occlusion;
        else
          throw ConfigError("unknown explainer method '" + s + "'");
      } else if (key == "attention_layers") {
        const auto s = v.get<std::string>();
        if (s == "final")
          c.layers = AttentionLayers::Final;
        else if (s == "mean")
          c.layers = AttentionLayers::Mean;
        else
          throw ConfigError("attention_layers must be 'final' or 'mean'");
      } else if (key == "top_k") {
        c.top_k = v.get<int>();
      } else {
        throw ConfigError("unknown explainer key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad explainer config: ") + e.what());
  }
  if (c.top_k < 1) throw ConfigError("top_k must be >= 1");
  return c;
}

nlohmann::json explainer_config_to_json(const ExplainerConfig& c) {
  return {{"method", c.method == ExplainMethod::Attention ? "attention" : "occlusion"},
          {"attention_layers", c.layers == AttentionLayers::Final ? "final" : "mean"},
          {"top_k", c.top_k}};
}

void normalize(EdgeImportance& im) {
  double mx = 0.0;
  for (const auto& [k, v] : im) mx = std::max(mx, v);
  if (mx <= 0.0) return;
  for (auto& [k, v] : im) v /= mx;
}

namespace {

EdgeKey key_of(const CtgEdge& e) { return {e.src, e.dst, e.relation}; }

double edge_attention(const neural::LayerTrace<double>& t, const neural::RelGraph& rg, int r, int j, int i) {
  const int pos = rg.find_edge(r, j, i);
  return pos < 0 ? 0.0 : t.attention[static_cast<std::size_t>(r)][static_cast<std::size_t>(pos)];
}

}  // namespace

EdgeImportance attention_edge_importance(const JitVdModel& model, const CodeTransformationGraph& g,
                                         AttentionLayers layers) {
  if (model.config().layer_kind != neural::LayerKind::Rgat) throw NotAttentionModel();
  EdgeImportance im;
  if (g.edges.empty()) return im;
  const auto sample = model.encode(g);
  const auto trace = model.trace(sample);
  const bool both = model.config().direction == neural::Direction::Bidirectional;

  const std::size_t first = layers == AttentionLayers::Final ? trace.layers.size() - 1 : 0;
  const double count = static_cast<double>(trace.layers.size() - first);
  for (const auto& e : g.edges) {
    const int r = static_cast<int>(e.relation.cls);
    double sum = 0.0;
    for (std::size_t l = first; l < trace.layers.size(); ++l) {
      double w = edge_attention(trace.layers[l], sample.graph, r, e.src, e.dst);
      if (both) w = std::max(w, edge_attention(trace.layers[l], sample.graph, r, e.dst, e.src));
      sum += w;
    }
    im[key_of(e)] = sum / count;
  }
  normalize(im);
  return im;
}

CodeTransformationGraph without_edge(const CodeTransformationGraph& g, std::size_t index) {
  CodeTransformationGraph out = g;
  out.edges.erase(out.edges.begin() + static_cast<std::ptrdiff_t>(index));
  return out;
}

EdgeImportance occlusion_raw(const JitVdModel& model, const CodeTransformationGraph& g) {
  EdgeImportance im;
  if (g.edges.empty()) return im;
  const double base = neural::model_forward(model, g).probability;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const double p = neural::model_forward(model, without_edge(g, i)).probability;
    im[key_of(g.edges[i])] = std::max(0.0, base - p);
  }
  return im;
}

EdgeImportance occlusion_edge_importance(const JitVdModel& model, const CodeTransformationGraph& g) {
  EdgeImportance im = occlusion_raw(model, g);
  normalize(im);
  return im;
}

std::vector<double> node_importance(const EdgeImportance& im, const CodeTransformationGraph& g) {
  std::vector<std::array<double, kNumRelations>> sums(g.size(), std::array<double, kNumRelations>{});
  for (const auto& [key, score] : im) {
    const auto& [src, dst, rel] = key;
    if (src < 0 || dst < 0 || static_cast<std::size_t>(src) >= g.size() || static_cast<std::size_t>(dst) >= g.size())
      throw ShapeMismatch("importance refers to a node outside the graph");
    const auto r = static_cast<std::size_t>(rel.cls);
    sums[static_cast<std::size_t>(src)][r] += score;
    if (dst != src) sums[static_cast<std::size_t>(dst)][r] += score;
  }
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = *std::max_element(sums[i].begin(), sums[i].end());
  return out;
}

StatementRanking statement_suspiciousness(std::span<const double> node_scores, const CodeTransformationGraph& g) {
  if (node_scores.size() != g.size()) throw ShapeMismatch("one node score per graph node expected");
  std::vector<std::vector<NodeId>> children(g.size());
  for (const auto& e : g.edges)
    if (e.relation.cls == RelationClass::Structure && e.src != e.dst)
      children[static_cast<std::size_t>(e.src)].push_back(e.dst);

  StatementRanking ranking;
  std::vector<char> seen(g.size());
  for (const auto& n : g.nodes) {
    if (!n.is_statement) continue;
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<NodeId> stack{n.id};
    seen[static_cast<std::size_t>(n.id)] = 1;
    double score = 0.0;
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      score += node_scores[static_cast<std::size_t>(v)];
      for (NodeId c : children[static_cast<std::size_t>(v)])
        if (!seen[static_cast<std::size_t>(c)]) {
          seen[static_cast<std::size_t>(c)] = 1;
          stack.push_back(c);
        }
    }
    ranking.push_back({n.id, n.line_old, n.line_new, n.alpha, score});
  }
  std::stable_sort(ranking.begin(), ranking.end(), [](const RankedStatement& a, const RankedStatement& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.node_id < b.node_id;
  });
  return ranking;
}

StatementRanking explain(const JitVdModel& model, const CodeTransformationGraph& g, const ExplainerConfig& cfg) {
  if (g.empty()) return {};
  const EdgeImportance im = cfg.method == ExplainMethod::Attention ? attention_edge_importance(model, g, cfg.layers)
                                                                   : occlusion_edge_importance(model, g);
  const auto scores = node_importance(im, g);
  return statement_suspiciousness(scores, g);
}

nlohmann::json ranking_to_json(const StatementRanking& r) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : r)
    out.push_back({{"node_id", s.node_id},
                   {"line_old", s.line_old},
                   {"line_new", s.line_new},
                   {"alpha", alpha_name(s.alpha)},
                   {"score", s.score}});
  return out;
}

std::string ranking_report(const StatementRanking& r, int k,
                           const std::function<std::string(const RankedStatement&)>& describe) {
  std::ostringstream out;
  const int n = std::min<int>(k, static_cast<int>(r.size()));
  for (int i = 0; i < n; ++i) {
    const auto& s = r[static_cast<std::size_t>(i)];
    out << '#' << (i + 1) << "  score " << std::fixed << std::setprecision(4) << s.score << "  ";
    if (s.line_new) out << "new:" << s.line_new;
    if (s.line_old) out << (s.line_new ? " " : "") << "old:" << s.line_old;
    out << "  [" << alpha_name(s.alpha) << "]";
    if (describe) out << "  " << describe(s);
    out << '\n';
  }
  return out.str();
}

}  // namespace jitvd
