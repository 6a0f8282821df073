#include <gtest/gtest.h>

#include <cmath>

#include "jitvd/localize.hpp"
#include "jitvd/neural/random.hpp"
#include "test_paths.hpp"

using namespace jitvd;
using neural::HyperParams;
using neural::JitVdModel;
using neural::LayerKind;

namespace {

CodeTransformationGraph ctg_of(const std::string& before, const std::string& after) {
  const auto a = build_rcg(parse_source(before));
  const auto b = build_rcg(parse_source(after));
  return trim_ctg(build_ctg(a, b, match_versions(a, b)));
}

CodeTransformationGraph overflow() { return ctg_of(read_fixture("overflow_old.c"), read_fixture("overflow_new.c")); }

JitVdModel model_for(const CodeTransformationGraph& g, LayerKind kind, std::uint64_t seed = 7,
                     neural::Direction dir = neural::Direction::Forward) {
  HyperParams h;
  h.layers = 2;
  h.d_emb = 8;
  h.d_hidden = 8;
  h.layer_kind = kind;
  h.direction = dir;
  h.seed = seed;
  return JitVdModel::create(h, neural::Vocab::build({neural::content_stream(g)}));
}

/// Hand-made graph: nodes 0..n-1 with given edges, no statements.
CodeTransformationGraph bare_graph(int n, const std::vector<CtgEdge>& edges) {
  CodeTransformationGraph g;
  for (int i = 0; i < n; ++i) {
    CtgNode node;
    node.id = i;
    node.kind = NodeKind::Identifier;
    node.label = "v";
    g.nodes.push_back(node);
  }
  g.edges = edges;
  return g;
}

}  // namespace

TEST(EdgeImportance, AttentionRequiresAttentionModel) {
  const auto g = overflow();
  EXPECT_THROW(attention_edge_importance(model_for(g, LayerKind::Rgcn), g), NotAttentionModel);
}

TEST(EdgeImportance, AttentionNormalised) {
  const auto g = overflow();
  for (auto layers : {AttentionLayers::Final, AttentionLayers::Mean})
    for (auto dir : {neural::Direction::Forward, neural::Direction::Bidirectional}) {
      const auto im = attention_edge_importance(model_for(g, LayerKind::Rgat, 7, dir), g, layers);
      ASSERT_EQ(im.size(), g.edges.size());
      double mx = 0;
      for (const auto& [k, v] : im) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        mx = std::max(mx, v);
      }
      EXPECT_EQ(mx, 1.0);
    }
}

TEST(EdgeImportance, SingleInEdgeHasFullWeight) {
  // a -> b is b's only in-edge
  const auto g = bare_graph(2, {{0, 1, Relation::data(), Alpha::Added}});
  const auto im = attention_edge_importance(model_for(overflow(), LayerKind::Rgat), g);
  ASSERT_EQ(im.size(), 1u);
  EXPECT_EQ(im.begin()->second, 1.0);
}

TEST(EdgeImportance, AttentionGolden) {
  const auto g = overflow();
  const auto im = attention_edge_importance(model_for(g, LayerKind::Rgat, 42), g);
  const auto golden = nlohmann::json::parse(read_fixture("overflow.attention.json"));
  ASSERT_EQ(golden.size(), im.size());
  std::size_t i = 0;
  for (const auto& [k, v] : im) {
    const auto& row = golden[i++];
    EXPECT_EQ(row[0].get<NodeId>(), std::get<0>(k));
    EXPECT_EQ(row[1].get<NodeId>(), std::get<1>(k));
    EXPECT_NEAR(row[2].get<double>(), v, 1e-12);
  }
}

TEST(EdgeImportance, OcclusionOfEdgelessGraphIsEmpty) {
  const auto g = bare_graph(3, {});
  EXPECT_TRUE(occlusion_edge_importance(model_for(overflow(), LayerKind::Rgcn), g).empty());
}

TEST(EdgeImportance, OcclusionMatchesRecomputation) {
  const auto g = overflow();
  for (auto kind : {LayerKind::Rgcn, LayerKind::Rgat}) {
    const auto m = model_for(g, kind);
    const auto raw = occlusion_raw(m, g);
    const double base = neural::model_forward(m, g).probability;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      CodeTransformationGraph h = g;
      h.edges.erase(h.edges.begin() + static_cast<std::ptrdiff_t>(i));
      const double drop = std::max(0.0, base - neural::model_forward(m, h).probability);
      const auto& e = g.edges[i];
      EXPECT_EQ(raw.at({e.src, e.dst, e.relation}), drop);
    }
    const auto norm = occlusion_edge_importance(m, g);
    double mx = 0;
    for (const auto& [k, v] : norm) mx = std::max(mx, v);
    EXPECT_TRUE(mx == 1.0 || mx == 0.0);
  }
}

TEST(EdgeImportance, NormaliseHandlesAllZero) {
  EdgeImportance im{{{0, 1, Relation::tree()}, 0.0}};
  normalize(im);
  EXPECT_EQ(im.begin()->second, 0.0);
}

TEST(NodeImportance, IncidenceSumsThenMaxOverRelations) {
  const auto g = bare_graph(4, {});
  EdgeImportance im;
  im[{0, 1, Relation::tree()}] = 0.4;
  im[{1, 2, Relation::tree()}] = 0.3;
  auto s = node_importance(im, g);
  EXPECT_DOUBLE_EQ(s[1], 0.7);
  EXPECT_EQ(s[3], 0.0);
  im[{1, 3, Relation::data()}] = 0.5;
  im[{2, 1, Relation::control()}] = 0.4;
  s = node_importance(im, g);
  EXPECT_DOUBLE_EQ(s[1], 0.9);
  EXPECT_DOUBLE_EQ(s[2], 0.4);
}

TEST(Suspiciousness, NestedStatementsAccumulate) {
  const auto g = ctg_of("void f(int a) {\n    if (a) {\n        x = 1;\n    }\n}\n",
                        "void f(int a) {\n    if (a) {\n        x = 2;\n    }\n}\n");
  std::vector<double> scores(g.size(), 0.0);
  NodeId param = kNoNode, ifs = kNoNode, assign = kNoNode, pred = kNoNode, lit = kNoNode;
  for (const auto& n : g.nodes) {
    if (n.kind == NodeKind::Param) param = n.id;
    if (n.kind == NodeKind::IfStmt) ifs = n.id;
    if (n.kind == NodeKind::AssignStmt) assign = n.id;
    if (n.is_predicate) pred = n.id;
    if (n.kind == NodeKind::Literal && n.alpha == Alpha::Added) lit = n.id;
  }
  ASSERT_TRUE(param != kNoNode && ifs != kNoNode && assign != kNoNode && pred != kNoNode && lit != kNoNode);
  scores[static_cast<std::size_t>(ifs)] = 0.125;
  scores[static_cast<std::size_t>(pred)] = 0.5;
  scores[static_cast<std::size_t>(lit)] = 0.25;
  const auto r = statement_suspiciousness(scores, g);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].node_id, ifs);
  EXPECT_EQ(r[0].score, 0.875);
  EXPECT_EQ(r[1].node_id, assign);
  EXPECT_EQ(r[1].score, 0.25);
  EXPECT_EQ(r[1].line_new, 3);
  EXPECT_EQ(r[2].node_id, param);
  EXPECT_EQ(r[2].score, 0.0);
}

TEST(Suspiciousness, ZeroScoresTieByNodeId) {
  const auto g = overflow();
  const auto r = statement_suspiciousness(std::vector<double>(g.size(), 0.0), g);
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_LT(r[i - 1].node_id, r[i].node_id);
}

TEST(Suspiciousness, RescalingKeepsOrder) {
  const auto g = overflow();
  const auto m = model_for(g, LayerKind::Rgat);
  const auto im = attention_edge_importance(m, g);
  const auto base = statement_suspiciousness(node_importance(im, g), g);
  for (double c : {0.5, 4.0, 3.0}) {
    EdgeImportance scaled = im;
    for (auto& [k, v] : scaled) v *= c;
    const auto r = statement_suspiciousness(node_importance(scaled, g), g);
    ASSERT_EQ(r.size(), base.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      EXPECT_NEAR(r[i].score, c * base[i].score, 1e-12);
      if (c != 3.0) {
        EXPECT_EQ(r[i].node_id, base[i].node_id);
      }
    }
  }
}

TEST(Suspiciousness, MonotoneInDescendantScores) {
  const auto g = overflow();
  neural::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> scores(g.size());
    for (auto& s : scores) s = rng.uniform();
    auto score_map = [&](const std::vector<double>& sc) {
      std::map<NodeId, double> out;
      for (const auto& r : statement_suspiciousness(sc, g)) out[r.node_id] = r.score;
      return out;
    };
    const auto before = score_map(scores);
    scores[rng.below(scores.size())] += rng.uniform();
    const auto after = score_map(scores);
    for (const auto& [id, s] : before) EXPECT_GE(after.at(id), s);
  }
}

TEST(Ranking, SortedAndSerialised) {
  const auto g = overflow();
  const auto m = model_for(g, LayerKind::Rgat);
  for (auto method : {ExplainMethod::Attention, ExplainMethod::Occlusion}) {
    ExplainerConfig cfg;
    cfg.method = method;
    const auto r = explain(m, g, cfg);
    for (std::size_t i = 1; i < r.size(); ++i) {
      EXPECT_GE(r[i - 1].score, r[i].score);
      if (r[i - 1].score == r[i].score) {
        EXPECT_LT(r[i - 1].node_id, r[i].node_id);
      }
    }
    const auto j = ranking_to_json(r);
    ASSERT_EQ(j.size(), r.size());
    EXPECT_TRUE(j[0].contains("node_id") && j[0].contains("line_old") && j[0].contains("line_new") &&
                j[0].contains("alpha") && j[0].contains("score"));
    const auto text = ranking_report(r, 2, [](const RankedStatement& s) { return "line " + std::to_string(s.line_new); });
    EXPECT_NE(text.find("line"), std::string::npos);
  }
  EXPECT_TRUE(explain(m, CodeTransformationGraph{}, {}).empty());
}

TEST(Explainer, ConfigJson) {
  const auto c = explainer_config_from_json({{"method", "occlusion"}, {"attention_layers", "mean"}, {"top_k", 3}});
  EXPECT_EQ(c.method, ExplainMethod::Occlusion);
  EXPECT_EQ(c.layers, AttentionLayers::Mean);
  EXPECT_EQ(explainer_config_to_json(c)["top_k"], 3);
  EXPECT_THROW(explainer_config_from_json({{"nope", 1}}), ConfigError);
}
