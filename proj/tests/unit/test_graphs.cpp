#include <gtest/gtest.h>

#include <algorithm>

#include "jitvd/graphs.hpp"
#include "minic_gen.hpp"
#include "oracles.hpp"
#include "test_paths.hpp"

using namespace jitvd;

namespace {

/// Site id of the first statement/predicate starting on `line`.
NodeId site_on_line(const Ast& a, int line, bool predicate = false) {
  for (const auto& n : a.nodes)
    if (n.line == line && (predicate ? n.is_predicate : n.is_statement)) return n.id;
  return kNoNode;
}

bool has_edge(const RelationalCodeGraph& g, NodeId s, NodeId d, Relation r) {
  return std::find(g.edges.begin(), g.edges.end(), Edge{s, d, r}) != g.edges.end();
}

NodeId first_function(const Ast& a) { return a.root().children.front(); }

}  // namespace

TEST(DefUse, DeclarationDefinesWithoutInitializer) {
  const Ast a = parse_source("void f() { char buf[10]; }");
  const auto du = def_use(a.nodes, site_on_line(a, 1));
  ASSERT_EQ(du.defs.size(), 1u);
  EXPECT_EQ(du.defs[0].var, "buf");
  EXPECT_TRUE(du.defs[0].strong);
}

TEST(DefUse, IndexWriteIsWeakAndUsesBase) {
  const Ast a = parse_source("void f() { buf[i] = x; }");
  const auto du = def_use(a.nodes, site_on_line(a, 1));
  ASSERT_EQ(du.defs.size(), 1u);
  EXPECT_FALSE(du.defs[0].strong);
  EXPECT_EQ(du.uses, (std::set<std::string>{"buf", "i", "x"}));
}

TEST(DefUse, OutputParameterAndAddressOf) {
  const Ast a = parse_source("void f() {\n memcpy(dst, src, n);\n init(&st);\n avio_read(pb, data, size);\n}");
  const auto m = def_use(a.nodes, site_on_line(a, 2));
  ASSERT_EQ(m.defs.size(), 1u);
  EXPECT_EQ(m.defs[0].var, "dst");
  EXPECT_FALSE(m.defs[0].strong);
  EXPECT_TRUE(m.uses.count("dst") && m.uses.count("src") && m.uses.count("n"));
  const auto i = def_use(a.nodes, site_on_line(a, 3));
  ASSERT_EQ(i.defs.size(), 1u);
  EXPECT_EQ(i.defs[0].var, "st");
  const auto r = def_use(a.nodes, site_on_line(a, 4));
  ASSERT_EQ(r.defs.size(), 1u);
  EXPECT_EQ(r.defs[0].var, "data");
}

TEST(DefUse, MemberChainIsOneVariable) {
  const Ast a = parse_source("void f() { st->codec->extradata = p; }");
  const auto du = def_use(a.nodes, site_on_line(a, 1));
  ASSERT_EQ(du.defs.size(), 1u);
  EXPECT_EQ(du.defs[0].var, "st->codec->extradata");
  EXPECT_TRUE(du.defs[0].strong);
}

TEST(Rcg, OverflowExampleDependencies) {
  const Ast a = parse_source(read_fixture("overflow_old.c"));
  const auto g = build_rcg(a);
  const NodeId str = site_on_line(a, 1), buf = site_on_line(a, 2), len = site_on_line(a, 3);
  const NodeId pred = site_on_line(a, 4, true), copy = site_on_line(a, 5);
  EXPECT_TRUE(has_edge(g, str, len, Relation::data()));
  EXPECT_TRUE(has_edge(g, len, pred, Relation::data()));
  EXPECT_TRUE(has_edge(g, len, copy, Relation::data()));
  EXPECT_TRUE(has_edge(g, buf, copy, Relation::data()));
  EXPECT_TRUE(has_edge(g, str, copy, Relation::data()));
  EXPECT_TRUE(has_edge(g, pred, copy, Relation::control()));
  EXPECT_FALSE(has_edge(g, copy, len, Relation::data()));
}

TEST(Rcg, StructureEdgesFormTheTree) {
  const Ast a = parse_source(read_fixture("overflow_new.c"));
  const auto g = build_rcg(a);
  std::size_t tree = 0;
  for (const auto& e : g.edges)
    if (e.relation == Relation::tree()) {
      ++tree;
      EXPECT_EQ(a[e.dst].parent, e.src);
    }
  EXPECT_EQ(tree, a.size() - 1);
  // dependency endpoints are sites
  for (const auto& e : g.edges)
    if (e.relation.cls == RelationClass::Dependency) {
      EXPECT_TRUE(a[e.src].is_statement || a[e.src].is_predicate);
      EXPECT_TRUE(a[e.dst].is_statement || a[e.dst].is_predicate);
    }
}

TEST(Rcg, StrongDefinitionKills) {
  const Ast a = parse_source("int f() {\n int x = 1;\n x = 2;\n return x;\n}");
  const auto rd = reaching_definitions(a, first_function(a));
  EXPECT_EQ(rd.at({site_on_line(a, 4), "x"}), (std::set<NodeId>{site_on_line(a, 3)}));
}

TEST(Rcg, WeakDefinitionDoesNotKill) {
  const Ast a = parse_source("int f() {\n int x = 1;\n init(&x);\n return x;\n}");
  const auto rd = reaching_definitions(a, first_function(a));
  EXPECT_EQ(rd.at({site_on_line(a, 4), "x"}), (std::set<NodeId>{site_on_line(a, 2), site_on_line(a, 3)}));
}

TEST(Rcg, LoopFixtureHandDerived) {
  const Ast a = parse_source(
      "int f(int n) {\n"
      "    int i = 0;\n"
      "    int s = 0;\n"
      "    while (i < n) {\n"
      "        s = s + i;\n"
      "        i = i + 1;\n"
      "    }\n"
      "    return s;\n"
      "}\n");
  const auto rd = reaching_definitions(a, first_function(a));
  const NodeId n = site_on_line(a, 1), i0 = site_on_line(a, 2), s0 = site_on_line(a, 3);
  const NodeId pred = site_on_line(a, 4, true), s1 = site_on_line(a, 5), i1 = site_on_line(a, 6);
  const NodeId ret = site_on_line(a, 8);
  EXPECT_EQ(rd.at({pred, "i"}), (std::set<NodeId>{i0, i1}));
  EXPECT_EQ(rd.at({pred, "n"}), (std::set<NodeId>{n}));
  EXPECT_EQ(rd.at({s1, "s"}), (std::set<NodeId>{s0, s1}));
  EXPECT_EQ(rd.at({s1, "i"}), (std::set<NodeId>{i0, i1}));
  EXPECT_EQ(rd.at({i1, "i"}), (std::set<NodeId>{i0, i1}));
  EXPECT_EQ(rd.at({ret, "s"}), (std::set<NodeId>{s0, s1}));
}

TEST(Rcg, ReturnEndsPaths) {
  const Ast a = parse_source("int f(int c) {\n int x = 1;\n if (c) {\n x = 2;\n return x;\n }\n return x;\n}");
  const auto rd = reaching_definitions(a, first_function(a));
  EXPECT_EQ(rd.at({site_on_line(a, 7), "x"}), (std::set<NodeId>{site_on_line(a, 2)}));
}

TEST(Rcg, ReachingDefinitionsMatchPathsOnRandomFunctions) {
  for (std::uint64_t seed = 1000; seed < 1060; ++seed) {
    jitvd::testing::MiniCGen gen(seed, {});
    const Ast a = parse_source(jitvd::testing::render(gen.program()));
    const NodeId f = first_function(a);
    EXPECT_EQ(reaching_definitions(a, f), jitvd::testing::reaching_by_paths(a, f)) << "seed " << seed;
  }
}

TEST(Rcg, ReachingDefinitionsMatchUnrolledLoops) {
  jitvd::testing::GenOptions opt;
  opt.loops = true;
  opt.max_statements = 7;
  for (std::uint64_t seed = 2000; seed < 2040; ++seed) {
    jitvd::testing::MiniCGen gen(seed, opt);
    const Ast a = parse_source(jitvd::testing::render(gen.program()));
    const NodeId f = first_function(a);
    EXPECT_EQ(reaching_definitions(a, f), jitvd::testing::reaching_by_paths(a, f, 3)) << "seed " << seed;
  }
}

TEST(Rcg, ControlDependenceInnermostOnly) {
  const Ast a = parse_source(
      "void f(int a, int b) {\n"
      "    if (a) {\n"
      "        x = 1;\n"
      "        while (b) {\n"
      "            y = 2;\n"
      "        }\n"
      "    } else {\n"
      "        z = 3;\n"
      "    }\n"
      "}\n");
  const auto cd = control_dependence(a, first_function(a));
  const NodeId p1 = site_on_line(a, 2, true), p2 = site_on_line(a, 4, true);
  const std::set<std::pair<NodeId, NodeId>> want = {
      {p1, site_on_line(a, 3)}, {p1, site_on_line(a, 4)}, {p2, site_on_line(a, 5)}, {p1, site_on_line(a, 8)}};
  EXPECT_EQ(cd, want);
}

TEST(Rcg, ExportsAreStable) {
  const auto g = build_rcg(parse_source(read_fixture("overflow_old.c")));
  const auto j = rcg_to_json(g);
  EXPECT_EQ(j["edges"].size(), g.edges.size());
  EXPECT_EQ(j.dump(), rcg_to_json(build_rcg(parse_source(read_fixture("overflow_old.c")))).dump());
  const auto dot = rcg_to_dot(g);
  EXPECT_NE(dot.find("dashed"), std::string::npos);
  EXPECT_NE(dot.find("dotted"), std::string::npos);
  EXPECT_EQ(dot_escape("a\"b"), "a\\\"b");
}

TEST(Rcg, GoldenJson) {
  const auto j = rcg_to_json(build_rcg(parse_source(read_fixture("overflow_old.c"))));
  EXPECT_EQ(j.dump(2) + "\n", read_fixture("overflow_old.rcg.json"));
}
