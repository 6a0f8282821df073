#include <algorithm>
#include <deque>

#include "jitvd/corpus.hpp"
#include "jitvd/errors.hpp"

namespace jitvd {

std::string blame(const CommitCorpus& corpus, const std::string& path, int line, const std::string& at) {
  const auto content = corpus.file_at(at, path);
  if (!content) throw LineOutOfRange(path + " does not exist at " + at);
  const int n = static_cast<int>(split_lines(*content).size());
  if (line < 1 || line > n)
    throw LineOutOfRange(path + ":" + std::to_string(line) + " is outside 1.." + std::to_string(n) + " at " + at);

  const CommitRecord* c = &corpus.at(at);
  int l = line;
  while (true) {
    auto f = c->files.find(path);
    if (f != c->files.end()) {
      if (!f->second.before) return c->id;
      const LineDiff d = diff_lines(*f->second.before, f->second.after.value_or(""));
      const int prev = d.new_to_old[static_cast<std::size_t>(l)];
      if (prev == 0) return c->id;
      l = prev;
    }
    if (!c->parent) return c->id;
    c = &corpus.at(*c->parent);
  }
}

namespace {

bool is_site(const AstNode& n) { return n.is_statement || n.is_predicate; }

}  // namespace

VccResult mine_vccs(const CommitCorpus& corpus, const CommitRecord& fixing, const MiningConfig& cfg) {
  VccResult r;
  r.vulnerability = fixing.fixes.value_or("");
  r.fixing = fixing.id;
  if (!fixing.parent) {
    r.warnings.push_back(fixing.id + ": fixing commit has no parent, nothing to blame");
    return r;
  }
  const std::string& parent = *fixing.parent;
  auto add = [&](const std::string& path, int old_line, const char* rule) {
    r.blamed.push_back({blame(corpus, path, old_line, parent), path, old_line, rule});
  };

  for (const auto& [path, f] : fixing.files) {
    if (!f.before) continue;
    const LineDiff d = diff_lines(*f.before, f.after.value_or(""));
    for (int l : d.deleted()) add(path, l, "deleted");
    if (!f.after) continue;

    RelationalCodeGraph g;
    try {
      g = build_rcg(parse_source(*f.after, path), cfg.defuse);
    } catch (const InputError& e) {
      r.warnings.push_back(fixing.id + ": " + path + ": " + e.what() + " (dependency blame skipped)");
      continue;
    }
    std::vector<std::vector<NodeId>> adj(g.size());
    for (const auto& e : g.edges) {
      if (e.relation.cls != RelationClass::Dependency) continue;
      adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
      adj[static_cast<std::size_t>(e.dst)].push_back(e.src);
    }
    const auto added = d.added();
    std::vector<int> dist(g.size(), -1);
    std::deque<NodeId> queue;
    for (const auto& n : g.nodes)
      if (is_site(n) && std::binary_search(added.begin(), added.end(), n.line)) {
        dist[static_cast<std::size_t>(n.id)] = 0;
        queue.push_back(n.id);
      }
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop_front();
      const int dv = dist[static_cast<std::size_t>(v)];
      if (dv > 0) {
        const int old_line = d.new_to_old[static_cast<std::size_t>(g[v].line)];
        if (old_line != 0) add(path, old_line, "dependency");
      }
      if (dv >= cfg.hops) continue;
      for (NodeId w : adj[static_cast<std::size_t>(v)])
        if (dist[static_cast<std::size_t>(w)] < 0) {
          dist[static_cast<std::size_t>(w)] = dv + 1;
          queue.push_back(w);
        }
    }
  }
  std::sort(r.blamed.begin(), r.blamed.end());
  r.blamed.erase(std::unique(r.blamed.begin(), r.blamed.end()), r.blamed.end());
  for (const auto& b : r.blamed) r.vccs.insert(b.commit);
  return r;
}

std::string_view commit_label_name(CommitLabel l) {
  switch (l) {
    case CommitLabel::Dangerous: return "dangerous";
    case CommitLabel::Safe: return "safe";
    case CommitLabel::Unlabeled: return "unlabeled";
  }
  return "?";
}

CommitLabel commit_label_from_name(std::string_view s) {
  if (s == "dangerous") return CommitLabel::Dangerous;
  if (s == "safe") return CommitLabel::Safe;
  if (s == "unlabeled") return CommitLabel::Unlabeled;
  throw InputError("LabelError", "unknown label '" + std::string(s) + "'");
}

Labeling label_dataset(const CommitCorpus& corpus, const MiningConfig& cfg) {
  Labeling out;
  std::map<std::string, std::vector<BlamedLine>> evidence;  // (vulnerability + commit) keyed below
  std::set<std::string> in_some_vcc;
  for (const auto& c : corpus.commits()) {
    if (!c.fixes) continue;
    VccResult r = mine_vccs(corpus, c, cfg);
    out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
    auto& set = out.vccs[*c.fixes];
    set.insert(r.vccs.begin(), r.vccs.end());
    in_some_vcc.insert(r.vccs.begin(), r.vccs.end());
    for (const auto& b : r.blamed) evidence[*c.fixes + '\n' + b.commit].push_back(b);
  }

  std::map<std::string, std::vector<std::string>> triggered;  // commit -> vulnerabilities
  for (const auto& [vuln, vccs] : out.vccs) {
    const CommitRecord* latest = nullptr;
    for (const auto& id : vccs) {
      const CommitRecord& c = corpus.at(id);
      if (!latest || c.timestamp > latest->timestamp || (c.timestamp == latest->timestamp && c.id > latest->id))
        latest = &c;
    }
    if (latest) triggered[latest->id].push_back(vuln);
  }

  for (const auto& c : corpus.commits()) {
    LabeledCommit l;
    l.id = c.id;
    l.project = c.project;
    l.timestamp = c.timestamp;
    if (auto it = triggered.find(c.id); it != triggered.end()) {
      l.label = CommitLabel::Dangerous;
      l.vulnerabilities = it->second;
      for (const auto& v : l.vulnerabilities) {
        const auto& ev = evidence[v + '\n' + c.id];
        l.evidence.insert(l.evidence.end(), ev.begin(), ev.end());
      }
    } else if (c.fixes && !in_some_vcc.count(c.id)) {
      l.label = CommitLabel::Safe;
      l.fixes = c.fixes;
    }
    out.commits.push_back(std::move(l));
  }
  return out;
}

nlohmann::json labeling_to_json(const Labeling& l) {
  nlohmann::json commits = nlohmann::json::array();
  for (const auto& c : l.commits) {
    nlohmann::json j = {{"id", c.id}, {"project", c.project}, {"timestamp", c.timestamp},
                        {"label", commit_label_name(c.label)}};
    if (!c.vulnerabilities.empty()) j["vulnerabilities"] = c.vulnerabilities;
    if (!c.evidence.empty()) {
      nlohmann::json ev = nlohmann::json::array();
      for (const auto& b : c.evidence) ev.push_back({{"path", b.path}, {"line", b.line}, {"rule", b.rule}});
      j["evidence"] = std::move(ev);
    }
    if (c.fixes) j["fixes"] = *c.fixes;
    commits.push_back(std::move(j));
  }
  nlohmann::json vccs = nlohmann::json::object();
  for (const auto& [v, set] : l.vccs) vccs[v] = std::vector<std::string>(set.begin(), set.end());
  return {{"commits", std::move(commits)}, {"vccs", std::move(vccs)}, {"warnings", l.warnings}};
}

Labeling labeling_from_json(const nlohmann::json& j) {
  Labeling l;
  try {
    for (const auto& c : j.at("commits")) {
      LabeledCommit lc;
      lc.id = c.at("id").get<std::string>();
      lc.project = c.value("project", std::string("default"));
      lc.timestamp = c.value("timestamp", std::int64_t{0});
      lc.label = commit_label_from_name(c.at("label").get<std::string>());
      if (c.contains("vulnerabilities")) lc.vulnerabilities = c.at("vulnerabilities").get<std::vector<std::string>>();
      if (c.contains("evidence"))
        for (const auto& b : c.at("evidence"))
          lc.evidence.push_back({lc.id, b.at("path").get<std::string>(), b.at("line").get<int>(),
                                 b.value("rule", std::string())});
      if (c.contains("fixes") && !c.at("fixes").is_null()) lc.fixes = c.at("fixes").get<std::string>();
      l.commits.push_back(std::move(lc));
    }
    if (j.contains("vccs"))
      for (const auto& [v, ids] : j.at("vccs").items()) {
        const auto list = ids.get<std::vector<std::string>>();
        l.vccs[v] = std::set<std::string>(list.begin(), list.end());
      }
    if (j.contains("warnings")) l.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError("LabelError", std::string("malformed labels file: ") + e.what());
  }
  return l;
}

}  // namespace jitvd
