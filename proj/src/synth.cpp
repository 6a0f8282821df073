#include "jitvd/synth.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>

#include "jitvd/errors.hpp"
#include "jitvd/neural/random.hpp"

namespace jitvd {

namespace {

using neural::Rng;

enum class FnKind { Copy, Read, Guard, Calc };

enum class Cond { Plain, Swapped, WidenedMul, WidenedLe };

struct Function {
  FnKind kind = FnKind::Calc;
  std::string name;
  std::array<std::string, 6> v;  // kind-specific identifiers
  // copy
  Cond cond = Cond::Plain;
  bool temp = false;
  bool neg_guard = false;
  bool log = false;
  // read
  bool size_guard = false;
  bool has_free = true;
  // guard
  bool null_guard = true;
  bool bound_guard = true;
  // calc
  bool fused = false;
};

struct Rendered {
  std::vector<std::string> lines;
  std::map<std::string, int> anchor;  // name -> 0-based line within the function
};

void guard_lines(Rendered& r, const std::string& anchor, const std::string& cond) {
  r.anchor[anchor] = static_cast<int>(r.lines.size());
  r.lines.push_back("    if (" + cond + ") {");
  r.lines.push_back("        return 0;");
  r.lines.push_back("    }");
}

Rendered render(const Function& f) {
  Rendered r;
  const auto& v = f.v;
  switch (f.kind) {
    case FnKind::Copy: {
      // v: src, len, buf, bound, tmp, logger
      r.lines.push_back("int " + f.name + "(char* " + v[0] + ", int " + v[1] + ") {");
      r.lines.push_back("    char " + v[2] + "[" + v[3] + "];");
      if (f.log) r.lines.push_back("    " + v[5] + "(" + v[1] + ");");
      if (f.neg_guard) guard_lines(r, "neg_guard", v[1] + " < 0");
      if (f.temp) r.lines.push_back("    int " + v[4] + " = " + v[1] + ";");
      std::string cond;
      switch (f.cond) {
        case Cond::Plain: cond = v[1] + " < " + v[3]; break;
        case Cond::Swapped: cond = v[3] + " > " + v[1]; break;
        case Cond::WidenedMul: cond = v[1] + " < 2 * " + v[3]; break;
        case Cond::WidenedLe: cond = v[1] + " <= " + v[3]; break;
      }
      r.anchor["cond"] = static_cast<int>(r.lines.size());
      r.lines.push_back("    if (" + cond + ") {");
      r.lines.push_back("        memcpy(" + v[2] + ", " + v[0] + ", " + (f.temp ? v[4] : v[1]) + ");");
      r.lines.push_back("    }");
      r.lines.push_back("    return " + v[1] + ";");
      break;
    }
    case FnKind::Read: {
      // v: ctx, size, data, got, consumer
      r.lines.push_back("int " + f.name + "(char* " + v[0] + ", int " + v[1] + ") {");
      if (f.size_guard) guard_lines(r, "size_guard", v[1] + " <= 0");
      r.lines.push_back("    char* " + v[2] + " = malloc(" + v[1] + ");");
      r.lines.push_back("    int " + v[3] + " = avio_read(" + v[0] + ", " + v[2] + ", " + v[1] + ");");
      r.lines.push_back("    " + v[4] + "(" + v[2] + ", " + v[3] + ");");
      if (f.has_free) {
        r.anchor["free"] = static_cast<int>(r.lines.size());
        r.lines.push_back("    free(" + v[2] + ");");
      }
      r.lines.push_back("    return " + v[3] + ";");
      break;
    }
    case FnKind::Guard: {
      // v: ptr, idx, limit, value
      r.lines.push_back("int " + f.name + "(char* " + v[0] + ", int " + v[1] + ") {");
      if (f.null_guard) guard_lines(r, "null_guard", v[0] + " == 0");
      if (f.bound_guard) guard_lines(r, "bound_guard", v[1] + " >= " + v[2]);
      r.lines.push_back("    " + v[0] + "[" + v[1] + "] = " + v[3] + ";");
      r.lines.push_back("    return 1;");
      break;
    }
    case FnKind::Calc: {
      // v: a, b, t, k
      r.lines.push_back("int " + f.name + "(int " + v[0] + ", int " + v[1] + ") {");
      if (f.fused) {
        r.lines.push_back("    int " + v[2] + " = (" + v[0] + " + " + v[1] + ") * " + v[3] + ";");
      } else {
        r.lines.push_back("    int " + v[2] + " = " + v[0] + " + " + v[1] + ";");
        r.lines.push_back("    " + v[2] + " = " + v[2] + " * " + v[3] + ";");
      }
      r.lines.push_back("    return " + v[2] + ";");
      break;
    }
  }
  r.lines.push_back("}");
  return r;
}

struct Program {
  std::vector<Function> fns;

  /// Text plus the 1-based file line of anchor `name` in function `fn`.
  std::string text(int fn = -1, const std::string& name = {}, int* line = nullptr) const {
    std::string out;
    int offset = 0;
    for (std::size_t i = 0; i < fns.size(); ++i) {
      if (i) {
        out += '\n';
        ++offset;
      }
      const Rendered r = render(fns[i]);
      if (static_cast<int>(i) == fn && line) *line = offset + r.anchor.at(name) + 1;
      for (const auto& l : r.lines) out += l + '\n';
      offset += static_cast<int>(r.lines.size());
    }
    return out;
  }
};

template <std::size_t N>
const char* pick(Rng& rng, const std::array<const char*, N>& pool) {
  return pool[static_cast<std::size_t>(rng.below(N))];
}

Function make_function(FnKind kind, Rng& rng, int serial) {
  static constexpr std::array<const char*, 8> kBuf = {"buf", "dst", "out", "blk", "frame", "hdr", "line", "pkt"};
  static constexpr std::array<const char*, 6> kLen = {"len", "n", "size_in", "count", "nbytes", "want"};
  static constexpr std::array<const char*, 6> kSrc = {"src", "str", "in", "payload", "msg", "raw"};
  static constexpr std::array<const char*, 4> kBound = {"BUF_SIZE", "MAX_LEN", "HDR_LEN", "LINE_MAX"};
  static constexpr std::array<const char*, 4> kLog = {"log_event", "trace", "note_len", "stat_add"};
  static constexpr std::array<const char*, 5> kCtx = {"ctx", "pb", "io", "stream", "dev"};
  static constexpr std::array<const char*, 5> kData = {"data", "chunk", "block", "mem", "tmpbuf"};
  static constexpr std::array<const char*, 4> kGot = {"got", "ret", "r", "nread"};
  static constexpr std::array<const char*, 4> kUse = {"process", "decode", "parse_chunk", "emit"};
  static constexpr std::array<const char*, 5> kPtr = {"p", "arr", "table", "slots", "row"};
  static constexpr std::array<const char*, 4> kIdx = {"idx", "i", "pos", "slot"};
  static constexpr std::array<const char*, 4> kLimit = {"LIMIT", "NSLOTS", "ROW_LEN", "TABLE_SIZE"};
  static constexpr std::array<const char*, 4> kVal = {"1", "0", "val", "flag"};
  static constexpr std::array<const char*, 4> kA = {"a", "x", "lhs", "base"};
  static constexpr std::array<const char*, 4> kB = {"b", "y", "rhs", "step"};
  static constexpr std::array<const char*, 4> kT = {"t", "acc", "sum", "res"};
  static constexpr std::array<const char*, 4> kK = {"2", "3", "scale", "K"};

  Function f;
  f.kind = kind;
  const std::string id = std::to_string(serial);
  switch (kind) {
    case FnKind::Copy:
      f.name = std::string("copy_") + pick(rng, kBuf) + id;
      f.v = {pick(rng, kSrc), pick(rng, kLen), pick(rng, kBuf), pick(rng, kBound), "tmp", pick(rng, kLog)};
      f.cond = rng.uniform() < 0.5 ? Cond::Plain : Cond::Swapped;
      f.temp = rng.uniform() < 0.3;
      f.neg_guard = rng.uniform() < 0.3;
      f.log = rng.uniform() < 0.5;
      break;
    case FnKind::Read:
      f.name = std::string("read_") + pick(rng, kData) + id;
      f.v = {pick(rng, kCtx), "size", pick(rng, kData), pick(rng, kGot), pick(rng, kUse), ""};
      f.size_guard = rng.uniform() < 0.3;
      break;
    case FnKind::Guard:
      f.name = std::string("store_") + pick(rng, kPtr) + id;
      f.v = {pick(rng, kPtr), pick(rng, kIdx), pick(rng, kLimit), pick(rng, kVal), "", ""};
      f.null_guard = rng.uniform() < 0.8;
      f.bound_guard = rng.uniform() < 0.8;
      break;
    case FnKind::Calc:
      f.name = std::string("calc_") + pick(rng, kT) + id;
      f.v = {pick(rng, kA), pick(rng, kB), pick(rng, kT), pick(rng, kK), "", ""};
      f.fused = rng.uniform() < 0.5;
      break;
  }
  return f;
}

struct Edit {
  std::size_t fn;
  std::string name;
  std::string anchor;  // anchor of the planted line
  bool anchor_old;     // anchor refers to the version before the edit
  std::function<void(Function&)> apply;
};

std::vector<Edit> dangerous_edits(const Program& p) {
  std::vector<Edit> out;
  for (std::size_t i = 0; i < p.fns.size(); ++i) {
    const Function& f = p.fns[i];
    if (f.kind == FnKind::Copy && (f.cond == Cond::Plain || f.cond == Cond::Swapped)) {
      out.push_back({i, "widen-bound", "cond", false, [](Function& g) { g.cond = Cond::WidenedMul; }});
      out.push_back({i, "widen-bound", "cond", false, [](Function& g) { g.cond = Cond::WidenedLe; }});
    }
    if (f.kind == FnKind::Read && f.has_free)
      out.push_back({i, "remove-free", "free", true, [](Function& g) { g.has_free = false; }});
    if (f.kind == FnKind::Guard && f.null_guard)
      out.push_back({i, "delete-guard", "null_guard", true, [](Function& g) { g.null_guard = false; }});
    if (f.kind == FnKind::Guard && f.bound_guard)
      out.push_back({i, "delete-guard", "bound_guard", true, [](Function& g) { g.bound_guard = false; }});
    if (f.kind == FnKind::Copy && f.neg_guard)
      out.push_back({i, "delete-guard", "neg_guard", true, [](Function& g) { g.neg_guard = false; }});
    if (f.kind == FnKind::Read && f.size_guard)
      out.push_back({i, "delete-guard", "size_guard", true, [](Function& g) { g.size_guard = false; }});
  }
  return out;
}

std::vector<Edit> safe_edits(const Program& p) {
  std::vector<Edit> out;
  for (std::size_t i = 0; i < p.fns.size(); ++i) {
    const Function& f = p.fns[i];
    switch (f.kind) {
      case FnKind::Copy:
        out.push_back({i, "refactor-temp", "cond", false, [](Function& g) { g.temp = !g.temp; }});
        if (f.cond == Cond::Plain)
          out.push_back({i, "swap-operands", "cond", false, [](Function& g) { g.cond = Cond::Swapped; }});
        if (f.cond == Cond::Swapped)
          out.push_back({i, "swap-operands", "cond", false, [](Function& g) { g.cond = Cond::Plain; }});
        if (!f.neg_guard)
          out.push_back({i, "add-guard", "neg_guard", false, [](Function& g) { g.neg_guard = true; }});
        break;
      case FnKind::Read:
        if (!f.size_guard)
          out.push_back({i, "add-guard", "size_guard", false, [](Function& g) { g.size_guard = true; }});
        break;
      case FnKind::Guard:
        if (!f.null_guard)
          out.push_back({i, "add-guard", "null_guard", false, [](Function& g) { g.null_guard = true; }});
        if (!f.bound_guard)
          out.push_back({i, "add-guard", "bound_guard", false, [](Function& g) { g.bound_guard = true; }});
        break;
      case FnKind::Calc:
        out.push_back({i, "fuse-expression", "", false, [](Function& g) { g.fused = !g.fused; }});
        break;
    }
  }
  return out;
}

}  // namespace

SynthCorpus generate_synthetic(const SynthConfig& cfg) {
  if (cfg.projects < 1 || cfg.commits_per_project < 1) throw ConfigError("synthetic corpus needs projects and commits");
  Rng rng(cfg.seed);
  std::vector<CommitRecord> commits;
  SynthCorpus out;
  int serial = 0;
  for (int p = 0; p < cfg.projects; ++p) {
    char pname[16];
    std::snprintf(pname, sizeof pname, "proj%02d", p);
    const std::string project = pname;
    const std::string path = "src/" + project + ".c";

    Program prog;
    for (FnKind k : {FnKind::Copy, FnKind::Copy, FnKind::Read, FnKind::Read, FnKind::Guard, FnKind::Guard,
                     FnKind::Calc, FnKind::Calc})
      prog.fns.push_back(make_function(k, rng, serial++));
    rng.shuffle(std::span<Function>(prog.fns));

    const std::int64_t base = 1'600'000'000 + static_cast<std::int64_t>(p) * 100'000;
    CommitRecord init;
    init.id = project + "-c00";
    init.timestamp = base;
    init.project = project;
    init.message = "import";
    init.files[path] = {std::nullopt, prog.text()};
    commits.push_back(init);
    out.labels.commits.push_back({init.id, project, init.timestamp, CommitLabel::Unlabeled, {}, {}, {}});

    std::string parent = init.id;
    for (int k = 1; k <= cfg.commits_per_project; ++k) {
      bool dangerous = rng.uniform() < cfg.dangerous_ratio;
      auto edits = dangerous ? dangerous_edits(prog) : safe_edits(prog);
      if (edits.empty()) {
        dangerous = !dangerous;
        edits = dangerous ? dangerous_edits(prog) : safe_edits(prog);
      }
      const Edit& e = edits[static_cast<std::size_t>(rng.below(edits.size()))];

      const int fn = static_cast<int>(e.fn);
      int line = 0;
      const std::string before = e.anchor_old ? prog.text(fn, e.anchor, &line) : prog.text();
      e.apply(prog.fns[e.fn]);
      const std::string after = (!e.anchor_old && !e.anchor.empty()) ? prog.text(fn, e.anchor, &line) : prog.text();
      if (e.anchor.empty()) {
        const auto d = diff_lines(before, after);
        const auto added = d.added();
        line = added.empty() ? 0 : added.front();
      }

      char cid[32];
      std::snprintf(cid, sizeof cid, "%s-c%02d", project.c_str(), k);
      CommitRecord c;
      c.id = cid;
      c.parent = parent;
      c.timestamp = base + k * 100;
      c.project = project;
      c.message = e.name;
      c.files[path] = {before, after};
      commits.push_back(c);
      parent = c.id;

      LabeledCommit lc{c.id, project, c.timestamp, dangerous ? CommitLabel::Dangerous : CommitLabel::Safe, {}, {}, {}};
      if (dangerous) lc.evidence.push_back({c.id, path, line, e.name});
      out.labels.commits.push_back(std::move(lc));
      out.sites.push_back({c.id, path, line, e.anchor_old, e.name});
    }
  }
  out.corpus = CommitCorpus(std::move(commits));
  return out;
}

nlohmann::json sites_to_json(const std::vector<PlantedSite>& sites) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : sites)
    out.push_back({{"commit", s.commit},
                   {"path", s.path},
                   {"line", s.line},
                   {"version", s.old_version ? "old" : "new"},
                   {"edit", s.edit}});
  return out;
}

std::vector<PlantedSite> sites_from_json(const nlohmann::json& j) {
  std::vector<PlantedSite> out;
  for (const auto& s : j)
    out.push_back({s.at("commit").get<std::string>(), s.at("path").get<std::string>(), s.at("line").get<int>(),
                   s.at("version").get<std::string>() == "old", s.at("edit").get<std::string>()});
  return out;
}

void write_synthetic(const SynthCorpus& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&dir](const char* name, const nlohmann::json& j) {
    std::ofstream f(dir / name);
    if (!f) throw InputError("IoError", "cannot write " + (dir / name).string());
    f << j.dump(1) << '\n';
  };
  write("manifest.json", corpus_to_json(s.corpus));
  write("labels.json", labeling_to_json(s.labels));
  write("planted.json", sites_to_json(s.sites));
}

}  // namespace jitvd
