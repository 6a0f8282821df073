#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "jitvd/graphs.hpp"

namespace jitvd {

// ---- line diff ----

/// Lines of `text` without terminators; a trailing newline does not start an
/// extra line.
std::vector<std::string> split_lines(std::string_view text);

/// Exact-text LCS alignment of two file versions. Lines are 1-based; entry 0
/// is unused and 0 means "no counterpart".
struct LineDiff {
  std::vector<int> old_to_new;
  std::vector<int> new_to_old;

  int old_lines() const { return static_cast<int>(old_to_new.size()) - 1; }
  int new_lines() const { return static_cast<int>(new_to_old.size()) - 1; }
  std::vector<int> deleted() const;
  std::vector<int> added() const;
};

LineDiff diff_lines(std::string_view before, std::string_view after);

// ---- corpus ----

struct FileChange {
  std::optional<std::string> before;  // absent: file created
  std::optional<std::string> after;   // absent: file deleted
};

struct CommitRecord {
  std::string id;
  std::optional<std::string> parent;
  std::int64_t timestamp = 0;
  std::string project;
  std::string message;
  std::optional<std::string> fixes;
  std::map<std::string, FileChange> files;
};

/// Commits in manifest order; parents precede children.
class CommitCorpus {
 public:
  CommitCorpus() = default;
  /// Validates ids, parents, timestamps and file continuity. Throws
  /// CorpusFormatError naming the offending commit.
  explicit CommitCorpus(std::vector<CommitRecord> commits);

  const std::vector<CommitRecord>& commits() const { return commits_; }
  std::size_t size() const { return commits_.size(); }
  bool contains(const std::string& id) const { return index_.count(id) > 0; }
  const CommitRecord& at(const std::string& id) const;

  /// Content of `path` after `commit`, or nullopt when the file does not exist.
  std::optional<std::string> file_at(const std::string& commit, const std::string& path) const;

 private:
  std::vector<CommitRecord> commits_;
  std::map<std::string, std::size_t> index_;
};

/// Reads `<dir>/manifest.json`; file values are inline strings, null, or
/// {"blob": hash} referring to `<dir>/blobs/<hash>`.
CommitCorpus load_corpus(const std::filesystem::path& dir);
CommitCorpus corpus_from_json(const nlohmann::json& manifest, const std::filesystem::path& blob_dir = {});
nlohmann::json corpus_to_json(const CommitCorpus& c);

// ---- blame and mining ----

/// Most recent commit at or before `at` that introduced or last changed the
/// text of `line` (1-based) of `path`, following lines through LCS diffs.
/// Throws LineOutOfRange when the file is absent or too short.
std::string blame(const CommitCorpus& corpus, const std::string& path, int line, const std::string& at);

struct MiningConfig {
  int hops = 1;  // dependency radius of semantic blame
  DefUseConfig defuse;
};

struct BlamedLine {
  std::string commit;
  std::string path;
  int line = 0;  // line in the fixing commit's before-version
  std::string rule;  // "deleted" or "dependency"

  auto operator<=>(const BlamedLine&) const = default;
};

struct VccResult {
  std::string vulnerability;
  std::string fixing;
  std::vector<BlamedLine> blamed;  // sorted, unique
  std::set<std::string> vccs;
  std::vector<std::string> warnings;
};

/// Deleted lines are blamed directly. For added lines the statements on
/// them are followed over dependency edges of the after-version graph up to
/// `cfg.hops`; reached statements whose line survives unchanged are blamed at
/// their before-version line. Files that fail to parse use only the first
/// rule and add a warning.
VccResult mine_vccs(const CommitCorpus& corpus, const CommitRecord& fixing, const MiningConfig& cfg = {});

enum class CommitLabel { Unlabeled, Dangerous, Safe };
std::string_view commit_label_name(CommitLabel l);
CommitLabel commit_label_from_name(std::string_view s);

struct LabeledCommit {
  std::string id;
  std::string project;
  std::int64_t timestamp = 0;
  CommitLabel label = CommitLabel::Unlabeled;
  std::vector<std::string> vulnerabilities;  // dangerous: triggered vulnerabilities
  std::vector<BlamedLine> evidence;          // dangerous: blamed lines in this commit
  std::optional<std::string> fixes;          // safe: the fixed vulnerability
};

struct Labeling {
  std::vector<LabeledCommit> commits;  // manifest order
  std::map<std::string, std::set<std::string>> vccs;  // vulnerability -> VCC ids
  std::vector<std::string> warnings;
};

/// Per vulnerability the latest VCC is dangerous; fixing commits outside
/// every VCC set are safe; all others stay unlabeled.
Labeling label_dataset(const CommitCorpus& corpus, const MiningConfig& cfg = {});

nlohmann::json labeling_to_json(const Labeling& l);
/// Accepts both mined labels and generator-written labels.
Labeling labeling_from_json(const nlohmann::json& j);

// ---- splits ----

struct Split {
  std::vector<LabeledCommit> train;
  std::vector<LabeledCommit> test;
};

/// Labeled commits only (unlabeled are dropped). Sorted by (timestamp, id);
/// the first ceil(ratio * n) go to training.
Split split_dev_process(std::vector<LabeledCommit> labeled, double ratio = 0.8);

/// Project ids are shuffled with `seed`; the first min(ceil(ratio * P), P - 1)
/// projects train (all of them when P < 2).
Split split_cross_project(std::vector<LabeledCommit> labeled, std::uint64_t seed, double ratio = 0.8);

}  // namespace jitvd
