#include <fstream>
#include <sstream>

#include "jitvd/corpus.hpp"
#include "jitvd/errors.hpp"

namespace jitvd {

CommitCorpus::CommitCorpus(std::vector<CommitRecord> commits) : commits_(std::move(commits)) {
  for (std::size_t i = 0; i < commits_.size(); ++i) {
    const auto& c = commits_[i];
    if (c.id.empty()) throw CorpusFormatError("", "commit #" + std::to_string(i) + " has an empty id");
    if (!index_.emplace(c.id, i).second) throw CorpusFormatError(c.id, "duplicate commit id");
    if (c.parent) {
      auto it = index_.find(*c.parent);
      if (it == index_.end() || it->second == i)
        throw CorpusFormatError(c.id, "parent '" + *c.parent + "' is not an earlier commit");
      if (commits_[it->second].timestamp >= c.timestamp)
        throw CorpusFormatError(c.id, "timestamp does not increase along the parent chain");
    }
    for (const auto& [path, change] : c.files) {
      if (!change.before && !change.after) throw CorpusFormatError(c.id, path + ": both versions absent");
      const auto previous = c.parent ? file_at(*c.parent, path) : std::nullopt;
      if (previous != change.before)
        throw CorpusFormatError(c.id, path + ": before-version does not match the parent's content");
    }
  }
}

const CommitRecord& CommitCorpus::at(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InputError("UnknownCommit", "no commit '" + id + "'");
  return commits_[it->second];
}

std::optional<std::string> CommitCorpus::file_at(const std::string& commit, const std::string& path) const {
  const CommitRecord* c = &at(commit);
  while (true) {
    auto f = c->files.find(path);
    if (f != c->files.end()) return f->second.after;
    if (!c->parent) return std::nullopt;
    c = &at(*c->parent);
  }
}

namespace {

std::optional<std::string> read_file_value(const nlohmann::json& v, const std::filesystem::path& blob_dir,
                                           const std::string& commit) {
  if (v.is_null()) return std::nullopt;
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object() && v.contains("blob")) {
    const auto hash = v.at("blob").get<std::string>();
    if (hash.empty() || hash.find('/') != std::string::npos || hash.find("..") != std::string::npos)
      throw CorpusFormatError(commit, "invalid blob name '" + hash + "'");
    std::ifstream in(blob_dir / "blobs" / hash, std::ios::binary);
    if (!in) throw CorpusFormatError(commit, "missing blob " + hash);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
  throw CorpusFormatError(commit, "file value must be a string, null or {\"blob\": ...}");
}

}  // namespace

CommitCorpus corpus_from_json(const nlohmann::json& manifest, const std::filesystem::path& blob_dir) {
  if (!manifest.is_object() || !manifest.contains("commits") || !manifest.at("commits").is_array())
    throw CorpusFormatError("", "manifest must be an object with a 'commits' array");
  std::vector<CommitRecord> commits;
  for (const auto& j : manifest.at("commits")) {
    CommitRecord c;
    try {
      c.id = j.at("id").get<std::string>();
      if (j.contains("parent") && !j.at("parent").is_null()) c.parent = j.at("parent").get<std::string>();
      c.timestamp = j.at("timestamp").get<std::int64_t>();
      c.project = j.value("project", std::string("default"));
      c.message = j.value("message", std::string());
      if (j.contains("fixes") && !j.at("fixes").is_null()) c.fixes = j.at("fixes").get<std::string>();
      if (j.contains("files")) {
        for (const auto& [path, v] : j.at("files").items()) {
          FileChange f;
          f.before = read_file_value(v.at("before"), blob_dir, c.id);
          f.after = read_file_value(v.at("after"), blob_dir, c.id);
          c.files.emplace(path, std::move(f));
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw CorpusFormatError(c.id, std::string("malformed commit record: ") + e.what());
    }
    commits.push_back(std::move(c));
  }
  return CommitCorpus(std::move(commits));
}

CommitCorpus load_corpus(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw CorpusFormatError("", "cannot read " + manifest_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CorpusFormatError("", std::string("manifest is not valid JSON: ") + e.what());
  }
  return corpus_from_json(j, dir);
}

nlohmann::json corpus_to_json(const CommitCorpus& corpus) {
  auto text = [](const std::optional<std::string>& s) { return s ? nlohmann::json(*s) : nlohmann::json(nullptr); };
  nlohmann::json commits = nlohmann::json::array();
  for (const auto& c : corpus.commits()) {
    nlohmann::json files = nlohmann::json::object();
    for (const auto& [path, f] : c.files) files[path] = {{"before", text(f.before)}, {"after", text(f.after)}};
    commits.push_back({{"id", c.id},
                       {"parent", text(c.parent)},
                       {"timestamp", c.timestamp},
                       {"project", c.project},
                       {"message", c.message},
                       {"fixes", text(c.fixes)},
                       {"files", std::move(files)}});
  }
  return {{"commits", std::move(commits)}};
}

}  // namespace jitvd
