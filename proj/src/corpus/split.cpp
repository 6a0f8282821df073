#include <algorithm>
#include <cmath>
#include <set>

#include "jitvd/corpus.hpp"
#include "jitvd/neural/random.hpp"

namespace jitvd {

namespace {

std::vector<LabeledCommit> labeled_only(std::vector<LabeledCommit> v) {
  std::erase_if(v, [](const LabeledCommit& c) { return c.label == CommitLabel::Unlabeled; });
  return v;
}

std::size_t ceil_share(double ratio, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
}

}  // namespace

Split split_dev_process(std::vector<LabeledCommit> labeled, double ratio) {
  auto v = labeled_only(std::move(labeled));
  std::sort(v.begin(), v.end(), [](const LabeledCommit& a, const LabeledCommit& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.id < b.id;
  });
  const std::size_t k = std::min(v.size(), ceil_share(ratio, v.size()));
  Split s;
  s.train.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k));
  s.test.assign(v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return s;
}

Split split_cross_project(std::vector<LabeledCommit> labeled, std::uint64_t seed, double ratio) {
  auto v = labeled_only(std::move(labeled));
  std::set<std::string> ids;
  for (const auto& c : v) ids.insert(c.project);
  std::vector<std::string> projects(ids.begin(), ids.end());
  neural::Rng rng(seed);
  rng.shuffle(std::span<std::string>(projects));
  const std::size_t p = projects.size();
  const std::size_t k = p < 2 ? p : std::min(ceil_share(ratio, p), p - 1);
  const std::set<std::string> train_projects(projects.begin(), projects.begin() + static_cast<std::ptrdiff_t>(k));
  Split s;
  for (auto& c : v) (train_projects.count(c.project) ? s.train : s.test).push_back(std::move(c));
  return s;
}

}  // namespace jitvd
