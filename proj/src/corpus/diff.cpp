#include <span>

#include "jitvd/corpus.hpp"
#include "jitvd/lcs.hpp"

namespace jitvd {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      break;
    }
    out.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

std::vector<int> LineDiff::deleted() const {
  std::vector<int> out;
  for (int i = 1; i <= old_lines(); ++i)
    if (old_to_new[static_cast<std::size_t>(i)] == 0) out.push_back(i);
  return out;
}

std::vector<int> LineDiff::added() const {
  std::vector<int> out;
  for (int i = 1; i <= new_lines(); ++i)
    if (new_to_old[static_cast<std::size_t>(i)] == 0) out.push_back(i);
  return out;
}

LineDiff diff_lines(std::string_view before, std::string_view after) {
  const auto a = split_lines(before);
  const auto b = split_lines(after);
  LineDiff d;
  d.old_to_new.assign(a.size() + 1, 0);
  d.new_to_old.assign(b.size() + 1, 0);
  for (const auto& [i, j] : lcs_align<std::string>(std::span<const std::string>(a), std::span<const std::string>(b))) {
    d.old_to_new[i + 1] = static_cast<int>(j + 1);
    d.new_to_old[j + 1] = static_cast<int>(i + 1);
  }
  return d;
}

}  // namespace jitvd
