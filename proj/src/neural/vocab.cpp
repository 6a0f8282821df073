#include "jitvd/neural/vocab.hpp"

#include <algorithm>
#include <map>

#include "jitvd/errors.hpp"

namespace jitvd::neural {

Vocab::Vocab() : tokens_{kUnkToken}, index_{{kUnkToken, kUnk}} {}

Vocab Vocab::build(const std::vector<TokenStream>& streams, int min_count) {
  std::map<std::string, long> freq;
  for (const auto& s : streams)
    for (const auto& t : s) ++freq[t];
  std::vector<std::pair<std::string, long>> kept;
  for (auto& [tok, n] : freq)
    if (n >= min_count && tok != kUnkToken) kept.emplace_back(tok, n);
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocab v;
  for (auto& [tok, n] : kept) {
    v.index_.emplace(tok, static_cast<int>(v.tokens_.size()));
    v.tokens_.push_back(tok);
  }
  return v;
}

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.empty() || tokens.front() != kUnkToken)
    throw InputError("BadVocab", "vocabulary must start with the unknown token");
  Vocab v;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (!v.index_.emplace(tokens[i], static_cast<int>(v.tokens_.size())).second)
      throw InputError("BadVocab", "duplicate vocabulary token '" + tokens[i] + "'");
    v.tokens_.push_back(tokens[i]);
  }
  return v;
}

int Vocab::index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

}  // namespace jitvd::neural
