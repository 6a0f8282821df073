#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace jitvd::neural {

using TokenStream = std::vector<std::string>;

/// Token -> dense index. Index 0 is the unknown token.
class Vocab {
 public:
  static constexpr int kUnk = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocab();

  /// Tokens with frequency >= min_count, ordered by descending frequency
  /// then lexicographically.
  static Vocab build(const std::vector<TokenStream>& streams, int min_count = 1);
  static Vocab from_tokens(const std::vector<std::string>& tokens);

  int index(const std::string& token) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace jitvd::neural
