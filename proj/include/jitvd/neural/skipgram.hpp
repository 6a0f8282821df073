#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "jitvd/neural/vocab.hpp"

namespace jitvd::neural {

struct SkipGramConfig {
  int window = 2;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;
  std::uint64_t seed = 0;
};

/// Seeded uniform(+-1/sqrt(d)) table, V x d.
Eigen::MatrixXd init_embeddings(int vocab_size, int dim, std::uint64_t seed);

/// Skip-gram with negative sampling over the vocabulary indices of `streams`.
/// Negatives are drawn from the unigram^0.75 table. Returns the input
/// (center-word) vectors. With epochs == 0 the seeded initialisation is
/// returned unchanged.
Eigen::MatrixXd skipgram_pretrain(const std::vector<TokenStream>& streams, const Vocab& vocab, int dim,
                                  const SkipGramConfig& cfg);

}  // namespace jitvd::neural
