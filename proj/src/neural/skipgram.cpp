#include "jitvd/neural/skipgram.hpp"

#include <algorithm>
#include <cmath>

#include "jitvd/neural/model.hpp"
#include "jitvd/neural/random.hpp"

namespace jitvd::neural {

Eigen::MatrixXd init_embeddings(int vocab_size, int dim, std::uint64_t seed) {
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  Eigen::MatrixXd e(vocab_size, dim);
  for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = rng.uniform(-bound, bound);
  return e;
}

Eigen::MatrixXd skipgram_pretrain(const std::vector<TokenStream>& streams, const Vocab& vocab, int dim,
                                  const SkipGramConfig& cfg) {
  Eigen::MatrixXd in = init_embeddings(vocab.size(), dim, cfg.seed);
  if (cfg.epochs <= 0) return in;

  std::vector<std::vector<int>> ids;
  std::vector<double> freq(static_cast<std::size_t>(vocab.size()), 0.0);
  for (const auto& s : streams) {
    auto& row = ids.emplace_back();
    for (const auto& tok : s) {
      row.push_back(vocab.index(tok));
      freq[static_cast<std::size_t>(row.back())] += 1.0;
    }
  }
  std::vector<double> cdf(freq.size());
  double total = 0.0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    total += std::pow(freq[i], 0.75);
    cdf[i] = total;
  }
  if (total == 0.0) return in;

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(vocab.size(), dim);
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  auto draw_negative = [&]() {
    const double x = rng.uniform() * total;
    return static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
  };

  Eigen::VectorXd grad_in(dim);
  auto update = [&](int center, int target, double label) {
    const double score = sigmoid(in.row(center).dot(out.row(target)));
    const double g = cfg.lr * (label - score);
    grad_in += g * out.row(target).transpose();
    out.row(target) += g * in.row(center);
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& row : ids) {
      const int n = static_cast<int>(row.size());
      for (int c = 0; c < n; ++c) {
        const int center = row[static_cast<std::size_t>(c)];
        for (int o = std::max(0, c - cfg.window); o <= std::min(n - 1, c + cfg.window); ++o) {
          if (o == c) continue;
          grad_in.setZero();
          update(center, row[static_cast<std::size_t>(o)], 1.0);
          for (int k = 0; k < cfg.negatives; ++k) {
            const int neg = std::min(draw_negative(), vocab.size() - 1);
            if (neg == row[static_cast<std::size_t>(o)]) continue;
            update(center, neg, 0.0);
          }
          in.row(center) += grad_in.transpose();
        }
      }
    }
  }
  return in;
}

}  // namespace jitvd::neural
