#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "jitvd/neural/model.hpp"

namespace jitvd::neural {

struct TrainConfig {
  int epochs = 50;
  double lr = 1e-3;
  int batch = 16;
  std::uint64_t seed = 0;
};

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});
nlohmann::json train_config_to_json(const TrainConfig& c);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
};

using TrainHistory = std::vector<EpochStats>;

/// Adam with beta1 0.9, beta2 0.999, eps 1e-8.
class Adam {
 public:
  Adam(const ModelParams& shape, double lr);
  /// Applies one step. The embedding table is skipped when `skip_embeddings`.
  void step(ModelParams& params, ModelParams& grad, bool skip_embeddings);

 private:
  double lr_;
  long t_ = 0;
  ModelParams m_, v_;
};

struct LabeledSample {
  GraphSample sample;
  int label = 0;
};

/// Minibatch training. Each batch's gradient is the mean of the per-graph
/// gradients; the example order is reshuffled every epoch from `cfg.seed`.
/// Throws NonFiniteLoss when a loss or parameter turns non-finite.
TrainHistory train(JitVdModel& model, std::span<const LabeledSample> data, const TrainConfig& cfg,
                   const std::function<void(const EpochStats&)>& on_epoch = {});

}  // namespace jitvd::neural
