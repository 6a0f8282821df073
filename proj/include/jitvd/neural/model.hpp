#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jitvd/neural/layers.hpp"

namespace jitvd::neural {

using MatrixX = Mat<double>;
using VectorX = Vec<double>;
using LayerParams = LayerParamsT<double>;

enum class LayerKind { Rgcn, Rgat };

std::string_view layer_kind_name(LayerKind k);
std::string_view readout_name(Readout r);
std::string_view direction_name(Direction d);

struct HyperParams {
  int layers = 3;
  int d_emb = 64;
  int d_hidden = 64;
  double leaky_slope = 0.2;
  LayerKind layer_kind = LayerKind::Rgat;
  Readout readout = Readout::Mean;
  Direction direction = Direction::Forward;
  bool self_loop = false;
  bool freeze_embeddings = false;
  double threshold = 0.5;
  std::uint64_t seed = 0;
};

/// Rejects unknown keys and out-of-range values.
HyperParams hyperparams_from_json(const nlohmann::json& j, HyperParams base = {});
nlohmann::json hyperparams_to_json(const HyperParams& h);

/// Every trainable tensor of the model. Gradients and optimizer moments use
/// the same layout.
struct ModelParams {
  MatrixX embeddings;  // V x d_emb
  std::vector<LayerParams> layers;
  MatrixX mlp_w1;  // d_hidden x d_hidden
  VectorX mlp_b1;
  VectorX mlp_w2;  // d_hidden
  VectorX mlp_b2;  // 1

  /// Calls f(name, tensor) for every non-empty tensor in a fixed order;
  /// works on const and mutable instances.
  template <typename Self, typename F>
  static void visit(Self& self, F&& f);

  /// Flat views in visit order.
  std::vector<Eigen::Map<VectorX>> flat();
  std::size_t count() const;

  ModelParams zeros_like() const;
  bool all_finite() const;
};

template <typename Self, typename F>
void ModelParams::visit(Self& self, F&& f) {
  static constexpr const char* kRel[] = {"structure", "dependency"};
  if (self.embeddings.size()) f(std::string("embeddings"), self.embeddings);
  for (std::size_t l = 0; l < self.layers.size(); ++l) {
    auto& layer = self.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    for (std::size_t r = 0; r < kNumRelations; ++r) f(prefix + "W_" + kRel[r], layer.W[r]);
    for (std::size_t r = 0; r < kNumRelations; ++r)
      if (layer.Q[r].size()) f(prefix + "Q_" + kRel[r], layer.Q[r]);
    for (std::size_t r = 0; r < kNumRelations; ++r)
      if (layer.K[r].size()) f(prefix + "K_" + kRel[r], layer.K[r]);
    if (layer.self.size()) f(prefix + "self", layer.self);
  }
  f(std::string("mlp.w1"), self.mlp_w1);
  f(std::string("mlp.b1"), self.mlp_b1);
  f(std::string("mlp.w2"), self.mlp_w2);
  f(std::string("mlp.b2"), self.mlp_b2);
}

enum class Label { Safe, Dangerous };
std::string_view label_name(Label l);

struct Prediction {
  double probability = 0.0;
  double logit = 0.0;
  Label label = Label::Safe;
  bool empty_change = false;
};

inline constexpr double kBceEpsilon = 1e-12;

/// -(y log p + (1-y) log(1-p)) with p clamped to [eps, 1-eps].
double loss_bce(double p, int y);

double sigmoid(double x);

/// Intermediate values of one forward pass.
struct ForwardTrace {
  MatrixX features;
  std::vector<LayerTrace<double>> layers;
  std::vector<Eigen::Index> argmax;
  VectorX graph;
  VectorX hidden_pre;
  VectorX hidden;
  double logit = 0.0;
  double probability = 0.0;
};

class JitVdModel {
 public:
  JitVdModel() = default;

  /// Seeded uniform(+-1/sqrt(fan_in)) initialisation; biases start at zero.
  /// `embeddings` replaces the random table when given (V x d_emb).
  static JitVdModel create(const HyperParams& config, Vocab vocab, std::optional<MatrixX> embeddings = {});

  const HyperParams& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }
  ModelParams& params() { return params_; }
  const ModelParams& params() const { return params_; }

  GraphSample encode(const CodeTransformationGraph& g) const { return encode_ctg(g, vocab_, config_.direction); }

  /// h_i^0 = embedding(content_i) ++ onehot(alpha_i).
  MatrixX node_features(const GraphSample& s) const;

  ForwardTrace trace(const GraphSample& s) const;

  /// Throws EmptyGraph when the sample has no nodes.
  Prediction forward(const GraphSample& s) const;

  /// Loss for label y; adds dL/dtheta into `grad` when non-null and stores
  /// the predicted probability into `probability` when non-null.
  double loss_and_grad(const GraphSample& s, int y, ModelParams* grad, double* probability = nullptr) const;

  Prediction to_prediction(double logit) const;

 private:
  HyperParams config_;
  Vocab vocab_;
  ModelParams params_;

  friend JitVdModel model_from_parts(HyperParams, Vocab, ModelParams);
};

/// Assembles a model from loaded parts after checking tensor shapes.
JitVdModel model_from_parts(HyperParams config, Vocab vocab, ModelParams params);

/// Full pipeline on a CTG: features, GNN layers, readout, MLP. Throws
/// EmptyGraph for an empty graph.
Prediction model_forward(const JitVdModel& model, const CodeTransformationGraph& g);

/// Same as model_forward, but an empty (trimmed-away) change is classified
/// safe with probability 0 and the empty_change flag.
Prediction predict_change(const JitVdModel& model, const CodeTransformationGraph& g);

/// Max over parameters of |analytic - numeric| / max(1, |analytic|, |numeric|)
/// using central differences.
double grad_check(const JitVdModel& model, const GraphSample& s, int y, double step = 1e-5);

}  // namespace jitvd::neural
