#include "jitvd/neural/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "jitvd/neural/random.hpp"

namespace jitvd::neural {

std::string_view layer_kind_name(LayerKind k) { return k == LayerKind::Rgcn ? "rgcn" : "rgat"; }

std::string_view readout_name(Readout r) {
  switch (r) {
    case Readout::Sum: return "sum";
    case Readout::Mean: return "mean";
    case Readout::Max: return "max";
  }
  return "?";
}

std::string_view direction_name(Direction d) { return d == Direction::Forward ? "forward" : "bidirectional"; }

std::string_view label_name(Label l) { return l == Label::Dangerous ? "dangerous" : "safe"; }

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(const nlohmann::json& j, const char* key, const std::array<Enum, N>& values,
                std::string_view (*name)(Enum)) {
  const auto s = j.get<std::string>();
  for (Enum v : values)
    if (name(v) == s) return v;
  throw ConfigError(std::string("invalid value '") + s + "' for " + key);
}

void require_positive(int v, const char* key) {
  if (v < 1) throw ConfigError(std::string(key) + " must be >= 1");
}

}  // namespace

HyperParams hyperparams_from_json(const nlohmann::json& j, HyperParams h) {
  if (!j.is_object()) throw ConfigError("model config must be an object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "layers") {
        h.layers = v.get<int>();
      } else if (key == "d_emb") {
        h.d_emb = v.get<int>();
      } else if (key == "d_hidden") {
        h.d_hidden = v.get<int>();
      } else if (key == "leaky_slope") {
        h.leaky_slope = v.get<double>();
      } else if (key == "layer_kind") {
        h.layer_kind = parse_enum(v, "layer_kind", std::array{LayerKind::Rgcn, LayerKind::Rgat}, layer_kind_name);
      } else if (key == "readout") {
        h.readout = parse_enum(v, "readout", std::array{Readout::Sum, Readout::Mean, Readout::Max}, readout_name);
      } else if (key == "direction") {
        h.direction =
            parse_enum(v, "direction", std::array{Direction::Forward, Direction::Bidirectional}, direction_name);
      } else if (key == "self_loop") {
        h.self_loop = v.get<bool>();
      } else if (key == "freeze_embeddings") {
        h.freeze_embeddings = v.get<bool>();
      } else if (key == "threshold") {
        h.threshold = v.get<double>();
      } else if (key == "seed") {
        h.seed = v.get<std::uint64_t>();
      } else {
        throw ConfigError("unknown model key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
  require_positive(h.layers, "layers");
  require_positive(h.d_emb, "d_emb");
  require_positive(h.d_hidden, "d_hidden");
  if (!(h.threshold > 0.0 && h.threshold < 1.0)) throw ConfigError("threshold must be in (0, 1)");
  return h;
}

nlohmann::json hyperparams_to_json(const HyperParams& h) {
  return {{"layers", h.layers},
          {"d_emb", h.d_emb},
          {"d_hidden", h.d_hidden},
          {"leaky_slope", h.leaky_slope},
          {"layer_kind", layer_kind_name(h.layer_kind)},
          {"readout", readout_name(h.readout)},
          {"direction", direction_name(h.direction)},
          {"self_loop", h.self_loop},
          {"freeze_embeddings", h.freeze_embeddings},
          {"threshold", h.threshold},
          {"seed", h.seed}};
}

std::vector<Eigen::Map<VectorX>> ModelParams::flat() {
  std::vector<Eigen::Map<VectorX>> out;
  visit(*this, [&out](const std::string&, auto& t) { out.emplace_back(t.data(), t.size()); });
  return out;
}

std::size_t ModelParams::count() const {
  std::size_t n = 0;
  visit(*this, [&n](const std::string&, const auto& t) { n += static_cast<std::size_t>(t.size()); });
  return n;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  visit(z, [](const std::string&, auto& t) { t.setZero(); });
  return z;
}

bool ModelParams::all_finite() const {
  bool ok = true;
  visit(*this, [&ok](const std::string&, const auto& t) { ok = ok && t.allFinite(); });
  return ok;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double loss_bce(double p, int y) {
  const double c = std::clamp(p, kBceEpsilon, 1.0 - kBceEpsilon);
  return -(y * std::log(c) + (1 - y) * std::log(1.0 - c));
}

JitVdModel JitVdModel::create(const HyperParams& config, Vocab vocab, std::optional<MatrixX> embeddings) {
  JitVdModel m;
  m.config_ = config;
  m.vocab_ = std::move(vocab);
  Rng rng(config.seed);
  auto fill = [&rng](auto& t, double fan_in) {
    const double bound = 1.0 / std::sqrt(fan_in);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-bound, bound);
  };

  auto& p = m.params_;
  p.embeddings.resize(m.vocab_.size(), config.d_emb);
  fill(p.embeddings, config.d_emb);
  if (embeddings) {
    if (embeddings->rows() != m.vocab_.size() || embeddings->cols() != config.d_emb)
      throw ShapeMismatch("pretrained embedding table has the wrong shape");
    p.embeddings = *embeddings;
  }

  Eigen::Index d_in = config.d_emb + 3;
  for (int l = 0; l < config.layers; ++l) {
    LayerParams layer;
    for (std::size_t r = 0; r < kNumRelations; ++r) {
      layer.W[r].resize(d_in, config.d_hidden);
      fill(layer.W[r], static_cast<double>(d_in));
    }
    if (config.layer_kind == LayerKind::Rgat) {
      for (std::size_t r = 0; r < kNumRelations; ++r) {
        layer.Q[r].resize(config.d_hidden);
        layer.K[r].resize(config.d_hidden);
        fill(layer.Q[r], config.d_hidden);
        fill(layer.K[r], config.d_hidden);
      }
    }
    if (config.self_loop) {
      layer.self.resize(d_in, config.d_hidden);
      fill(layer.self, static_cast<double>(d_in));
    }
    p.layers.push_back(std::move(layer));
    d_in = config.d_hidden;
  }
  p.mlp_w1.resize(config.d_hidden, config.d_hidden);
  fill(p.mlp_w1, config.d_hidden);
  p.mlp_b1 = VectorX::Zero(config.d_hidden);
  p.mlp_w2.resize(config.d_hidden);
  fill(p.mlp_w2, config.d_hidden);
  p.mlp_b2 = VectorX::Zero(1);
  return m;
}

JitVdModel model_from_parts(HyperParams config, Vocab vocab, ModelParams params) {
  JitVdModel reference = JitVdModel::create(config, vocab);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> want, got;
  ModelParams::visit(reference.params_, [&](const std::string&, const auto& t) { want.emplace_back(t.rows(), t.cols()); });
  ModelParams::visit(params, [&](const std::string&, const auto& t) { got.emplace_back(t.rows(), t.cols()); });
  if (want != got) throw ShapeMismatch("model tensors do not match the configuration");
  reference.params_ = std::move(params);
  return reference;
}

MatrixX JitVdModel::node_features(const GraphSample& s) const {
  const auto n = static_cast<Eigen::Index>(s.tokens.size());
  MatrixX h = MatrixX::Zero(n, config_.d_emb + 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    h.row(i).head(config_.d_emb) = params_.embeddings.row(s.tokens[iu]);
    h(i, config_.d_emb + s.alpha[iu]) = 1.0;
  }
  return h;
}

ForwardTrace JitVdModel::trace(const GraphSample& s) const {
  if (s.tokens.empty()) throw EmptyGraph();
  ForwardTrace t;
  t.features = node_features(s);
  const MatrixX* h = &t.features;
  for (const auto& layer : params_.layers) {
    t.layers.push_back(config_.layer_kind == LayerKind::Rgat
                           ? rgat_forward(layer, s.graph, *h, config_.leaky_slope)
                           : rgcn_forward(layer, s.graph, *h));
    h = &t.layers.back().out;
  }
  t.graph = readout(*h, config_.readout, &t.argmax);
  t.hidden_pre = params_.mlp_w1.transpose() * t.graph + params_.mlp_b1;
  t.hidden = t.hidden_pre.cwiseMax(0.0);
  t.logit = params_.mlp_w2.dot(t.hidden) + params_.mlp_b2(0);
  t.probability = sigmoid(t.logit);
  return t;
}

Prediction JitVdModel::to_prediction(double logit) const {
  Prediction p;
  p.logit = logit;
  p.probability = sigmoid(logit);
  p.label = p.probability >= config_.threshold ? Label::Dangerous : Label::Safe;
  return p;
}

Prediction JitVdModel::forward(const GraphSample& s) const { return to_prediction(trace(s).logit); }

double JitVdModel::loss_and_grad(const GraphSample& s, int y, ModelParams* grad, double* probability) const {
  const ForwardTrace t = trace(s);
  const double loss = loss_bce(t.probability, y);
  if (probability) *probability = t.probability;
  if (!grad) return loss;

  const bool clamped = t.probability < kBceEpsilon || t.probability > 1.0 - kBceEpsilon;
  const double d_logit = clamped ? 0.0 : t.probability - y;

  grad->mlp_b2(0) += d_logit;
  grad->mlp_w2 += d_logit * t.hidden;
  const VectorX d_hidden = (d_logit * params_.mlp_w2).cwiseProduct((t.hidden_pre.array() > 0.0).cast<double>().matrix());
  grad->mlp_b1 += d_hidden;
  grad->mlp_w1.noalias() += t.graph * d_hidden.transpose();
  const VectorX d_graph = params_.mlp_w1 * d_hidden;

  const MatrixX& last = t.layers.empty() ? t.features : t.layers.back().out;
  MatrixX d_h = readout_backward<double>(d_graph, last.rows(), config_.readout, t.argmax);
  for (std::size_t l = params_.layers.size(); l-- > 0;) {
    const MatrixX& input = l == 0 ? t.features : t.layers[l - 1].out;
    d_h = config_.layer_kind == LayerKind::Rgat
              ? rgat_backward(params_.layers[l], s.graph, input, t.layers[l], d_h, config_.leaky_slope,
                              grad->layers[l])
              : rgcn_backward(params_.layers[l], s.graph, input, t.layers[l], d_h, grad->layers[l]);
  }
  for (std::size_t i = 0; i < s.tokens.size(); ++i)
    grad->embeddings.row(s.tokens[i]) += d_h.row(static_cast<Eigen::Index>(i)).head(config_.d_emb);
  return loss;
}

Prediction model_forward(const JitVdModel& model, const CodeTransformationGraph& g) {
  if (g.empty()) throw EmptyGraph("change graph is empty");
  return model.forward(model.encode(g));
}

Prediction predict_change(const JitVdModel& model, const CodeTransformationGraph& g) {
  if (g.empty()) {
    Prediction p;
    p.empty_change = true;
    return p;
  }
  return model_forward(model, g);
}

double grad_check(const JitVdModel& model, const GraphSample& s, int y, double step) {
  ModelParams analytic = model.params().zeros_like();
  model.loss_and_grad(s, y, &analytic);

  JitVdModel probe = model;
  auto params = probe.params().flat();
  auto grads = analytic.flat();
  double worst = 0.0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (Eigen::Index i = 0; i < params[t].size(); ++i) {
      const double saved = params[t](i);
      params[t](i) = saved + step;
      const double up = probe.loss_and_grad(s, y, nullptr);
      params[t](i) = saved - step;
      const double down = probe.loss_and_grad(s, y, nullptr);
      params[t](i) = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = grads[t](i);
      const double err = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace jitvd::neural
