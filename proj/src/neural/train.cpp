#include "jitvd/neural/train.hpp"

#include <cmath>
#include <numeric>

#include "jitvd/neural/random.hpp"

namespace jitvd::neural {

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  if (!j.is_object()) throw ConfigError("train config must be an object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "epochs") {
        c.epochs = v.get<int>();
      } else if (key == "lr") {
        c.lr = v.get<double>();
      } else if (key == "batch") {
        c.batch = v.get<int>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "optimizer") {
        if (v.get<std::string>() != "adam") throw ConfigError("only the adam optimizer is supported");
      } else {
        throw ConfigError("unknown train key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad train config: ") + e.what());
  }
  if (c.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (c.batch < 1) throw ConfigError("batch must be >= 1");
  if (!(c.lr >= 0.0)) throw ConfigError("lr must be >= 0");
  return c;
}

nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs}, {"lr", c.lr}, {"batch", c.batch}, {"seed", c.seed}, {"optimizer", "adam"}};
}

Adam::Adam(const ModelParams& shape, double lr) : lr_(lr), m_(shape.zeros_like()), v_(shape.zeros_like()) {}

void Adam::step(ModelParams& params, ModelParams& grad, bool skip_embeddings) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++t_;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  auto p = params.flat();
  auto g = grad.flat();
  auto m = m_.flat();
  auto v = v_.flat();
  const std::size_t first = skip_embeddings && params.embeddings.size() ? 1 : 0;
  for (std::size_t t = first; t < p.size(); ++t) {
    m[t] = b1 * m[t] + (1.0 - b1) * g[t];
    v[t] = b2 * v[t] + (1.0 - b2) * g[t].cwiseAbs2();
    p[t].array() -= lr_ * (m[t].array() / c1) / ((v[t].array() / c2).sqrt() + eps);
  }
}

TrainHistory train(JitVdModel& model, std::span<const LabeledSample> data, const TrainConfig& cfg,
                   const std::function<void(const EpochStats&)>& on_epoch) {
  if (data.empty()) throw InputError("EmptyDataset", "training set is empty");
  Rng rng(cfg.seed);
  Adam adam(model.params(), cfg.lr);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const double threshold = model.config().threshold;

  TrainHistory history;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    int correct = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
      ModelParams grad = model.params().zeros_like();
      for (std::size_t k = start; k < end; ++k) {
        const auto& ex = data[order[k]];
        double p = 0.0;
        const double loss = model.loss_and_grad(ex.sample, ex.label, &grad, &p);
        if (!std::isfinite(loss))
          throw NonFiniteLoss("non-finite loss at epoch " + std::to_string(epoch) + ", example " +
                              std::to_string(order[k]));
        loss_sum += loss;
        if ((p >= threshold ? 1 : 0) == ex.label) ++correct;
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto& t : grad.flat()) t *= scale;
      adam.step(model.params(), grad, model.config().freeze_embeddings);
      if (!model.params().all_finite())
        throw NonFiniteLoss("parameters became non-finite at epoch " + std::to_string(epoch));
    }
    EpochStats s{epoch, loss_sum / static_cast<double>(data.size()),
                 static_cast<double>(correct) / static_cast<double>(data.size())};
    history.push_back(s);
    if (on_epoch) on_epoch(s);
  }
  return history;
}

}  // namespace jitvd::neural
