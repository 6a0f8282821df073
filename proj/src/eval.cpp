#include "jitvd/eval.hpp"

#include <algorithm>
#include <cmath>

namespace jitvd {

Confusion confusion(std::span<const neural::Prediction> preds, std::span<const neural::Label> labels) {
  if (preds.size() != labels.size())
    throw LengthMismatch(std::to_string(preds.size()) + " predictions for " + std::to_string(labels.size()) +
                         " labels");
  Confusion c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i].label == neural::Label::Dangerous;
    const bool y = labels[i] == neural::Label::Dangerous;
    if (p && y)
      ++c.tp;
    else if (p)
      ++c.fp;
    else if (y)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}

namespace {

double ratio(double num, double den, bool& degenerate) {
  degenerate = den == 0.0;
  return degenerate ? 0.0 : num / den;
}

}  // namespace

Metrics metrics(const Confusion& c) {
  Metrics m;
  m.precision = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp), m.precision_degenerate);
  m.recall = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn), m.recall_degenerate);
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall, m.f1_degenerate);
  m.accuracy = ratio(static_cast<double>(c.tp + c.tn), static_cast<double>(c.total()), m.accuracy_degenerate);
  return m;
}

nlohmann::json confusion_to_json(const Confusion& c) {
  return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json degenerate = nlohmann::json::array();
  if (m.precision_degenerate) degenerate.push_back("precision");
  if (m.recall_degenerate) degenerate.push_back("recall");
  if (m.f1_degenerate) degenerate.push_back("f1");
  if (m.accuracy_degenerate) degenerate.push_back("accuracy");
  return {{"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"accuracy", m.accuracy},
          {"degenerate", std::move(degenerate)}};
}

int change_rate_decile(double rate) {
  return std::clamp(static_cast<int>(std::floor(rate * 10.0)), 0, 9);
}

std::vector<BucketResult> change_rate_buckets(std::span<const neural::Prediction> preds,
                                              std::span<const neural::Label> labels,
                                              std::span<const double> change_rates) {
  if (preds.size() != labels.size() || preds.size() != change_rates.size())
    throw LengthMismatch("predictions, labels and change rates differ in length");
  std::vector<std::vector<neural::Prediction>> p(10);
  std::vector<std::vector<neural::Label>> y(10);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto d = static_cast<std::size_t>(change_rate_decile(change_rates[i]));
    p[d].push_back(preds[i]);
    y[d].push_back(labels[i]);
  }
  std::vector<BucketResult> out;
  for (int d = 0; d < 10; ++d) {
    BucketResult b;
    b.decile = d;
    b.confusion = confusion(p[static_cast<std::size_t>(d)], y[static_cast<std::size_t>(d)]);
    b.metrics = metrics(b.confusion);
    out.push_back(b);
  }
  return out;
}

std::vector<std::size_t> fold_schedule(std::size_t n, int folds) {
  std::vector<std::size_t> out;
  for (int i = 1; i <= folds; ++i)
    out.push_back((static_cast<std::size_t>(i) * n + static_cast<std::size_t>(folds) - 1) /
                  static_cast<std::size_t>(folds));
  return out;
}

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : r.buckets)
    buckets.push_back({{"decile", b.decile},
                       {"range", {b.decile / 10.0, (b.decile + 1) / 10.0}},
                       {"count", b.confusion.total()},
                       {"confusion", confusion_to_json(b.confusion)},
                       {"metrics", metrics_to_json(b.metrics)}});
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& c : r.curve)
    curve.push_back({{"folds", c.folds},
                     {"train_size", c.train_size},
                     {"confusion", confusion_to_json(c.confusion)},
                     {"metrics", metrics_to_json(c.metrics)}});
  return {{"split", r.split},
          {"train_size", r.train_size},
          {"test_size", r.overall.total()},
          {"empty_changes", r.empty_changes},
          {"confusion", confusion_to_json(r.overall)},
          {"metrics", metrics_to_json(metrics(r.overall))},
          {"change_rate_buckets", std::move(buckets)},
          {"training_size_curve", std::move(curve)}};
}

}  // namespace jitvd
