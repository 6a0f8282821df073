#pragma once

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "jitvd/neural/model.hpp"

namespace jitvd {

/// Dangerous is the positive class.
struct Confusion {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  long total() const { return tp + fp + fn + tn; }
};

/// Throws LengthMismatch when the lists differ in length.
Confusion confusion(std::span<const neural::Prediction> preds, std::span<const neural::Label> labels);

/// A ratio with a zero denominator is reported as 0 and flagged.
struct Metrics {
  double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;
  bool precision_degenerate = false, recall_degenerate = false, f1_degenerate = false, accuracy_degenerate = false;
};

Metrics metrics(const Confusion& c);

nlohmann::json confusion_to_json(const Confusion& c);
nlohmann::json metrics_to_json(const Metrics& m);

/// Bucket of a change rate in [0, 1]: min(floor(10 * rate), 9).
int change_rate_decile(double rate);

struct BucketResult {
  int decile = 0;
  Confusion confusion;
  Metrics metrics;
};

/// Ten buckets, empty ones included.
std::vector<BucketResult> change_rate_buckets(std::span<const neural::Prediction> preds,
                                              std::span<const neural::Label> labels,
                                              std::span<const double> change_rates);

/// Sizes of the cumulative chronological training prefixes for folds 1..k:
/// fold i keeps the first ceil(i * n / k) examples.
std::vector<std::size_t> fold_schedule(std::size_t n, int folds = 5);

struct CurvePoint {
  int folds = 0;
  std::size_t train_size = 0;
  Confusion confusion;
  Metrics metrics;
};

struct EvalReport {
  std::string split;
  std::size_t train_size = 0;
  Confusion overall;
  std::size_t empty_changes = 0;
  std::vector<BucketResult> buckets;
  std::vector<CurvePoint> curve;
};

nlohmann::json report_to_json(const EvalReport& r);

}  // namespace jitvd
