#include <gtest/gtest.h>

#include <algorithm>

#include "jitvd/eval.hpp"
#include "jitvd/neural/random.hpp"

using namespace jitvd;
using neural::Label;
using neural::Prediction;

namespace {

constexpr Label D = Label::Dangerous;
constexpr Label S = Label::Safe;

std::vector<Prediction> preds_of(const std::vector<Label>& labels) {
  std::vector<Prediction> out;
  for (auto l : labels) {
    Prediction p;
    p.label = l;
    p.probability = l == D ? 0.9 : 0.1;
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST(Confusion, AllCorrect) {
  const std::vector<Label> y = {D, S, D, S, S};
  const auto c = confusion(preds_of(y), y);
  EXPECT_EQ(c.fp, 0);
  EXPECT_EQ(c.fn, 0);
  EXPECT_EQ(c.tp, 2);
  EXPECT_EQ(c.tn, 3);
}

TEST(Confusion, AllDangerousOnSafe) {
  const std::vector<Label> y(7, S);
  const auto c = confusion(preds_of(std::vector<Label>(7, D)), y);
  EXPECT_EQ(c.tp, 0);
  EXPECT_EQ(c.tn, 0);
  EXPECT_EQ(c.fp, 7);
}

TEST(Confusion, HandCountedTen) {
  const std::vector<Label> p = {D, D, S, D, S, S, D, S, D, S};
  const std::vector<Label> y = {D, S, S, D, D, S, D, S, S, D};
  const auto c = confusion(preds_of(p), y);
  EXPECT_EQ(c.tp, 3);
  EXPECT_EQ(c.fp, 2);
  EXPECT_EQ(c.fn, 2);
  EXPECT_EQ(c.tn, 3);
  const auto m = metrics(c);
  EXPECT_DOUBLE_EQ(m.precision, 0.6);
  EXPECT_DOUBLE_EQ(m.recall, 0.6);
  EXPECT_DOUBLE_EQ(m.f1, 0.6);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.6);
}

TEST(Confusion, LengthMismatch) {
  const std::vector<Label> y = {D, S};
  EXPECT_THROW(confusion(preds_of({D}), y), LengthMismatch);
}

TEST(Metrics, NinetyPercent) {
  const auto m = metrics({90, 10, 10, 90});
  EXPECT_DOUBLE_EQ(m.precision, 0.9);
  EXPECT_DOUBLE_EQ(m.recall, 0.9);
  EXPECT_DOUBLE_EQ(m.f1, 0.9);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.9);
  EXPECT_FALSE(m.precision_degenerate || m.recall_degenerate || m.f1_degenerate || m.accuracy_degenerate);
}

TEST(Metrics, DegenerateRatiosAreZeroAndFlagged) {
  const auto m = metrics({0, 0, 5, 5});
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_TRUE(m.precision_degenerate);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_FALSE(m.recall_degenerate);
  EXPECT_TRUE(m.f1_degenerate);
  const auto empty = metrics({});
  EXPECT_TRUE(empty.accuracy_degenerate);
  EXPECT_EQ(empty.accuracy, 0.0);
  const auto j = metrics_to_json(m);
  EXPECT_EQ(j["precision"], 0.0);
}

TEST(Metrics, RandomConfusionProperties) {
  neural::Rng rng(8);
  for (int t = 0; t < 1000; ++t) {
    const Confusion c{static_cast<long>(rng.below(50)), static_cast<long>(rng.below(50)),
                      static_cast<long>(rng.below(50)), static_cast<long>(rng.below(50))};
    const auto m = metrics(c);
    if (c.total() > 0) {
      EXPECT_EQ(m.accuracy, static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total()));
    }
    if (m.precision > 0 && m.recall > 0) {
      EXPECT_NEAR(m.f1, 2 * m.precision * m.recall / (m.precision + m.recall), 1e-15);
      EXPECT_LE(m.f1, std::max(m.precision, m.recall) + 1e-15);
      EXPECT_GE(m.f1, std::min(m.precision, m.recall) - 1e-15);
    }
  }
}

TEST(Buckets, DecilesAndGrouping) {
  EXPECT_EQ(change_rate_decile(0.0), 0);
  EXPECT_EQ(change_rate_decile(0.099), 0);
  EXPECT_EQ(change_rate_decile(0.1), 1);
  EXPECT_EQ(change_rate_decile(0.95), 9);
  EXPECT_EQ(change_rate_decile(1.0), 9);
  const std::vector<Label> y = {D, S, D, S};
  const std::vector<double> rates = {0.05, 0.07, 0.55, 1.0};
  const auto b = change_rate_buckets(preds_of({D, D, S, S}), y, rates);
  ASSERT_EQ(b.size(), 10u);
  EXPECT_EQ(b[0].confusion.tp, 1);
  EXPECT_EQ(b[0].confusion.fp, 1);
  EXPECT_EQ(b[5].confusion.fn, 1);
  EXPECT_EQ(b[9].confusion.tn, 1);
  EXPECT_EQ(b[3].confusion.total(), 0);
}

TEST(Folds, CumulativeSchedule) {
  EXPECT_EQ(fold_schedule(10), (std::vector<std::size_t>{2, 4, 6, 8, 10}));
  EXPECT_EQ(fold_schedule(7), (std::vector<std::size_t>{2, 3, 5, 6, 7}));
  EXPECT_EQ(fold_schedule(0), (std::vector<std::size_t>{0, 0, 0, 0, 0}));
}

TEST(Report, JsonKeys) {
  EvalReport r;
  r.split = "dev-process";
  r.train_size = 8;
  r.overall = {1, 0, 0, 1};
  r.buckets.resize(10);
  r.curve.push_back({1, 4, {}, {}});
  const auto j = report_to_json(r);
  for (const char* k : {"split", "train_size", "test_size", "empty_changes", "confusion", "metrics",
                        "change_rate_buckets", "training_size_curve"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["test_size"], 2);
}
