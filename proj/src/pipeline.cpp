#include "jitvd/pipeline.hpp"

#include <algorithm>

namespace jitvd {

std::string_view split_kind_name(SplitKind k) { return k == SplitKind::DevProcess ? "dev-process" : "cross-project"; }

namespace {

template <typename Fn>
void for_keys(const nlohmann::json& j, const char* section, Fn fn) {
  if (!j.is_object()) throw ConfigError(std::string(section) + " must be an object");
  for (const auto& [key, v] : j.items())
    if (!fn(key, v)) throw ConfigError(std::string("unknown ") + section + " key '" + key + "'");
}

neural::SkipGramConfig pretrain_from_json(const nlohmann::json& j, neural::SkipGramConfig c) {
  for_keys(j, "pretrain", [&c](const std::string& key, const nlohmann::json& v) {
    if (key == "window")
      c.window = v.get<int>();
    else if (key == "negatives")
      c.negatives = v.get<int>();
    else if (key == "epochs")
      c.epochs = v.get<int>();
    else if (key == "lr")
      c.lr = v.get<double>();
    else if (key == "seed")
      c.seed = v.get<std::uint64_t>();
    else
      return false;
    return true;
  });
  if (c.window < 1 || c.negatives < 0 || c.epochs < 0) throw ConfigError("invalid pretrain settings");
  return c;
}

}  // namespace

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("seed")) throw ConfigError("config must set 'seed'");
  PipelineConfig c;
  try {
    c.seed = j.at("seed").get<std::uint64_t>();
    c.model.seed = c.seed;
    c.train.seed = c.seed;
    c.pretrain.seed = c.seed;
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") continue;
      if (key == "model") {
        c.model = neural::hyperparams_from_json(v, c.model);
      } else if (key == "train") {
        c.train = neural::train_config_from_json(v, c.train);
      } else if (key == "pretrain") {
        c.pretrain = pretrain_from_json(v, c.pretrain);
      } else if (key == "min_count") {
        c.min_count = v.get<int>();
      } else if (key == "trim") {
        for_keys(v, "trim", [&c](const std::string& k, const nlohmann::json& x) {
          if (k == "enabled")
            c.trim = x.get<bool>();
          else if (k == "hop_limit")
            c.hop_limit = x.is_null() ? std::nullopt : std::optional<int>(x.get<int>());
          else
            return false;
          return true;
        });
      } else if (key == "explainer") {
        c.explainer = explainer_config_from_json(v, c.explainer);
      } else if (key == "split") {
        for_keys(v, "split", [&c](const std::string& k, const nlohmann::json& x) {
          if (k == "kind") {
            const auto s = x.get<std::string>();
            if (s == "dev-process")
              c.split = SplitKind::DevProcess;
            else if (s == "cross-project")
              c.split = SplitKind::CrossProject;
            else
              throw ConfigError("split kind must be 'dev-process' or 'cross-project'");
          } else if (k == "ratio") {
            c.split_ratio = x.get<double>();
          } else {
            return false;
          }
          return true;
        });
      } else if (key == "mining") {
        for_keys(v, "mining", [&c](const std::string& k, const nlohmann::json& x) {
          if (k == "hops")
            c.mining.hops = x.get<int>();
          else if (k == "output_params")
            c.mining.defuse.output_params = x.get<std::map<std::string, std::vector<int>>>();
          else
            return false;
          return true;
        });
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  if (c.min_count < 1) throw ConfigError("min_count must be >= 1");
  if (c.hop_limit && *c.hop_limit < 0) throw ConfigError("hop_limit must be >= 0");
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) throw ConfigError("split ratio must be in (0, 1)");
  if (c.mining.hops < 0) throw ConfigError("mining hops must be >= 0");
  return c;
}

nlohmann::json pipeline_config_to_json(const PipelineConfig& c) {
  return {{"seed", c.seed},
          {"model", neural::hyperparams_to_json(c.model)},
          {"train", neural::train_config_to_json(c.train)},
          {"pretrain",
           {{"window", c.pretrain.window},
            {"negatives", c.pretrain.negatives},
            {"epochs", c.pretrain.epochs},
            {"lr", c.pretrain.lr},
            {"seed", c.pretrain.seed}}},
          {"min_count", c.min_count},
          {"trim", {{"enabled", c.trim}, {"hop_limit", c.hop_limit ? nlohmann::json(*c.hop_limit) : nlohmann::json(nullptr)}}},
          {"explainer", explainer_config_to_json(c.explainer)},
          {"split", {{"kind", split_kind_name(c.split)}, {"ratio", c.split_ratio}}},
          {"mining", {{"hops", c.mining.hops}, {"output_params", c.mining.defuse.output_params}}}};
}

CodeTransformationGraph file_ctg(std::string_view before, std::string_view after, bool trim,
                                 std::optional<int> hop_limit, const std::string& path) {
  const auto g_old = build_rcg(parse_source(before, path));
  const auto g_new = build_rcg(parse_source(after, path));
  auto ctg = build_ctg(g_old, g_new, match_versions(g_old, g_new));
  return trim ? trim_ctg(ctg, hop_limit) : ctg;
}

namespace {

ChangeGraph join(std::vector<std::pair<FileSpan, CodeTransformationGraph>> parts, std::vector<std::string> warnings) {
  ChangeGraph out;
  std::vector<CodeTransformationGraph> graphs;
  NodeId first = 0;
  for (auto& [span, g] : parts) {
    span.first = first;
    span.count = g.size();
    first += static_cast<NodeId>(g.size());
    out.files.push_back(std::move(span));
    graphs.push_back(std::move(g));
  }
  out.ctg = disjoint_union(graphs);
  out.warnings = std::move(warnings);
  return out;
}

}  // namespace

ChangeGraph commit_graph(const CommitRecord& c, const PipelineConfig& cfg) {
  std::vector<std::pair<FileSpan, CodeTransformationGraph>> parts;
  std::vector<std::string> warnings;
  for (const auto& [path, f] : c.files) {
    FileSpan span{path, 0, 0, f.before.value_or(""), f.after.value_or("")};
    try {
      auto g = file_ctg(span.before, span.after, cfg.trim, cfg.hop_limit, path);
      parts.emplace_back(std::move(span), std::move(g));
    } catch (const InputError& e) {
      warnings.push_back(c.id + ": " + path + ": " + e.what() + " (file skipped)");
    }
  }
  return join(std::move(parts), std::move(warnings));
}

ChangeGraph pair_graph(const std::string& before, const std::string& after, const PipelineConfig& cfg,
                       const std::string& path) {
  std::vector<std::pair<FileSpan, CodeTransformationGraph>> parts;
  parts.emplace_back(FileSpan{path, 0, 0, before, after}, file_ctg(before, after, cfg.trim, cfg.hop_limit, path));
  return join(std::move(parts), {});
}

std::string describe_statement(const ChangeGraph& g, const RankedStatement& s) {
  for (const auto& f : g.files) {
    if (s.node_id < f.first || static_cast<std::size_t>(s.node_id - f.first) >= f.count) continue;
    const bool use_new = s.line_new != 0;
    const auto lines = split_lines(use_new ? f.after : f.before);
    const int line = use_new ? s.line_new : s.line_old;
    std::string text = line >= 1 && line <= static_cast<int>(lines.size()) ? lines[static_cast<std::size_t>(line - 1)] : "";
    text.erase(0, text.find_first_not_of(" \t"));
    return f.path + ":" + std::to_string(line) + (use_new ? "" : " (old)") + ": " + text;
  }
  return {};
}

Dataset build_dataset(const CommitCorpus& corpus, std::span<const LabeledCommit> commits, const PipelineConfig& cfg) {
  Dataset d;
  for (const auto& lc : commits) {
    if (lc.label == CommitLabel::Unlabeled) continue;
    auto g = commit_graph(corpus.at(lc.id), cfg);
    d.warnings.insert(d.warnings.end(), g.warnings.begin(), g.warnings.end());
    d.ids.push_back(lc.id);
    d.change_rates.push_back(change_rate(g.ctg));
    d.graphs.push_back(std::move(g.ctg));
    d.labels.push_back(lc.label == CommitLabel::Dangerous ? neural::Label::Dangerous : neural::Label::Safe);
  }
  return d;
}

neural::JitVdModel train_model(const Dataset& data, const PipelineConfig& cfg, neural::TrainHistory* history,
                               std::size_t limit) {
  const std::size_t n = std::min(limit, data.graphs.size());
  std::vector<neural::TokenStream> streams;
  for (std::size_t i = 0; i < n; ++i) streams.push_back(neural::content_stream(data.graphs[i]));
  auto vocab = neural::Vocab::build(streams, cfg.min_count);
  auto emb = neural::skipgram_pretrain(streams, vocab, cfg.model.d_emb, cfg.pretrain);
  auto model = neural::JitVdModel::create(cfg.model, vocab, std::move(emb));

  std::vector<neural::LabeledSample> samples;
  for (std::size_t i = 0; i < n; ++i) {
    if (data.graphs[i].empty()) continue;
    samples.push_back({model.encode(data.graphs[i]), data.labels[i] == neural::Label::Dangerous ? 1 : 0});
  }
  auto h = neural::train(model, samples, cfg.train);
  if (history) *history = std::move(h);
  return model;
}

std::vector<neural::Prediction> predict_all(const neural::JitVdModel& model, const Dataset& data) {
  std::vector<neural::Prediction> out;
  out.reserve(data.graphs.size());
  for (const auto& g : data.graphs) out.push_back(neural::predict_change(model, g));
  return out;
}

EvalReport evaluate(const neural::JitVdModel& model, const Dataset& train, const Dataset& test,
                    const PipelineConfig& cfg, bool curve) {
  EvalReport r;
  r.split = std::string(split_kind_name(cfg.split));
  r.train_size = train.graphs.size();
  const auto preds = predict_all(model, test);
  r.overall = confusion(preds, test.labels);
  r.empty_changes = static_cast<std::size_t>(
      std::count_if(preds.begin(), preds.end(), [](const neural::Prediction& p) { return p.empty_change; }));
  r.buckets = change_rate_buckets(preds, test.labels, test.change_rates);
  if (curve) {
    const auto sizes = fold_schedule(train.graphs.size());
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      CurvePoint pt;
      pt.folds = static_cast<int>(k + 1);
      pt.train_size = sizes[k];
      if (sizes[k] > 0) {
        const auto m = train_model(train, cfg, nullptr, sizes[k]);
        pt.confusion = confusion(predict_all(m, test), test.labels);
      }
      pt.metrics = metrics(pt.confusion);
      r.curve.push_back(pt);
    }
  }
  return r;
}

}  // namespace jitvd
