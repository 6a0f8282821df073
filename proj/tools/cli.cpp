#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "jitvd/corpus.hpp"
#include "jitvd/ctg.hpp"
#include "jitvd/errors.hpp"
#include "jitvd/graphs.hpp"
#include "jitvd/localize.hpp"
#include "jitvd/neural/checkpoint.hpp"
#include "jitvd/pipeline.hpp"
#include "jitvd/synth.hpp"

namespace jitvd::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("IoError", "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("JsonError", path + ": " + e.what());
  }
}

void write_text(const Globals& g, const std::string& name, const std::string& text) {
  if (g.out_dir.empty()) return;
  fs::create_directories(g.out_dir);
  std::ofstream out(fs::path(g.out_dir) / name, std::ios::binary);
  if (!out) throw InputError("IoError", "cannot write " + (fs::path(g.out_dir) / name).string());
  out << text;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

/// Config file (if any) with --seed applied on top. A seed must come from
/// one of the two when `need_seed`.
PipelineConfig load_config(const Globals& g, bool need_seed) {
  nlohmann::json j = g.config.empty() ? nlohmann::json::object() : read_json(g.config);
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (g.seed) j["seed"] = *g.seed;
  if (!j.contains("seed")) {
    if (need_seed) throw ConfigError("a seed is required (config 'seed' or --seed)");
    j["seed"] = 0;
  }
  return pipeline_config_from_json(j);
}

Labeling labels_for(const CommitCorpus& corpus, const std::string& labels_path, const PipelineConfig& cfg) {
  return labels_path.empty() ? label_dataset(corpus, cfg.mining) : labeling_from_json(read_json(labels_path));
}

Split split_for(const Labeling& labels, const PipelineConfig& cfg) {
  Split s = cfg.split == SplitKind::DevProcess ? split_dev_process(labels.commits, cfg.split_ratio)
                                               : split_cross_project(labels.commits, cfg.seed, cfg.split_ratio);
  auto chrono = [](const LabeledCommit& a, const LabeledCommit& b) {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.id < b.id;
  };
  std::sort(s.train.begin(), s.train.end(), chrono);
  std::sort(s.test.begin(), s.test.end(), chrono);
  return s;
}

nlohmann::json prediction_json(const neural::Prediction& p) {
  nlohmann::json j = {{"label", neural::label_name(p.label)}, {"probability", p.probability}};
  if (!p.empty_change) j["logit"] = p.logit;
  j["empty_change"] = p.empty_change;
  return j;
}

nlohmann::json ids_json(const std::vector<LabeledCommit>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& c : v) a.push_back(c.id);
  return a;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Commit-level vulnerability detection on code transformation graphs", "jitvd"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config, "pipeline configuration (JSON)");
  auto* seed_opt = app.add_option("--seed", seed_value, "seed; overrides the config seed");
  app.add_option("--out-dir", g.out_dir, "directory for written artifacts");

  std::function<void()> action;

  // graph
  std::string file;
  bool dot = false;
  auto* graph = app.add_subcommand("graph", "relational code graph of one MiniC file");
  graph->add_option("file", file)->required();
  graph->add_flag("--dot", dot, "print DOT instead of JSON");
  graph->callback([&] {
    action = [&] {
      const auto rcg = build_rcg(parse_source(read_text(file), file));
      const auto json = dump(rcg_to_json(rcg));
      const auto dot_text = rcg_to_dot(rcg);
      write_text(g, "rcg.json", json);
      write_text(g, "rcg.dot", dot_text);
      out << (dot ? dot_text : json);
    };
  });

  // ctg
  std::string before, after;
  bool no_trim = false;
  std::optional<int> hop_limit;
  auto* ctg = app.add_subcommand("ctg", "code transformation graph of a file pair");
  ctg->add_option("before", before)->required();
  ctg->add_option("after", after)->required();
  ctg->add_flag("--no-trim", no_trim, "keep the untrimmed graph");
  ctg->add_option("--hop-limit", hop_limit, "dependency hop limit for trimming");
  ctg->add_flag("--dot", dot, "print DOT instead of JSON");
  ctg->callback([&] {
    action = [&] {
      PipelineConfig cfg = load_config(g, false);
      if (hop_limit) cfg.hop_limit = hop_limit;
      const auto graph_ = file_ctg(read_text(before), read_text(after), cfg.trim && !no_trim, cfg.hop_limit, after);
      const auto json = dump(ctg_to_json(graph_));
      const auto dot_text = ctg_to_dot(graph_);
      write_text(g, "ctg.json", json);
      write_text(g, "ctg.dot", dot_text);
      out << (dot ? dot_text : json);
    };
  });

  // mine
  std::string corpus_dir;
  auto* mine = app.add_subcommand("mine", "label a corpus by dependency-aware blame");
  mine->add_option("corpus", corpus_dir)->required();
  mine->callback([&] {
    action = [&] {
      const PipelineConfig cfg = load_config(g, false);
      const auto corpus = load_corpus(corpus_dir);
      const auto labels = label_dataset(corpus, cfg.mining);
      const auto json = dump(labeling_to_json(labels));
      write_text(g, "labels.json", json);
      out << json;
    };
  });

  // synth
  SynthConfig synth_cfg;
  auto* synth = app.add_subcommand("synth", "write the synthetic benchmark corpus");
  synth->add_option("--projects", synth_cfg.projects);
  synth->add_option("--commits", synth_cfg.commits_per_project, "labeled commits per project");
  synth->callback([&] {
    action = [&] {
      if (g.out_dir.empty()) throw InputError("UsageError", "synth needs --out-dir");
      synth_cfg.seed = load_config(g, true).seed;
      const auto s = generate_synthetic(synth_cfg);
      write_synthetic(s, g.out_dir);
      long dangerous = 0, safe = 0;
      for (const auto& c : s.labels.commits) {
        dangerous += c.label == CommitLabel::Dangerous;
        safe += c.label == CommitLabel::Safe;
      }
      out << dump({{"commits", s.corpus.size()}, {"dangerous", dangerous}, {"safe", safe}});
    };
  });

  // train
  std::string labels_path;
  auto* train = app.add_subcommand("train", "train a model on the training side of the split");
  train->add_option("corpus", corpus_dir)->required();
  train->add_option("--labels", labels_path, "use these labels instead of mining");
  train->callback([&] {
    action = [&] {
      if (g.out_dir.empty()) throw InputError("UsageError", "train needs --out-dir");
      const PipelineConfig cfg = load_config(g, true);
      const auto corpus = load_corpus(corpus_dir);
      const auto labels = labels_for(corpus, labels_path, cfg);
      const Split split = split_for(labels, cfg);
      const Dataset data = build_dataset(corpus, split.train, cfg);
      neural::TrainHistory history;
      const auto model = train_model(data, cfg, &history);
      write_text(g, "checkpoint.json", neural::checkpoint_to_json(model).dump() + "\n");
      nlohmann::json h = nlohmann::json::array();
      for (const auto& e : history)
        h.push_back({{"epoch", e.epoch}, {"mean_loss", e.mean_loss}, {"train_accuracy", e.train_accuracy}});
      const auto json = dump({{"config", pipeline_config_to_json(cfg)},
                              {"history", std::move(h)},
                              {"train", ids_json(split.train)},
                              {"test", ids_json(split.test)},
                              {"warnings", data.warnings}});
      write_text(g, "history.json", json);
      out << json;
    };
  });

  // predict
  std::string checkpoint;
  auto* predict = app.add_subcommand("predict", "classify the change from one file version to another");
  predict->add_option("checkpoint", checkpoint)->required();
  predict->add_option("before", before)->required();
  predict->add_option("after", after)->required();
  predict->callback([&] {
    action = [&] {
      const PipelineConfig cfg = load_config(g, false);
      const auto model = neural::load_checkpoint(checkpoint);
      const auto graph_ = pair_graph(read_text(before), read_text(after), cfg, after);
      const auto json = dump(prediction_json(neural::predict_change(model, graph_.ctg)));
      write_text(g, "prediction.json", json);
      out << json;
    };
  });

  // explain
  std::string method;
  int top_k = 0;
  auto* explain_cmd = app.add_subcommand("explain", "rank the statements of a change by suspiciousness");
  explain_cmd->add_option("checkpoint", checkpoint)->required();
  explain_cmd->add_option("before", before)->required();
  explain_cmd->add_option("after", after)->required();
  explain_cmd->add_option("--method", method, "attention or occlusion");
  explain_cmd->add_option("--top-k", top_k, "statements in the text report");
  explain_cmd->callback([&] {
    action = [&] {
      PipelineConfig cfg = load_config(g, false);
      if (!method.empty()) cfg.explainer = explainer_config_from_json({{"method", method}}, cfg.explainer);
      if (top_k > 0) cfg.explainer.top_k = top_k;
      const auto model = neural::load_checkpoint(checkpoint);
      const auto graph_ = pair_graph(read_text(before), read_text(after), cfg, after);
      const auto ranking = explain(model, graph_.ctg, cfg.explainer);
      const auto report = ranking_report(ranking, cfg.explainer.top_k,
                                         [&graph_](const RankedStatement& s) { return describe_statement(graph_, s); });
      const auto json = dump({{"prediction", prediction_json(neural::predict_change(model, graph_.ctg))},
                              {"ranking", ranking_to_json(ranking)},
                              {"report", report}});
      write_text(g, "ranking.json", json);
      write_text(g, "report.txt", report);
      out << json;
    };
  });

  // eval
  std::string split_kind;
  bool curve = false;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test side of the split");
  eval->add_option("checkpoint", checkpoint)->required();
  eval->add_option("corpus", corpus_dir)->required();
  eval->add_option("--labels", labels_path, "use these labels instead of mining");
  eval->add_option("--split", split_kind, "dev-process or cross-project");
  eval->add_flag("--curve", curve, "retrain on 1..5 cumulative folds for the training-size curve");
  eval->callback([&] {
    action = [&] {
      PipelineConfig cfg = load_config(g, false);
      if (!split_kind.empty()) {
        if (split_kind == "dev-process")
          cfg.split = SplitKind::DevProcess;
        else if (split_kind == "cross-project")
          cfg.split = SplitKind::CrossProject;
        else
          throw ConfigError("--split must be dev-process or cross-project");
      }
      const auto model = neural::load_checkpoint(checkpoint);
      cfg.model = model.config();
      const auto corpus = load_corpus(corpus_dir);
      const auto labels = labels_for(corpus, labels_path, cfg);
      const Split split = split_for(labels, cfg);
      const Dataset train_data = build_dataset(corpus, split.train, cfg);
      const Dataset test_data = build_dataset(corpus, split.test, cfg);
      const auto report = evaluate(model, train_data, test_data, cfg, curve);
      const auto json = dump(report_to_json(report));
      write_text(g, "report.json", json);
      out << json;
    };
  });

  auto fail = [&err](const std::string& kind, const std::string& message, int code) {
    err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
    return code;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (seed_opt->count()) g.seed = seed_value;
    action();
    return kExitOk;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what(), kExitInput);
  } catch (const InputError& e) {
    return fail(e.kind(), e.what(), kExitInput);
  } catch (const Error& e) {
    return fail(e.kind(), e.what(), kExitInternal);
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), kExitInternal);
  }
}

}  // namespace jitvd::cli
