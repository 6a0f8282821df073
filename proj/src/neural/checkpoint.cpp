#include "jitvd/neural/checkpoint.hpp"

#include <fstream>
#include <map>

namespace jitvd::neural {

namespace {
constexpr const char* kFormat = "jitvd-checkpoint";

class CheckpointError : public InputError {
 public:
  explicit CheckpointError(const std::string& m) : InputError("CheckpointError", m) {}
};
}  // namespace

nlohmann::json checkpoint_to_json(const JitVdModel& model) {
  nlohmann::json tensors = nlohmann::json::array();
  ModelParams::visit(model.params(), [&tensors](const std::string& name, const auto& t) {
    std::vector<double> data(t.data(), t.data() + t.size());
    tensors.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}, {"data", std::move(data)}});
  });
  return {{"format", kFormat},
          {"version", kCheckpointVersion},
          {"config", hyperparams_to_json(model.config())},
          {"vocab", model.vocab().tokens()},
          {"tensors", std::move(tensors)}};
}

JitVdModel checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != kFormat) throw CheckpointError("not a checkpoint file");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw CheckpointError("unsupported checkpoint version " + j.at("version").dump());
    const HyperParams config = hyperparams_from_json(j.at("config"));
    Vocab vocab = Vocab::from_tokens(j.at("vocab").get<std::vector<std::string>>());

    std::map<std::string, const nlohmann::json*> by_name;
    for (const auto& t : j.at("tensors")) by_name[t.at("name").get<std::string>()] = &t;

    ModelParams params = JitVdModel::create(config, vocab).params();
    std::size_t used = 0;
    ModelParams::visit(params, [&](const std::string& name, auto& t) {
      auto it = by_name.find(name);
      if (it == by_name.end()) throw CheckpointError("missing tensor " + name);
      const auto& entry = *it->second;
      if (entry.at("rows").get<Eigen::Index>() != t.rows() || entry.at("cols").get<Eigen::Index>() != t.cols())
        throw CheckpointError("tensor " + name + " has the wrong shape");
      const auto data = entry.at("data").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(data.size()) != t.size())
        throw CheckpointError("tensor " + name + " has the wrong length");
      std::copy(data.begin(), data.end(), t.data());
      ++used;
    });
    if (used != by_name.size()) throw CheckpointError("checkpoint holds unexpected tensors");
    return model_from_parts(config, std::move(vocab), std::move(params));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const JitVdModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("IoError", "cannot write " + path.string());
  out << checkpoint_to_json(model).dump() << '\n';
}

JitVdModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("IoError", "cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace jitvd::neural
