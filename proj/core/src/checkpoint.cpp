#include "netfuzz/checkpoint.hpp"

#include <cstring>

#include <nlohmann/json.hpp>

#include "netfuzz/error.hpp"
#include "netfuzz/util.hpp"

namespace netfuzz {

namespace {

constexpr char kMagic[8] = {'N', 'F', 'C', 'K', 'P', 'T', '0', '1'};

void put_u32(std::string& out, uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

void put_u64(std::string& out, uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

struct Reader {
  const std::string& bytes;
  size_t pos = 0;

  void need(size_t n) const {
    if (pos + n > bytes.size())
      throw Error(Error::Kind::BadFormat, "checkpoint truncated");
  }
  uint32_t u32() {
    need(4);
    uint32_t v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v;
    std::memcpy(&v, bytes.data() + pos, 8);
    pos += 8;
    return v;
  }
  std::string str(size_t n) {
    need(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

std::string checkpoint_to_bytes(const Checkpoint& c) {
  std::string out(kMagic, sizeof kMagic);
  put_u32(out, static_cast<uint32_t>(c.tensors.size()));
  for (const auto& [name, t] : c.tensors) {
    put_u32(out, static_cast<uint32_t>(name.size()));
    out += name;
    put_u32(out, t.rows);
    put_u32(out, t.cols);
    const size_t bytes = t.data.size() * sizeof(double);
    const size_t at = out.size();
    out.resize(at + bytes);
    std::memcpy(out.data() + at, t.data.data(), bytes);
  }
  put_u32(out, static_cast<uint32_t>(c.meta.size()));
  for (const auto& [key, v] : c.meta) {
    put_u32(out, static_cast<uint32_t>(key.size()));
    out += key;
    put_u64(out, v);
  }
  return out;
}

Checkpoint checkpoint_from_bytes(const std::string& bytes) {
  Reader r{bytes};
  if (r.str(sizeof kMagic) != std::string(kMagic, sizeof kMagic))
    throw Error(Error::Kind::BadFormat, "not a checkpoint file");
  Checkpoint c;
  const uint32_t ntensors = r.u32();
  for (uint32_t i = 0; i < ntensors; ++i) {
    const std::string name = r.str(r.u32());
    Tensor2 t;
    t.rows = r.u32();
    t.cols = r.u32();
    const size_t count = size_t(t.rows) * t.cols;
    r.need(count * sizeof(double));
    t.data.resize(count);
    std::memcpy(t.data.data(), bytes.data() + r.pos, count * sizeof(double));
    r.pos += count * sizeof(double);
    c.tensors.emplace_back(name, std::move(t));
  }
  const uint32_t nmeta = r.u32();
  for (uint32_t i = 0; i < nmeta; ++i) {
    const std::string key = r.str(r.u32());
    c.meta[key] = r.u64();
  }
  return c;
}

std::string model_config_json(const ModelConfig& c) {
  nlohmann::json j;
  j["gcn_dims"] = c.gcn_dims;
  j["lstm_hidden"] = c.lstm_hidden;
  j["classes"] = c.classes;
  j["dropout"] = c.dropout;
  j["learning_rate"] = c.learning_rate;
  j["rms_decay"] = c.rms_decay;
  j["rms_epsilon"] = c.rms_epsilon;
  j["batch_size"] = c.batch_size;
  j["max_epochs"] = c.max_epochs;
  j["patience"] = c.patience;
  j["min_delta"] = c.min_delta;
  j["attention"] = c.attention;
  return j.dump(2) + "\n";
}

ModelConfig model_config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw Error(Error::Kind::ConfigInvalid, "model config is not valid JSON");
  static const char* known[] = {"gcn_dims",     "lstm_hidden", "classes",
                                "dropout",      "learning_rate", "rms_decay",
                                "rms_epsilon",  "batch_size",  "max_epochs",
                                "patience",     "min_delta",   "attention"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok |= key == k;
    if (!ok)
      throw Error(Error::Kind::ConfigInvalid,
                  "unknown model config key \"" + key + "\"");
  }
  ModelConfig c;
  if (j.contains("gcn_dims")) c.gcn_dims = j["gcn_dims"].get<std::vector<uint32_t>>();
  if (j.contains("lstm_hidden")) c.lstm_hidden = j["lstm_hidden"].get<uint32_t>();
  if (j.contains("classes")) c.classes = j["classes"].get<uint32_t>();
  if (j.contains("dropout")) c.dropout = j["dropout"].get<double>();
  if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("rms_decay")) c.rms_decay = j["rms_decay"].get<double>();
  if (j.contains("rms_epsilon")) c.rms_epsilon = j["rms_epsilon"].get<double>();
  if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<uint32_t>();
  if (j.contains("max_epochs")) c.max_epochs = j["max_epochs"].get<uint32_t>();
  if (j.contains("patience")) c.patience = j["patience"].get<uint32_t>();
  if (j.contains("min_delta")) c.min_delta = j["min_delta"].get<double>();
  if (j.contains("attention")) c.attention = j["attention"].get<bool>();
  return c;
}

void save_model(const GrnnModel& m, const std::string& path) {
  Checkpoint c;
  const auto params = m.parameters();
  const auto names = m.parameter_names();
  for (size_t i = 0; i < params.size(); ++i)
    c.tensors.emplace_back(names[i], *params[i]);
  atomic_write_file(path, checkpoint_to_bytes(c));
  atomic_write_file(path + ".json", model_config_json(m.config));
}

GrnnModel load_model(const std::string& path) {
  const ModelConfig config = model_config_from_json(read_file(path + ".json"));
  const Checkpoint c = checkpoint_from_bytes(read_file(path));

  // Build the skeleton with a throwaway rng, then overwrite every tensor.
  Rng rng(0);
  GrnnModel m = init_model(config, rng);
  const auto params = m.parameters();
  const auto names = m.parameter_names();
  if (c.tensors.size() != params.size())
    throw Error(Error::Kind::BadFormat,
                "checkpoint tensor count does not match the config");
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& [name, t] = c.tensors[i];
    if (name != names[i] || t.rows != params[i]->rows ||
        t.cols != params[i]->cols)
      throw Error(Error::Kind::BadFormat,
                  "checkpoint tensor " + name + " does not match the config");
    *params[i] = t;
  }
  return m;
}

}  // namespace netfuzz
