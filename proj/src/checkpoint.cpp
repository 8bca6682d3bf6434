#include "rlcg/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rlcg/csv.hpp"
#include "rlcg/io_error.hpp"

namespace rlcg {

namespace {

using nlohmann::json;

json hyper_json(const HyperParams& h) {
  return {{"alpha", format_double(h.alpha)},
          {"epsilon", format_double(h.epsilon)},
          {"gamma", format_double(h.gamma)},
          {"lr", format_double(h.lr)},
          {"batch_size", h.batch_size},
          {"replay_capacity", h.replay_capacity},
          {"k_candidates", h.k_candidates},
          {"hidden", h.hidden},
          {"rounds", h.rounds},
          {"target_sync_every", h.target_sync_every},
          {"updates_per_step", h.updates_per_step},
          {"max_iters", h.max_iters}};
}

[[noreturn]] void corrupt(const std::string& what) {
  throw CheckpointError(CheckpointErrorKind::CorruptPayload, "corrupt checkpoint: " + what);
}

double parse_f64(const json& j) {
  if (!j.is_string()) corrupt("tensor value is not a decimal string");
  const auto& s = j.get_ref<const std::string&>();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) corrupt("bad decimal '" + s + "'");
  return v;
}

HyperParams parse_hyper(const json& j) {
  HyperParams h;
  try {
    h.alpha = parse_f64(j.at("alpha"));
    h.epsilon = parse_f64(j.at("epsilon"));
    h.gamma = parse_f64(j.at("gamma"));
    h.lr = parse_f64(j.at("lr"));
    h.batch_size = j.at("batch_size").get<std::size_t>();
    h.replay_capacity = j.at("replay_capacity").get<std::size_t>();
    h.k_candidates = j.at("k_candidates").get<std::size_t>();
    h.hidden = j.at("hidden").get<std::size_t>();
    h.rounds = j.at("rounds").get<std::size_t>();
    h.target_sync_every = j.at("target_sync_every").get<std::size_t>();
    h.updates_per_step = j.at("updates_per_step").get<std::size_t>();
    h.max_iters = j.at("max_iters").get<int>();
  } catch (const json::exception& e) {
    corrupt(std::string("hyperparameters: ") + e.what());
  }
  return h;
}

}  // namespace

std::string save_checkpoint(const QNetworkParams& params, const HyperParams& hyper) {
  check_shape(params);
  if (hyper.hidden != params.shape.hidden || hyper.rounds != params.shape.rounds)
    throw CheckpointError(CheckpointErrorKind::ShapeMismatch, "hyperparameters disagree with network shape");
  const ParamLayout layout(params.shape);
  json tensors = json::array();
  auto emit = [&](const std::string& prefix, const std::vector<double>& source) {
    for (const auto& t : layout.tensors()) {
      json data = json::array();
      for (std::size_t i = 0; i < t.size(); ++i) data.push_back(format_double(source[t.offset + i]));
      tensors.push_back({{"name", prefix + t.name}, {"shape", {t.rows, t.cols}}, {"data", std::move(data)}});
    }
  };
  emit("", params.values);
  emit("adam_m/", params.adam_m);
  emit("adam_v/", params.adam_v);
  json doc = {{"hyper", hyper_json(hyper)}, {"step_count", params.step_count}, {"tensors", std::move(tensors)}};
  std::string out;
  out += kCheckpointMagic;
  out += ' ';
  out += kCheckpointVersion;
  out += '\n';
  out += doc.dump();
  out += '\n';
  return out;
}

Checkpoint load_checkpoint(std::string_view bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string_view::npos) corrupt("missing header line");
  const std::string_view header = bytes.substr(0, newline);
  if (header.substr(0, kCheckpointMagic.size()) != kCheckpointMagic || header.size() <= kCheckpointMagic.size() + 1 ||
      header[kCheckpointMagic.size()] != ' ')
    corrupt("bad magic");
  const std::string_view version = header.substr(kCheckpointMagic.size() + 1);
  if (version != kCheckpointVersion)
    throw CheckpointError(CheckpointErrorKind::VersionMismatch,
                          "unsupported checkpoint version '" + std::string(version) + "'");

  json doc;
  try {
    doc = json::parse(bytes.substr(newline + 1));
  } catch (const json::exception& e) {
    corrupt(e.what());
  }
  if (!doc.is_object() || !doc.contains("hyper") || !doc.contains("tensors") || !doc.contains("step_count"))
    corrupt("missing top-level fields");

  Checkpoint ckpt;
  ckpt.hyper = parse_hyper(doc["hyper"]);
  if (ckpt.hyper.hidden < 1 || ckpt.hyper.rounds < 1)
    throw CheckpointError(CheckpointErrorKind::ShapeMismatch, "hidden width and rounds must be positive");
  auto& params = ckpt.params;
  params.shape = {ckpt.hyper.hidden, ckpt.hyper.rounds};
  const ParamLayout layout(params.shape);
  params.values.assign(layout.total(), 0.0);
  params.adam_m.assign(layout.total(), 0.0);
  params.adam_v.assign(layout.total(), 0.0);
  try {
    params.step_count = doc["step_count"].get<std::int64_t>();
  } catch (const json::exception& e) {
    corrupt(e.what());
  }

  const auto& tensors = doc["tensors"];
  if (!tensors.is_array()) corrupt("tensors is not an array");
  const std::size_t expected = 3 * layout.tensors().size();
  if (tensors.size() != expected)
    throw CheckpointError(CheckpointErrorKind::ShapeMismatch, "expected " + std::to_string(expected) +
                                                                  " tensors, found " + std::to_string(tensors.size()));
  std::size_t index = 0;
  for (const auto* prefix : {"", "adam_m/", "adam_v/"}) {
    auto& dest = std::string_view(prefix).empty() ? params.values
                 : std::string_view(prefix) == "adam_m/" ? params.adam_m
                                                         : params.adam_v;
    for (const auto& spec : layout.tensors()) {
      const auto& t = tensors[index++];
      if (!t.is_object() || !t.contains("name") || !t.contains("shape") || !t.contains("data"))
        corrupt("tensor record missing fields");
      if (t["name"] != std::string(prefix) + spec.name)
        throw CheckpointError(CheckpointErrorKind::ShapeMismatch, "unexpected tensor " + t["name"].dump());
      const auto& shape = t["shape"];
      if (!shape.is_array() || shape.size() != 2 || shape[0] != spec.rows || shape[1] != spec.cols ||
          !t["data"].is_array() || t["data"].size() != spec.size())
        throw CheckpointError(CheckpointErrorKind::ShapeMismatch, "tensor " + spec.name + " has the wrong shape");
      for (std::size_t i = 0; i < spec.size(); ++i) dest[spec.offset + i] = parse_f64(t["data"][i]);
    }
  }
  return ckpt;
}

void write_checkpoint_file(const std::string& path, const QNetworkParams& params, const HyperParams& hyper) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << save_checkpoint(params, hyper);
}

Checkpoint read_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_checkpoint(buf.str());
}

}  // namespace rlcg
