#include "hsd/checkpoint.hpp"

#include <bit>
#include <cstring>

#include <json.hpp>

#include "hsd/error.hpp"
#include "hsd/fileio.hpp"

namespace hsd {

namespace {

constexpr char kMagic[8] = {'H', 'S', 'D', 'C', 'K', 'P', 'T', '\0'};

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(std::string_view bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw Error("checkpoint truncated");
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

nlohmann::ordered_json model_config_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["word_dim"] = c.word_dim;
  j["char_dim"] = c.char_dim;
  j["char_attention_dim"] = c.char_attention_dim;
  j["input_dim"] = c.input_dim;
  j["hidden_dim"] = c.hidden_dim;
  j["attention_dim"] = c.attention_dim;
  j["cultural_dim"] = c.cultural_dim;
  j["social_hidden_dim"] = c.social_hidden_dim;
  j["social_dim"] = c.social_dim;
  j["fused_dim"] = c.fused_dim;
  j["fusion_attention_dim"] = c.fusion_attention_dim;
  j["max_words"] = c.max_words;
  j["min_word_count"] = c.min_word_count;
  j["text_only"] = c.text_only;
  return j;
}

ModelConfig model_config_from(const nlohmann::json& j) {
  ModelConfig c;
  c.word_dim = j.at("word_dim");
  c.char_dim = j.at("char_dim");
  c.char_attention_dim = j.at("char_attention_dim");
  c.input_dim = j.at("input_dim");
  c.hidden_dim = j.at("hidden_dim");
  c.attention_dim = j.at("attention_dim");
  c.cultural_dim = j.at("cultural_dim");
  c.social_hidden_dim = j.at("social_hidden_dim");
  c.social_dim = j.at("social_dim");
  c.fused_dim = j.at("fused_dim");
  c.fusion_attention_dim = j.at("fusion_attention_dim");
  c.max_words = j.at("max_words");
  c.min_word_count = j.at("min_word_count");
  c.text_only = j.at("text_only");
  return c;
}

nlohmann::ordered_json train_config_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["seed"] = c.seed;
  j["early_stop_patience"] = c.early_stop_patience;
  j["class_weights"] = c.class_weights ? nlohmann::ordered_json(*c.class_weights) : nlohmann::ordered_json();
  j["text_only"] = c.text_only;
  j["grad_clip"] = c.grad_clip;
  return j;
}

TrainConfig train_config_from(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs");
  c.batch_size = j.at("batch_size");
  c.learning_rate = j.at("learning_rate");
  c.seed = j.at("seed");
  c.early_stop_patience = j.at("early_stop_patience");
  if (!j.at("class_weights").is_null()) c.class_weights = j.at("class_weights").get<std::array<double, kNumClasses>>();
  c.text_only = j.at("text_only");
  c.grad_clip = j.at("grad_clip");
  return c;
}

}  // namespace

std::string serialize_checkpoint(const TrainedModel& trained) {
  const HateSpeechModel& model = trained.model;
  const ad::ParameterSet& params = model.params();
  nlohmann::ordered_json header;
  header["format"] = "hsd-checkpoint";
  header["model_config"] = model_config_json(model.config());
  header["train_config"] = train_config_json(trained.train_config);
  header["follow_dim"] = model.follow_dim();
  header["best_epoch"] = trained.best_epoch;
  nlohmann::ordered_json history = nlohmann::ordered_json::array();
  for (const auto& h : trained.history) history.push_back({h.epoch, h.train_loss, h.val_f1_hate});
  header["history"] = history;
  header["words"] = model.words().tokens();
  header["chars"] = model.chars().tokens();
  nlohmann::ordered_json shapes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& v = params.value(static_cast<int>(i));
    shapes.push_back({{"name", params.name(static_cast<int>(i))}, {"rows", v.rows()}, {"cols", v.cols()}});
  }
  header["params"] = shapes;
  const std::string header_text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, header_text.size());
  out += header_text;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& v = params.value(static_cast<int>(i));
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      for (Eigen::Index c = 0; c < v.cols(); ++c) put<double>(out, v(r, c));
    }
  }
  return out;
}

TrainedModel deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error("not a checkpoint archive");
  }
  std::size_t pos = sizeof kMagic;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion) throw Error("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = get<std::uint64_t>(bytes, pos);
  if (pos + header_len > bytes.size()) throw Error("checkpoint truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(pos, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("checkpoint header: ") + e.what());
  }
  pos += header_len;

  try {
    ad::ParameterSet params;
    for (const auto& p : header.at("params")) {
      const Eigen::Index rows = p.at("rows");
      const Eigen::Index cols = p.at("cols");
      ad::Matrix m(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get<double>(bytes, pos);
      }
      params.add(p.at("name").get<std::string>(), std::move(m));
    }
    if (pos != bytes.size()) throw Error("checkpoint has trailing bytes");

    Vocabulary words;
    for (const auto& t : header.at("words")) words.add(t.get<std::string>());
    Vocabulary chars;
    for (const auto& t : header.at("chars")) chars.add(t.get<std::string>());

    TrainedModel out{HateSpeechModel(model_config_from(header.at("model_config")), std::move(words),
                                     std::move(chars), header.at("follow_dim").get<int>(), std::move(params)),
                     train_config_from(header.at("train_config")), {}, header.at("best_epoch").get<int>()};
    for (const auto& h : header.at("history")) {
      out.history.push_back(EpochRecord{h.at(0).get<int>(), h.at(1).get<double>(), h.at(2).get<double>()});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("checkpoint header: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const TrainedModel& trained) {
  write_file_atomic(path, serialize_checkpoint(trained));
}

TrainedModel load_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(read_file(path)); }

}  // namespace hsd
