#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hsd/autodiff.hpp"
#include "hsd/corpus.hpp"
#include "hsd/encoders.hpp"
#include "hsd/fusion.hpp"
#include "hsd/hategraph.hpp"
#include "hsd/text.hpp"

namespace hsd {

struct ModelConfig {
  int word_dim = 64;
  int char_dim = 16;
  int char_attention_dim = 16;
  int input_dim = 64;
  int hidden_dim = 64;
  int attention_dim = 32;
  int cultural_dim = 16;
  int social_hidden_dim = 32;
  int social_dim = 16;
  int fused_dim = 64;
  int fusion_attention_dim = 32;
  int max_words = 64;
  int min_word_count = 2;
  bool text_only = false;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Model-ready view of one record.
struct ExampleInput {
  std::string id;
  std::vector<std::string> tokens;  // surface words aligned with text.word_ids
  EncodedText text;
  ad::Vector follow;    // dense binary follow vector
  ad::Vector cultural;  // provider output
  Label label = Label::none;
};

struct ForwardOptions {
  bool zero_cultural = false;
  bool zero_social = false;
};

struct ForwardPass {
  EncoderOutput text;
  ad::Var cultural;
  ad::Var social;
  FusionOutput fusion;
  ad::Var logits;
  ad::Var probs;
};

/// Plain-value result of an inference pass.
struct Prediction {
  ad::Vector probs;
  Label predicted = Label::none;
  ad::Vector alpha;
  ad::Vector beta;
  ad::Vector fused;
};

Label argmax_label(const ad::Vector& probs);

/// f(x) = g(P(text), Q(author), R(author)): text encoder, cultural provider
/// vector, social encoder over the follow vector, and attention fusion with
/// a softmax head.
class HateSpeechModel {
 public:
  HateSpeechModel(const ModelConfig& config, Vocabulary words, Vocabulary chars, int follow_dim,
                  std::uint64_t seed);

  /// Rebuild around existing parameters (checkpoint restore).
  HateSpeechModel(const ModelConfig& config, Vocabulary words, Vocabulary chars, int follow_dim,
                  ad::ParameterSet params);

  const ModelConfig& config() const { return config_; }
  const Vocabulary& words() const { return words_; }
  const Vocabulary& chars() const { return chars_; }
  int follow_dim() const { return follow_dim_; }

  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }

  ExampleInput prepare(const TweetRecord& record, const FollowVectorTable& follows,
                       const CulturalProvider& provider) const;

  ForwardPass forward(ad::Tape& tape, const ExampleInput& input, ForwardOptions options = {}) const;

  Prediction predict(const ExampleInput& input, ForwardOptions options = {}) const;

 private:
  void bind();

  ModelConfig config_;
  Vocabulary words_;
  Vocabulary chars_;
  int follow_dim_;
  ad::ParameterSet params_;
  std::optional<TextEncoder> text_;
  std::optional<SocialEncoder> social_;
  std::optional<FusionLayer> fusion_;
};

TextEncoderConfig text_encoder_config(const ModelConfig& c, int word_vocab, int char_vocab);
SocialEncoderConfig social_encoder_config(const ModelConfig& c, int follow_dim);
FusionConfig fusion_config(const ModelConfig& c);

}  // namespace hsd
