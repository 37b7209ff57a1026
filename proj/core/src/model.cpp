#include "hsd/model.hpp"

#include "hsd/error.hpp"
#include "hsd/random.hpp"

namespace hsd {

using ad::Matrix;
using ad::Tape;
using ad::Var;

Label argmax_label(const ad::Vector& probs) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < probs.size(); ++i) {
    if (probs(i) > probs(best)) best = i;
  }
  return static_cast<Label>(best);
}

TextEncoderConfig text_encoder_config(const ModelConfig& c, int word_vocab, int char_vocab) {
  TextEncoderConfig t;
  t.word_vocab = word_vocab;
  t.char_vocab = char_vocab;
  t.word_dim = c.word_dim;
  t.char_dim = c.char_dim;
  t.char_attention_dim = c.char_attention_dim;
  t.input_dim = c.input_dim;
  t.hidden_dim = c.hidden_dim;
  t.attention_dim = c.attention_dim;
  return t;
}

SocialEncoderConfig social_encoder_config(const ModelConfig& c, int follow_dim) {
  return SocialEncoderConfig{follow_dim, c.social_hidden_dim, c.social_dim};
}

FusionConfig fusion_config(const ModelConfig& c) {
  FusionConfig f;
  f.text_dim = c.hidden_dim;
  f.cultural_dim = c.cultural_dim;
  f.social_dim = c.social_dim;
  f.fused_dim = c.fused_dim;
  f.attention_dim = c.fusion_attention_dim;
  f.text_only = c.text_only;
  return f;
}

HateSpeechModel::HateSpeechModel(const ModelConfig& config, Vocabulary words, Vocabulary chars, int follow_dim,
                                 std::uint64_t seed)
    : config_(config), words_(std::move(words)), chars_(std::move(chars)), follow_dim_(follow_dim) {
  if (follow_dim < 1) throw Error("follow vector dimension must be positive");
  Rng rng(derive_seed(seed, "model-init"));
  TextEncoder(text_encoder_config(config_, words_.size(), chars_.size()), params_, rng);
  SocialEncoder(social_encoder_config(config_, follow_dim_), params_, rng);
  FusionLayer(fusion_config(config_), params_, rng);
  bind();
}

HateSpeechModel::HateSpeechModel(const ModelConfig& config, Vocabulary words, Vocabulary chars, int follow_dim,
                                 ad::ParameterSet params)
    : config_(config),
      words_(std::move(words)),
      chars_(std::move(chars)),
      follow_dim_(follow_dim),
      params_(std::move(params)) {
  bind();
}

void HateSpeechModel::bind() {
  text_.emplace(text_encoder_config(config_, words_.size(), chars_.size()), params_);
  social_.emplace(social_encoder_config(config_, follow_dim_), params_);
  fusion_.emplace(fusion_config(config_), params_);
}

ExampleInput HateSpeechModel::prepare(const TweetRecord& record, const FollowVectorTable& follows,
                                      const CulturalProvider& provider) const {
  if (static_cast<int>(follows.dimension()) != follow_dim_) {
    throw DimensionError("follow vectors have length " + std::to_string(follows.dimension()) +
                         ", model expects " + std::to_string(follow_dim_));
  }
  if (provider.dimension() != config_.cultural_dim) {
    throw DimensionError("cultural provider dimension " + std::to_string(provider.dimension()) +
                         " does not match the model's " + std::to_string(config_.cultural_dim));
  }
  ExampleInput in;
  in.id = record.id;
  in.label = record.label;
  const TokenizedText tokens = tokenize(record.text);
  in.text = encode_tokens(tokens, words_, chars_, config_.max_words);
  in.tokens.assign(tokens.words.begin(), tokens.words.begin() + static_cast<std::ptrdiff_t>(in.text.word_ids.size()));
  in.follow = to_dense(follows.lookup(record.author_id));
  in.cultural = encode_cultural(record.author_id, provider);
  return in;
}

ForwardPass HateSpeechModel::forward(Tape& tape, const ExampleInput& input, ForwardOptions options) const {
  ForwardPass pass;
  pass.text = text_->encode(tape, input.text);
  if (options.zero_cultural) {
    pass.cultural = tape.constant(Matrix::Zero(config_.cultural_dim, 1));
  } else {
    pass.cultural = tape.constant(input.cultural);
  }
  if (options.zero_social || config_.text_only) {
    pass.social = tape.constant(Matrix::Zero(config_.social_dim, 1));
  } else {
    pass.social = social_->encode(tape, tape.constant(input.follow));
  }
  pass.fusion = fusion_->fuse(tape, pass.text.summary, pass.cultural, pass.social);
  pass.logits = fusion_->logits(tape, pass.fusion.fused);
  pass.probs = ad::softmax(pass.logits);
  return pass;
}

Prediction HateSpeechModel::predict(const ExampleInput& input, ForwardOptions options) const {
  Tape tape(params_);
  const ForwardPass pass = forward(tape, input, options);
  Prediction p;
  p.probs = pass.probs.value();
  p.predicted = argmax_label(p.probs);
  p.alpha = pass.text.alpha.value();
  p.beta = pass.fusion.beta.value();
  p.fused = pass.fusion.fused.value();
  return p;
}

}  // namespace hsd
