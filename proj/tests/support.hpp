#pragma once

#include <string>
#include <vector>

#include "hsd/model.hpp"
#include "hsd/random.hpp"
#include "hsd/text.hpp"

namespace testing_support {

/// Dimensions small enough for exhaustive finite differences.
inline hsd::ModelConfig toy_config(bool text_only = false) {
  hsd::ModelConfig c;
  c.word_dim = 6;
  c.char_dim = 4;
  c.char_attention_dim = 4;
  c.input_dim = 6;
  c.hidden_dim = 8;
  c.attention_dim = 5;
  c.cultural_dim = 3;
  c.social_hidden_dim = 4;
  c.social_dim = 3;
  c.fused_dim = 6;
  c.fusion_attention_dim = 4;
  c.max_words = 6;
  c.min_word_count = 1;
  c.text_only = text_only;
  return c;
}

inline const std::vector<std::string>& toy_words() {
  static const std::vector<std::string> words{"good", "boy", "bad", "day", "zap", "qux", "sun", "ok"};
  return words;
}

inline std::pair<hsd::Vocabulary, hsd::Vocabulary> toy_vocabularies() {
  std::vector<hsd::TokenizedText> texts;
  for (const auto& w : toy_words()) texts.push_back(hsd::tokenize(w));
  return hsd::build_vocabularies(texts, 1);
}

/// Random sentence of 1..max_words toy words (occasionally an unseen word).
inline std::string random_sentence(hsd::Rng& rng, int max_words) {
  const int n = static_cast<int>(rng.between(1, max_words));
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += rng.bernoulli(0.15) ? std::string("unk") : toy_words()[rng.index(toy_words().size())];
  }
  return out;
}

inline hsd::ExampleInput random_input(const hsd::HateSpeechModel& model, hsd::Rng& rng, int max_words) {
  hsd::ExampleInput in;
  in.id = "x";
  const hsd::TokenizedText tokens = hsd::tokenize(random_sentence(rng, max_words));
  in.text = hsd::encode_tokens(tokens, model.words(), model.chars(), model.config().max_words);
  in.tokens = tokens.words;
  in.follow = hsd::ad::Vector(model.follow_dim());
  for (int i = 0; i < model.follow_dim(); ++i) in.follow(i) = rng.bernoulli(0.4) ? 1.0 : 0.0;
  in.cultural = hsd::ad::Vector(model.config().cultural_dim);
  for (int i = 0; i < model.config().cultural_dim; ++i) in.cultural(i) = rng.uniform(-1.0, 1.0);
  in.label = static_cast<hsd::Label>(rng.index(3));
  return in;
}

}  // namespace testing_support
