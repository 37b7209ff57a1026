#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hsd/autodiff.hpp"
#include "hsd/hategraph.hpp"
#include "hsd/text.hpp"

namespace hsd {

class Rng;

/// Token and character rows for one text, plus word spans over the
/// character stream.
struct EncodedText {
  std::vector<int> word_ids;
  std::vector<int> char_ids;
  std::vector<std::pair<int, int>> spans;
};

/// Map a tokenized text onto vocabulary rows, keeping at most `max_words`
/// leading words (0 = no cap).
EncodedText encode_tokens(const TokenizedText& tokens, const Vocabulary& words, const Vocabulary& chars,
                          int max_words = 0);

struct TextEncoderConfig {
  int word_vocab = 2;
  int char_vocab = 2;
  int word_dim = 64;
  int char_dim = 16;
  int char_attention_dim = 16;
  int input_dim = 64;  // width of the projected [word; c_in; c_out] input
  int hidden_dim = 64;  // both directions together; must be even
  int attention_dim = 32;
};

struct CharContext {
  ad::Var c_in;
  ad::Var c_out;
  ad::Var alpha_in;   // weights over the span, empty Var when unused
  ad::Var alpha_out;  // weights over the rest, empty Var when the rest is empty
};

struct EncoderOutput {
  ad::Var hidden;   // hidden_dim × n, column t is the state of word t
  ad::Var summary;  // hidden_dim × 1
  ad::Var alpha;    // n × 1 token attention
  std::vector<CharContext> char_contexts;
};

/// Character-enhanced word encoder: per word, attention over the characters
/// inside and outside its span (queried by the word embedding) is
/// concatenated with the word embedding, projected, run through a
/// bidirectional GRU and summarized by additive self-attention.
class TextEncoder {
 public:
  /// Registers parameters (prefixed "text.") in `params`.
  TextEncoder(const TextEncoderConfig& config, ad::ParameterSet& params, Rng& rng);

  /// Bind to parameters already present in `params`.
  TextEncoder(const TextEncoderConfig& config, const ad::ParameterSet& params);

  const TextEncoderConfig& config() const { return config_; }

  EncoderOutput encode(ad::Tape& tape, const EncodedText& text) const;

  /// Attention summaries of the characters inside and outside `span`, scored
  /// additively against `query`. `chars` is char_dim × n'.
  CharContext char_context(ad::Tape& tape, ad::Var chars, std::pair<int, int> span, ad::Var query) const;

 private:
  struct Gru {
    int w, u, b;
  };
  struct CharAttention {
    int key, query, score;
  };

  void bind(const ad::ParameterSet& params);
  ad::Var attend_chars(ad::Tape& tape, ad::Var chars, const std::vector<int>& cols, ad::Var query,
                       const CharAttention& att, ad::Var* weights) const;
  std::vector<ad::Var> run_gru(ad::Tape& tape, ad::Var inputs, const Gru& gru, bool reverse) const;

  TextEncoderConfig config_;
  int word_table_ = -1, char_table_ = -1;
  CharAttention inside_{}, outside_{};
  int proj_w_ = -1, proj_b_ = -1;
  Gru forward_{}, backward_{};
  int att_w_ = -1, att_b_ = -1, att_v_ = -1;
};

struct SocialEncoderConfig {
  int input_dim = 1;  // |HateAccountSet|
  int hidden_dim = 32;
  int output_dim = 16;
};

/// Two affine layers with tanh between, mapping a follow vector to a dense
/// social vector.
class SocialEncoder {
 public:
  SocialEncoder(const SocialEncoderConfig& config, ad::ParameterSet& params, Rng& rng);
  SocialEncoder(const SocialEncoderConfig& config, const ad::ParameterSet& params);

  const SocialEncoderConfig& config() const { return config_; }
  ad::Var encode(ad::Tape& tape, ad::Var follow) const;

 private:
  SocialEncoderConfig config_;
  int w1_ = -1, b1_ = -1, w2_ = -1, b2_ = -1;
};

ad::Vector to_dense(const BinaryFollowVector& v);

/// Source of per-author cultural context vectors. Implementations must be
/// deterministic per author id and defined for unknown authors.
class CulturalProvider {
 public:
  virtual ~CulturalProvider() = default;
  virtual int dimension() const = 0;
  virtual ad::Vector embed(const std::string& author_id) const = 0;
};

/// Seeded hash of the author id expanded to values in [-1, 1]. Authors outside
/// the known set receive the zero vector.
class StubProvider final : public CulturalProvider {
 public:
  StubProvider(int dimension, std::uint64_t seed, std::set<std::string> known_authors);

  int dimension() const override { return dimension_; }
  ad::Vector embed(const std::string& author_id) const override;
  const ad::Vector& unknown_vector() const { return unknown_; }

 private:
  int dimension_;
  std::uint64_t seed_;
  std::set<std::string> known_;
  ad::Vector unknown_;
};

/// Community-informative vectors for synthetic corpora: members of planted
/// community c share a centroid plus per-author noise, everyone else is
/// noise only.
class SynthProvider final : public CulturalProvider {
 public:
  SynthProvider(int dimension, std::uint64_t seed, std::map<std::string, int> communities,
                double signal = 0.8, double noise = 0.5);

  int dimension() const override { return dimension_; }
  ad::Vector embed(const std::string& author_id) const override;

 private:
  int dimension_;
  std::uint64_t seed_;
  std::map<std::string, int> communities_;
  double signal_;
  double noise_;
  std::vector<ad::Vector> centroids_;
};

/// provider.embed with the author id attached to any failure.
ad::Vector encode_cultural(const std::string& author_id, const CulturalProvider& provider);

ad::Matrix xavier(int rows, int cols, Rng& rng);

}  // namespace hsd
