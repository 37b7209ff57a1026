#include "hsd/encoders.hpp"

#include <array>
#include <cmath>

#include "hsd/error.hpp"
#include "hsd/random.hpp"

namespace hsd {

using ad::Matrix;
using ad::Tape;
using ad::Var;

EncodedText encode_tokens(const TokenizedText& tokens, const Vocabulary& words, const Vocabulary& chars,
                          int max_words) {
  EncodedText out;
  std::size_t n = tokens.words.size();
  if (max_words > 0) n = std::min(n, static_cast<std::size_t>(max_words));
  out.word_ids.reserve(n);
  for (std::size_t t = 0; t < n; ++t) out.word_ids.push_back(words.lookup(tokens.words[t]));
  const int last = tokens.spans[n - 1].second;
  out.char_ids.reserve(static_cast<std::size_t>(last) + 1);
  for (int c = 0; c <= last; ++c) out.char_ids.push_back(chars.lookup(char_token(tokens.chars[static_cast<std::size_t>(c)])));
  out.spans.assign(tokens.spans.begin(), tokens.spans.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

Matrix xavier(int rows, int cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-limit, limit);
  }
  return m;
}

namespace {

Matrix embedding_table(int vocab, int dim, Rng& rng) {
  Matrix m(vocab, dim);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-0.1, 0.1);
  }
  m.row(0).setZero();
  return m;
}

void check_dims(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError("parameter " + name + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         ", config expects " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

TextEncoder::TextEncoder(const TextEncoderConfig& c, ad::ParameterSet& params, Rng& rng) : config_(c) {
  if (c.hidden_dim % 2 != 0) throw Error("text hidden_dim must be even");
  const int h = c.hidden_dim / 2;
  params.add("text.word_emb", embedding_table(c.word_vocab, c.word_dim, rng));
  params.add("text.char_emb", embedding_table(c.char_vocab, c.char_dim, rng));
  for (const char* side : {"in", "out"}) {
    const std::string p = std::string("text.char_") + side;
    params.add(p + ".key", xavier(c.char_attention_dim, c.char_dim, rng));
    params.add(p + ".query", xavier(c.char_attention_dim, c.word_dim, rng));
    params.add(p + ".score", xavier(1, c.char_attention_dim, rng));
  }
  params.add("text.proj.w", xavier(c.input_dim, c.word_dim + 2 * c.char_dim, rng));
  params.add("text.proj.b", Matrix::Zero(c.input_dim, 1));
  for (const char* dir : {"fwd", "bwd"}) {
    const std::string p = std::string("text.gru_") + dir;
    params.add(p + ".w", xavier(3 * h, c.input_dim, rng));
    params.add(p + ".u", xavier(3 * h, h, rng));
    params.add(p + ".b", Matrix::Zero(3 * h, 1));
  }
  params.add("text.att.w", xavier(c.attention_dim, c.hidden_dim, rng));
  params.add("text.att.b", Matrix::Zero(c.attention_dim, 1));
  params.add("text.att.v", xavier(1, c.attention_dim, rng));
  bind(params);
}

TextEncoder::TextEncoder(const TextEncoderConfig& c, const ad::ParameterSet& params) : config_(c) {
  if (c.hidden_dim % 2 != 0) throw Error("text hidden_dim must be even");
  bind(params);
}

void TextEncoder::bind(const ad::ParameterSet& params) {
  const auto& c = config_;
  const int h = c.hidden_dim / 2;
  auto get = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    const int i = params.index_of(name);
    check_dims(params.value(i), rows, cols, name);
    return i;
  };
  word_table_ = get("text.word_emb", c.word_vocab, c.word_dim);
  char_table_ = get("text.char_emb", c.char_vocab, c.char_dim);
  for (auto [side, att] : {std::pair{"in", &inside_}, std::pair{"out", &outside_}}) {
    const std::string p = std::string("text.char_") + side;
    att->key = get(p + ".key", c.char_attention_dim, c.char_dim);
    att->query = get(p + ".query", c.char_attention_dim, c.word_dim);
    att->score = get(p + ".score", 1, c.char_attention_dim);
  }
  proj_w_ = get("text.proj.w", c.input_dim, c.word_dim + 2 * c.char_dim);
  proj_b_ = get("text.proj.b", c.input_dim, 1);
  for (auto [dir, gru] : {std::pair{"fwd", &forward_}, std::pair{"bwd", &backward_}}) {
    const std::string p = std::string("text.gru_") + dir;
    gru->w = get(p + ".w", 3 * h, c.input_dim);
    gru->u = get(p + ".u", 3 * h, h);
    gru->b = get(p + ".b", 3 * h, 1);
  }
  att_w_ = get("text.att.w", c.attention_dim, c.hidden_dim);
  att_b_ = get("text.att.b", c.attention_dim, 1);
  att_v_ = get("text.att.v", 1, c.attention_dim);
}

Var TextEncoder::attend_chars(Tape& tape, Var chars, const std::vector<int>& cols, Var query,
                              const CharAttention& att, Var* weights) const {
  const Var keys = ad::select_columns(chars, cols);
  const Var projected = ad::matmul(tape.param(att.key), keys);
  const Var q = ad::matmul(tape.param(att.query), query);
  const Var scores = ad::transpose(ad::matmul(tape.param(att.score), ad::tanh(ad::add(projected, q))));
  const Var w = ad::softmax(scores);
  *weights = w;
  return ad::matmul(keys, w);
}

CharContext TextEncoder::char_context(Tape& tape, Var chars, std::pair<int, int> span, Var query) const {
  const int n_chars = static_cast<int>(chars.cols());
  const auto [p, q] = span;
  if (p < 0 || q < p || q >= n_chars) {
    throw Error("char_context: span (" + std::to_string(p) + "," + std::to_string(q) + ") invalid for " +
                std::to_string(n_chars) + " characters");
  }
  if (chars.rows() != config_.char_dim || query.rows() != config_.word_dim || query.cols() != 1) {
    throw DimensionError("char_context: input dimensions do not match the encoder");
  }
  std::vector<int> inside;
  std::vector<int> outside;
  for (int i = 0; i < n_chars; ++i) (i >= p && i <= q ? inside : outside).push_back(i);

  CharContext ctx;
  ctx.c_in = attend_chars(tape, chars, inside, query, inside_, &ctx.alpha_in);
  if (outside.empty()) {
    ctx.c_out = tape.constant(Matrix::Zero(config_.char_dim, 1));
  } else {
    ctx.c_out = attend_chars(tape, chars, outside, query, outside_, &ctx.alpha_out);
  }
  return ctx;
}

std::vector<Var> TextEncoder::run_gru(Tape& tape, Var inputs, const Gru& gru, bool reverse) const {
  const Eigen::Index h = config_.hidden_dim / 2;
  const Eigen::Index n = inputs.cols();
  const Var gx_all = ad::add(ad::matmul(tape.param(gru.w), inputs), tape.param(gru.b));
  const Var u = tape.param(gru.u);
  Var state = tape.constant(Matrix::Zero(h, 1));
  std::vector<Var> states(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index t = reverse ? n - 1 - k : k;
    const Var gx = ad::column(gx_all, t);
    const Var gh = ad::matmul(u, state);
    const Var z = ad::sigmoid(ad::add(ad::row_block(gx, 0, h), ad::row_block(gh, 0, h)));
    const Var r = ad::sigmoid(ad::add(ad::row_block(gx, h, h), ad::row_block(gh, h, h)));
    const Var cand = ad::tanh(ad::add(ad::row_block(gx, 2 * h, h), ad::hadamard(r, ad::row_block(gh, 2 * h, h))));
    state = ad::add(ad::hadamard(ad::one_minus(z), cand), ad::hadamard(z, state));
    states[static_cast<std::size_t>(t)] = state;
  }
  return states;
}

EncoderOutput TextEncoder::encode(Tape& tape, const EncodedText& text) const {
  const std::size_t n = text.word_ids.size();
  if (n == 0) throw Error("encode_text: no words");
  if (text.spans.size() != n) throw DimensionError("encode_text: spans and words differ in length");
  for (const int id : text.word_ids) {
    if (id < 0 || id >= config_.word_vocab) throw DimensionError("encode_text: word id outside the vocabulary");
  }
  for (const int id : text.char_ids) {
    if (id < 0 || id >= config_.char_vocab) throw DimensionError("encode_text: char id outside the vocabulary");
  }

  EncoderOutput out;
  const Var words = tape.embed(word_table_, text.word_ids);
  const Var chars = tape.embed(char_table_, text.char_ids);
  const Var proj_w = tape.param(proj_w_);
  const Var proj_b = tape.param(proj_b_);
  std::vector<Var> inputs;
  inputs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Var e = ad::column(words, static_cast<Eigen::Index>(t));
    CharContext ctx = char_context(tape, chars, text.spans[t], e);
    const std::array<Var, 3> parts{e, ctx.c_in, ctx.c_out};
    inputs.push_back(ad::add(ad::matmul(proj_w, ad::concat_rows(parts)), proj_b));
    out.char_contexts.push_back(std::move(ctx));
  }
  const Var x = ad::hstack(inputs);
  const std::vector<Var> fwd = run_gru(tape, x, forward_, false);
  const std::vector<Var> bwd = run_gru(tape, x, backward_, true);
  std::vector<Var> states;
  states.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::array<Var, 2> both{fwd[t], bwd[t]};
    states.push_back(ad::concat_rows(both));
  }
  out.hidden = ad::hstack(states);
  const Var keys = ad::tanh(ad::add(ad::matmul(tape.param(att_w_), out.hidden), tape.param(att_b_)));
  out.alpha = ad::softmax(ad::transpose(ad::matmul(tape.param(att_v_), keys)));
  out.summary = ad::matmul(out.hidden, out.alpha);
  return out;
}

SocialEncoder::SocialEncoder(const SocialEncoderConfig& c, ad::ParameterSet& params, Rng& rng) : config_(c) {
  params.add("social.w1", xavier(c.hidden_dim, c.input_dim, rng));
  params.add("social.b1", Matrix::Zero(c.hidden_dim, 1));
  params.add("social.w2", xavier(c.output_dim, c.hidden_dim, rng));
  params.add("social.b2", Matrix::Zero(c.output_dim, 1));
  *this = SocialEncoder(c, static_cast<const ad::ParameterSet&>(params));
}

SocialEncoder::SocialEncoder(const SocialEncoderConfig& c, const ad::ParameterSet& params) : config_(c) {
  auto get = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    const int i = params.index_of(name);
    check_dims(params.value(i), rows, cols, name);
    return i;
  };
  w1_ = get("social.w1", c.hidden_dim, c.input_dim);
  b1_ = get("social.b1", c.hidden_dim, 1);
  w2_ = get("social.w2", c.output_dim, c.hidden_dim);
  b2_ = get("social.b2", c.output_dim, 1);
}

Var SocialEncoder::encode(Tape& tape, Var follow) const {
  if (follow.rows() != config_.input_dim || follow.cols() != 1) {
    throw DimensionError("encode_social: follow vector has length " + std::to_string(follow.rows()) +
                         ", expected " + std::to_string(config_.input_dim));
  }
  const Var hidden = ad::tanh(ad::add(ad::matmul(tape.param(w1_), follow), tape.param(b1_)));
  return ad::add(ad::matmul(tape.param(w2_), hidden), tape.param(b2_));
}

ad::Vector to_dense(const BinaryFollowVector& v) {
  ad::Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v.bits[i];
  return out;
}

StubProvider::StubProvider(int dimension, std::uint64_t seed, std::set<std::string> known_authors)
    : dimension_(dimension), seed_(seed), known_(std::move(known_authors)), unknown_(ad::Vector::Zero(dimension)) {
  if (dimension < 1) throw Error("cultural dimension must be positive");
}

ad::Vector StubProvider::embed(const std::string& author_id) const {
  if (!known_.contains(author_id)) return unknown_;
  Rng rng(derive_seed(seed_, author_id));
  ad::Vector v(dimension_);
  for (int i = 0; i < dimension_; ++i) v(i) = rng.uniform(-1.0, 1.0);
  return v;
}

SynthProvider::SynthProvider(int dimension, std::uint64_t seed, std::map<std::string, int> communities,
                             double signal, double noise)
    : dimension_(dimension), seed_(seed), communities_(std::move(communities)), signal_(signal), noise_(noise) {
  if (dimension < 1) throw Error("cultural dimension must be positive");
  int max_c = -1;
  for (const auto& [author, c] : communities_) max_c = std::max(max_c, c);
  for (int c = 0; c <= max_c; ++c) {
    Rng rng(derive_seed(seed_, "centroid/" + std::to_string(c)));
    ad::Vector v(dimension_);
    for (int i = 0; i < dimension_; ++i) v(i) = rng.normal();
    centroids_.push_back(v.normalized() * std::sqrt(static_cast<double>(dimension_)));
  }
}

ad::Vector SynthProvider::embed(const std::string& author_id) const {
  Rng rng(derive_seed(seed_, "author/" + author_id));
  ad::Vector v(dimension_);
  for (int i = 0; i < dimension_; ++i) v(i) = noise_ * rng.normal();
  const auto it = communities_.find(author_id);
  if (it != communities_.end() && it->second >= 0) v += signal_ * centroids_[static_cast<std::size_t>(it->second)];
  return v;
}

ad::Vector encode_cultural(const std::string& author_id, const CulturalProvider& provider) {
  ad::Vector q;
  try {
    q = provider.embed(author_id);
  } catch (const std::exception& e) {
    throw Error("cultural provider failed for author '" + author_id + "': " + e.what());
  }
  if (q.size() != provider.dimension()) {
    throw DimensionError("cultural provider returned " + std::to_string(q.size()) + " values for author '" +
                         author_id + "', declared " + std::to_string(provider.dimension()));
  }
  return q;
}

}  // namespace hsd
