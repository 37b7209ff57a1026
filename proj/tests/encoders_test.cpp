#include <gtest/gtest.h>

#include <cmath>

#include "hsd/encoders.hpp"
#include "hsd/error.hpp"
#include "hsd/fusion.hpp"
#include "hsd/random.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hsd;
using ad::Matrix;
using ad::Tape;
using ad::Var;

namespace {

struct Fixture {
  Vocabulary words, chars;
  TextEncoderConfig config;
  ad::ParameterSet params;
  std::optional<TextEncoder> encoder;

  explicit Fixture(std::uint64_t seed = 1) {
    std::tie(words, chars) = testing_support::toy_vocabularies();
    config.word_vocab = words.size();
    config.char_vocab = chars.size();
    config.word_dim = 5;
    config.char_dim = 4;
    config.char_attention_dim = 3;
    config.input_dim = 5;
    config.hidden_dim = 6;
    config.attention_dim = 4;
    Rng rng(seed);
    encoder.emplace(config, params, rng);
  }

  EncodedText encode(const std::string& text) const {
    return encode_tokens(tokenize(text), words, chars);
  }
};

}  // namespace

TEST(EncodeTokens, OovAndCap) {
  Fixture f;
  const auto e = encode_tokens(tokenize("good zzz boy"), f.words, f.chars, 2);
  ASSERT_EQ(e.word_ids.size(), 2u);
  EXPECT_EQ(e.word_ids[1], Vocabulary::kOov);
  EXPECT_EQ(e.spans.size(), 2u);
}

TEST(TextEncoder, SingleWord) {
  Fixture f;
  Tape t(f.params);
  const auto out = f.encoder->encode(t, f.encode("good"));
  EXPECT_NEAR(out.alpha.scalar(), 1.0, 1e-12);
  EXPECT_LT((out.summary.value() - out.hidden.value().col(0)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_FALSE(out.char_contexts[0].alpha_out.valid());
  EXPECT_EQ(out.char_contexts[0].c_out.value().norm(), 0.0);
}

TEST(TextEncoder, SummaryIsAlphaWeightedHidden) {
  Fixture f;
  Tape t(f.params);
  const auto out = f.encoder->encode(t, f.encode("good bad day sun"));
  const Matrix expected = out.hidden.value() * out.alpha.value();
  EXPECT_LT((out.summary.value() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TextEncoder, OrderSensitive) {
  Fixture f;
  Tape t(f.params);
  const auto a = f.encoder->encode(t, f.encode("good boy"));
  const auto b = f.encoder->encode(t, f.encode("boy good"));
  EXPECT_GT((a.hidden.value().col(0) - b.hidden.value().col(1)).norm(), 1e-9);
}

TEST(TextEncoder, Deterministic) {
  Fixture a(4), b(4);
  Tape ta(a.params), tb(b.params);
  EXPECT_EQ(a.encoder->encode(ta, a.encode("bad day")).summary.value(),
            b.encoder->encode(tb, b.encode("bad day")).summary.value());
}

TEST(TextEncoder, InvalidIds) {
  Fixture f;
  Tape t(f.params);
  EncodedText e = f.encode("good");
  e.word_ids[0] = 999;
  EXPECT_THROW(f.encoder->encode(t, e), Error);
}

TEST(CharContext, Regions) {
  Fixture f;
  Tape t(f.params);
  const EncodedText e = f.encode("ok day");
  const Var chars = t.embed(f.params.index_of("text.char_emb"), e.char_ids);
  const Var query = t.constant(Matrix::Ones(f.config.word_dim, 1));
  const auto all = f.encoder->char_context(t, chars, {0, static_cast<int>(e.char_ids.size()) - 1}, query);
  EXPECT_EQ(all.c_out.value().norm(), 0.0);
  const auto single = f.encoder->char_context(t, chars, {0, 0}, query);
  EXPECT_NEAR(single.alpha_in.scalar(), 1.0, 1e-12);
  EXPECT_LT((single.c_in.value() - chars.value().col(0)).norm(), 1e-12);
  const auto mid = f.encoder->char_context(t, chars, {3, 5}, query);
  EXPECT_NEAR(mid.alpha_in.value().sum(), 1.0, 1e-12);
  EXPECT_NEAR(mid.alpha_out.value().sum(), 1.0, 1e-12);
  EXPECT_THROW(f.encoder->char_context(t, chars, {2, 1}, query), Error);
  EXPECT_THROW(f.encoder->char_context(t, chars, {0, 99}, query), Error);
}

TEST(TextEncoder, GradientCheck) {
  Fixture f(7);
  const EncodedText e = f.encode("good zap bad ok");
  Rng rng(3);
  Matrix w(f.config.hidden_dim, 1);
  for (int i = 0; i < w.rows(); ++i) w(i) = rng.uniform(-1, 1);
  const auto check = oracle::check_gradients(f.params, [&](Tape& t) {
    const auto out = f.encoder->encode(t, e);
    return ad::matmul(ad::transpose(t.constant(w)), out.summary);
  });
  EXPECT_LE(check.max_relative_error, 1e-4) << check.worst;
}

TEST(SocialEncoder, ZeroPropagation) {
  ad::ParameterSet p;
  Rng rng(1);
  SocialEncoder enc({5, 4, 3}, p, rng);
  p.value("social.b1").setZero();
  p.value("social.b2").setZero();
  Tape t(p);
  EXPECT_EQ(enc.encode(t, t.constant(Matrix::Zero(5, 1))).value().norm(), 0.0);
  EXPECT_THROW(enc.encode(t, t.constant(Matrix::Zero(4, 1))), DimensionError);
}

TEST(SocialEncoder, GradientCheck) {
  ad::ParameterSet p;
  Rng rng(2);
  SocialEncoder enc({6, 4, 3}, p, rng);
  Matrix v(6, 1);
  v << 1, 0, 1, 1, 0, 1;
  const auto check = oracle::check_gradients(p, [&](Tape& t) {
    const Var r = enc.encode(t, t.constant(v));
    return ad::matmul(t.constant(Matrix::Ones(1, 3)), ad::tanh(r));
  });
  EXPECT_LE(check.max_relative_error, 1e-4) << check.worst;
}

TEST(CulturalProvider, Stub) {
  StubProvider p(4, 9, {"known"});
  EXPECT_EQ(p.embed("stranger"), ad::Vector::Zero(4));
  EXPECT_EQ(p.embed("known"), p.embed("known"));
  const auto v = p.embed("known");
  EXPECT_LE(v.maxCoeff(), 1.0);
  EXPECT_GE(v.minCoeff(), -1.0);
  EXPECT_GT(v.norm(), 0.0);
}

TEST(CulturalProvider, DimensionChecked) {
  struct Broken final : CulturalProvider {
    int dimension() const override { return 3; }
    ad::Vector embed(const std::string&) const override { return ad::Vector::Zero(2); }
  };
  try {
    encode_cultural("u42", Broken{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("u42"), std::string::npos);
  }
}

TEST(CulturalProvider, SynthCommunitiesCohere) {
  std::map<std::string, int> communities;
  for (int i = 0; i < 60; ++i) communities["u" + std::to_string(i)] = i % 4 == 3 ? -1 : i % 3;
  SynthProvider p(16, 5, communities);
  double same = 0, cross = 0;
  int n_same = 0, n_cross = 0;
  for (const auto& [a, ca] : communities) {
    for (const auto& [b, cb] : communities) {
      if (a >= b || ca < 0 || cb < 0) continue;
      const auto va = p.embed(a), vb = p.embed(b);
      const double cos = va.dot(vb) / (va.norm() * vb.norm());
      if (ca == cb) {
        same += cos;
        ++n_same;
      } else {
        cross += cos;
        ++n_cross;
      }
    }
  }
  EXPECT_GT(same / n_same, cross / n_cross);
}
