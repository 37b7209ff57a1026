#include <gtest/gtest.h>

#include "hsd/error.hpp"
#include "hsd/fusion.hpp"
#include "hsd/model.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hsd;
using testing_support::random_input;
using testing_support::toy_config;

namespace {

HateSpeechModel toy_model(std::uint64_t seed, bool text_only = false) {
  auto [words, chars] = testing_support::toy_vocabularies();
  return HateSpeechModel(toy_config(text_only), words, chars, 5, seed);
}

void expect_distribution(const ad::Matrix& m, const std::string& what) {
  EXPECT_NEAR(m.sum(), 1.0, 1e-6) << what;
  EXPECT_GE(m.minCoeff(), 0.0) << what;
}

}  // namespace

TEST(Model, EndToEndGradient) {
  HateSpeechModel model = toy_model(3);
  Rng rng(8);
  const ExampleInput in = random_input(model, rng, 5);
  const auto check = oracle::check_gradients(model.params(), [&](ad::Tape& t) {
    return xent_loss(model.forward(t, in).probs, in.label);
  });
  EXPECT_LE(check.max_relative_error, 1e-4) << check.worst;
}

TEST(Model, NormalizationInvariants) {
  Rng rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const HateSpeechModel model = toy_model(static_cast<std::uint64_t>(trial), trial % 4 == 0);
    const ExampleInput in = random_input(model, rng, 6);
    ad::Tape t(model.params());
    const ForwardPass pass = model.forward(t, in);
    expect_distribution(pass.text.alpha.value(), "alpha");
    expect_distribution(pass.fusion.beta.value(), "beta");
    expect_distribution(pass.probs.value(), "probs");
    for (const auto& c : pass.text.char_contexts) {
      expect_distribution(c.alpha_in.value(), "char inside");
      if (c.alpha_out.valid()) expect_distribution(c.alpha_out.value(), "char outside");
    }
  }
}

TEST(Model, TextOnlyBeta) {
  const HateSpeechModel model = toy_model(1, true);
  Rng rng(1);
  const Prediction p = model.predict(random_input(model, rng, 4));
  EXPECT_EQ(p.beta, (ad::Vector(3) << 1, 0, 0).finished());
}

TEST(Model, PrepareChecksDimensions) {
  const HateSpeechModel model = toy_model(1);
  const TweetRecord r{"t", "good boy", "u", Label::none, Source::synthetic};
  const FollowVectorTable wrong = FollowVectorTable::build(FollowGraph::build({{"u", "a"}}), HateAccountSet({"a"}));
  StubProvider provider(3, 1, {"u"});
  EXPECT_THROW(model.prepare(r, wrong, provider), DimensionError);
  const FollowVectorTable right =
      FollowVectorTable::build(FollowGraph::build({{"u", "a"}}), HateAccountSet({"a", "b", "c", "d", "e"}));
  StubProvider bad_provider(4, 1, {"u"});
  EXPECT_THROW(model.prepare(r, right, bad_provider), DimensionError);
  const ExampleInput in = model.prepare(r, right, provider);
  EXPECT_EQ(in.tokens, (std::vector<std::string>{"good", "boy"}));
  EXPECT_EQ(in.follow(0), 1.0);
}

TEST(Model, DeterministicInit) {
  EXPECT_TRUE(toy_model(5).params() == toy_model(5).params());
  EXPECT_FALSE(toy_model(5).params() == toy_model(6).params());
}
