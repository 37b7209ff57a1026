#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "hsd/baselines.hpp"
#include "hsd/error.hpp"
#include "hsd/metrics.hpp"
#include "hsd/pipeline.hpp"
#include "hsd/synth.hpp"
#include "hsd/text.hpp"

using namespace hsd;

namespace {

const SynthCorpus& default_corpus() {
  static const SynthCorpus corpus = synth_corpus(SynthSpec{});
  return corpus;
}

std::map<std::string, std::set<std::string>> following(const SynthCorpus& c) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [a, b] : c.edges) out[a].insert(b);
  return out;
}

}  // namespace

TEST(Synth, Deterministic) {
  SynthSpec spec;
  spec.seed = 3;
  spec.n_tweets = 600;
  const SynthCorpus a = synth_corpus(spec), b = synth_corpus(spec);
  EXPECT_EQ(serialize_corpus(a.records), serialize_corpus(b.records));
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_EQ(a.truth, b.truth);
  EXPECT_EQ(serialize_lexicon(a.lexicon), serialize_lexicon(b.lexicon));
  spec.seed = 4;
  EXPECT_NE(serialize_corpus(synth_corpus(spec).records), serialize_corpus(a.records));
}

TEST(Synth, SpecValidation) {
  SynthSpec spec;
  spec.n_categories = 1;
  EXPECT_THROW(synth_corpus(spec), Error);
  spec = {};
  spec.code_word_fraction = 1.5;
  EXPECT_THROW(synth_corpus(spec), Error);
}

TEST(Synth, GroundTruthExactlyForHate) {
  const SynthCorpus& c = default_corpus();
  EXPECT_EQ(c.records.size(), 5000u);
  std::size_t hate = 0;
  for (const auto& r : c.records) {
    EXPECT_EQ(c.truth.contains(r.id), r.label == Label::hate) << r.id;
    if (r.label != Label::hate) continue;
    ++hate;
    EXPECT_GE(c.truth.at(r.id), 0);
    EXPECT_LT(c.truth.at(r.id), 5);
  }
  EXPECT_EQ(hate, c.truth.size());
}

TEST(Synth, CodeWordAuthorsFollowTheirCommunity) {
  const SynthCorpus& c = default_corpus();
  const auto follows = following(c);
  std::size_t code_word = 0;
  for (const auto& r : c.records) {
    if (c.roles.at(r.id) != TweetRole::code_word_hate) continue;
    ++code_word;
    const int category = c.truth.at(r.id);
    std::size_t hits = 0;
    for (const auto& acc : follows.at(r.author_id)) {
      const auto it = c.account_categories.find(acc);
      if (it != c.account_categories.end() && it->second == category) ++hits;
    }
    EXPECT_GE(hits, 1u) << r.id;
  }
  EXPECT_GT(code_word, 100u);
}

TEST(Synth, NoCodeWordsMeansLexicalHate) {
  SynthSpec spec;
  spec.code_word_fraction = 0.0;
  spec.misspelling_rate = 0.0;
  spec.n_tweets = 1500;
  const SynthCorpus c = synth_corpus(spec);
  for (const auto& r : c.records) {
    if (r.label != Label::hate) continue;
    EXPECT_EQ(c.roles.at(r.id), TweetRole::overt_hate);
    const auto& tokens = c.lexicon.categories.at(static_cast<std::size_t>(c.truth.at(r.id)));
    const std::set<std::string> category(tokens.begin(), tokens.end());
    const auto words = tokenize(r.text).words;
    EXPECT_TRUE(std::any_of(words.begin(), words.end(), [&](const std::string& w) { return category.contains(w); }))
        << r.text;
  }
}

TEST(Synth, TextAloneFailsOnCodeWordsFollowEdgesSucceed) {
  const SynthCorpus& c = default_corpus();
  const DatasetSplits s = split(c.records, {}, 1);
  const auto authors = corpus_authors(c.records);
  const GraphArtifacts g = build_graph_artifacts(c.edges, c.seed_accounts, authors, 100);
  StubProvider provider(4, 1, authors);

  std::vector<TweetRecord> subset;
  for (const auto& r : s.test) {
    const TweetRole role = c.roles.at(r.id);
    if (role == TweetRole::code_word_hate || role == TweetRole::decoy) subset.push_back(r);
  }
  ASSERT_GT(subset.size(), 30u);
  std::vector<Label> truth;
  for (const auto& r : subset) truth.push_back(r.label);

  const LinearBaseline bow =
      LinearBaseline::fit(LinearKind::logistic, FeatureMode::text, s.train, s.val, g.follows, provider);
  const double text_f1 = compute_metrics(truth, bow.predict(subset, g.follows, provider)).f1_hate;

  // Oracle: hate iff the author follows at least two accounts of one category.
  const auto follows = following(c);
  std::vector<Label> oracle_pred;
  for (const auto& r : subset) {
    std::map<int, int> per_category;
    for (const auto& acc : follows.at(r.author_id)) {
      const auto it = c.account_categories.find(acc);
      if (it != c.account_categories.end() && it->second >= 0) ++per_category[it->second];
    }
    bool hate = false;
    for (const auto& [cat, n] : per_category) hate = hate || n >= 2;
    oracle_pred.push_back(hate ? Label::hate : Label::none);
  }
  const double oracle_f1 = compute_metrics(truth, oracle_pred).f1_hate;
  RecordProperty("bow_f1", std::to_string(text_f1));
  RecordProperty("oracle_f1", std::to_string(oracle_f1));
  EXPECT_LT(text_f1, 0.6);
  EXPECT_GT(oracle_f1, 0.9);
}

TEST(Synth, FileFormats) {
  const SynthCorpus& c = default_corpus();
  EXPECT_EQ(parse_ground_truth(serialize_ground_truth(c.truth)), c.truth);
  EXPECT_EQ(parse_roles(serialize_roles(c.roles)), c.roles);
  EXPECT_EQ(parse_int_map(serialize_int_map(c.author_communities)), c.author_communities);
  EXPECT_THROW(parse_ground_truth("t1\n"), ParseError);
}
