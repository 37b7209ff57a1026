#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hsd/corpus.hpp"
#include "hsd/hategraph.hpp"

namespace hsd {

/// Parameters of the synthetic corpus. The first six fields are the core
/// knobs; the rest shape the planted structure.
struct SynthSpec {
  int n_tweets = 5000;
  int vocab_size = 600;  // benign vocabulary
  int n_categories = 5;  // hate categories
  int n_accounts = 200;  // account graph size (authors are extra vertices)
  double code_word_fraction = 0.3;  // share of hate tweets that are code-word tweets
  std::uint64_t seed = 1;

  int n_authors = 800;
  int lexicon_size = 300;  // generated tokens per hate category
  int insult_lexicon_size = 150;
  int positive_lexicon_size = 100;
  int n_swear_words = 6;
  int code_words_per_category = 3;
  double hate_fraction = 0.17;
  double abusive_fraction = 0.25;
  double decoy_fraction = 0.2;           // share of none tweets carrying a code word
  double swear_positive_fraction = 0.2;  // share of none tweets
  double community_author_fraction = 0.35;
  double lone_hater_fraction = 0.3;  // overt-hate tweets posted outside any community
  double misspelling_rate = 0.1;

  void validate() const;
};

/// How a synthetic tweet was generated.
enum class TweetRole : std::uint8_t { benign, swear_positive, decoy, abusive, overt_hate, code_word_hate };

std::string_view to_string(TweetRole role);
TweetRole parse_role(std::string_view text);

/// Token families planted in the corpus. Category tokens are built from
/// category-specific marker characters; code words are ordinary benign words.
struct Lexicon {
  std::vector<std::string> benign;
  std::vector<std::string> swears;
  std::vector<std::string> insults;
  std::vector<std::string> positives;
  std::vector<std::vector<std::string>> categories;
  std::vector<std::vector<std::string>> code_words;
};

/// tweet id → hate category, defined exactly for hate-labeled tweets.
using GroundTruth = std::map<std::string, int>;

struct SynthCorpus {
  std::vector<TweetRecord> records;
  std::vector<Edge> edges;  // author → account and account → account follows
  std::set<std::string> seed_accounts;
  GroundTruth truth;
  std::map<std::string, TweetRole> roles;
  std::map<std::string, int> author_communities;   // -1 outside every community
  std::map<std::string, int> account_categories;   // -1 for general accounts
  Lexicon lexicon;
};

/// Generates benign, swear+positive, abusive, overt-hate and code-word
/// tweets. Code-word hate tweets share the benign template and are told apart
/// from decoys only by their authors' follows of category hate accounts.
SynthCorpus synth_corpus(const SynthSpec& spec);

// File formats ---------------------------------------------------------------

/// "tweet_id category_id" lines.
std::string serialize_ground_truth(const GroundTruth& truth);
GroundTruth parse_ground_truth(std::string_view text);

/// "id integer" lines (author communities, account categories).
std::string serialize_int_map(const std::map<std::string, int>& m);
std::map<std::string, int> parse_int_map(std::string_view text);

std::string serialize_roles(const std::map<std::string, TweetRole>& roles);
std::map<std::string, TweetRole> parse_roles(std::string_view text);

/// "family token" lines documenting the role of every planted token.
std::string serialize_lexicon(const Lexicon& lexicon);

}  // namespace hsd
