#include "hsd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "hsd/error.hpp"
#include "hsd/random.hpp"

namespace hsd {

namespace {

constexpr std::string_view kVowels = "aeiou";
constexpr std::string_view kBenignConsonants = "bdlmns";
// Two markers per token family: swears, insults, positives, then categories.
constexpr std::string_view kMarkers = "cfghjkpqrtvwxyz0123456789";
constexpr int kMarkersPerFamily = 2;
constexpr int kFixedFamilies = 3;

int max_categories() { return static_cast<int>(kMarkers.size()) / kMarkersPerFamily - kFixedFamilies; }

/// Cumulative Zipf weights 1/(r+1)^s.
std::vector<double> zipf(std::size_t n, double s) {
  std::vector<double> cum(n);
  double acc = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    acc += 1.0 / std::pow(static_cast<double>(r + 1), s);
    cum[r] = acc;
  }
  return cum;
}

class TokenFactory {
 public:
  explicit TokenFactory(Rng& rng) : rng_(rng) {}

  std::string benign_word() {
    const int syllables = rng_.between(2, 3);
    std::string w;
    for (int i = 0; i < syllables; ++i) {
      w += kBenignConsonants[rng_.index(kBenignConsonants.size())];
      w += kVowels[rng_.index(kVowels.size())];
    }
    return w;
  }

  /// Token carrying at least one of the family's marker characters.
  std::string family_word(int family) {
    const std::string_view markers = kMarkers.substr(static_cast<std::size_t>(family * kMarkersPerFamily),
                                                     kMarkersPerFamily);
    const int syllables = rng_.between(2, 3);
    const int forced = static_cast<int>(rng_.index(static_cast<std::size_t>(syllables)));
    std::string w;
    for (int i = 0; i < syllables; ++i) {
      if (i == forced || rng_.bernoulli(0.4)) {
        w += markers[rng_.index(markers.size())];
      } else {
        w += kBenignConsonants[rng_.index(kBenignConsonants.size())];
      }
      w += kVowels[rng_.index(kVowels.size())];
    }
    return w;
  }

  std::vector<std::string> unique(int n, auto make) {
    std::vector<std::string> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < n) {
      std::string w = make();
      if (used_.insert(w).second) out.push_back(std::move(w));
      if (++attempts > n * 200) throw Error("synth: token space exhausted; lower the lexicon sizes");
    }
    return out;
  }

 private:
  Rng& rng_;
  std::unordered_set<std::string> used_;
};

std::string pad_id(char prefix, int i, int width) {
  std::string digits = std::to_string(i);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + digits;
}

int digits_for(int n) { return static_cast<int>(std::to_string(std::max(n - 1, 1)).size()); }

}  // namespace

void SynthSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error("invalid synth spec: " + what); };
  if (n_tweets < 1) fail("n_tweets must be positive");
  if (vocab_size < 20) fail("vocab_size must be at least 20");
  if (n_categories < 2) fail("n_categories must be at least 2");
  if (n_categories > max_categories()) fail("n_categories must be at most " + std::to_string(max_categories()));
  if (n_accounts < 2 * n_categories + 2) fail("n_accounts too small for the number of categories");
  if (!(code_word_fraction >= 0.0 && code_word_fraction <= 1.0)) fail("code_word_fraction must lie in [0, 1]");
  if (n_authors < 2 * n_categories + 2) fail("n_authors too small for the number of categories");
  if (lexicon_size < 1 || insult_lexicon_size < 1 || positive_lexicon_size < 1 || n_swear_words < 1) {
    fail("lexicon sizes must be positive");
  }
  if (code_words_per_category < 1) fail("code_words_per_category must be positive");
  if (n_categories * code_words_per_category > vocab_size / 2) fail("too many code words for the vocabulary");
  for (const double f : {hate_fraction, abusive_fraction, decoy_fraction, swear_positive_fraction,
                         community_author_fraction, lone_hater_fraction, misspelling_rate}) {
    if (!(f >= 0.0 && f <= 1.0)) fail("fractions must lie in [0, 1]");
  }
  if (hate_fraction + abusive_fraction > 1.0) fail("hate_fraction + abusive_fraction exceeds 1");
  if (decoy_fraction + swear_positive_fraction > 1.0) fail("decoy_fraction + swear_positive_fraction exceeds 1");
}

std::string_view to_string(TweetRole role) {
  switch (role) {
    case TweetRole::benign: return "benign";
    case TweetRole::swear_positive: return "swear_positive";
    case TweetRole::decoy: return "decoy";
    case TweetRole::abusive: return "abusive";
    case TweetRole::overt_hate: return "overt_hate";
    case TweetRole::code_word_hate: return "code_word_hate";
  }
  return "benign";
}

TweetRole parse_role(std::string_view text) {
  for (const TweetRole r : {TweetRole::benign, TweetRole::swear_positive, TweetRole::decoy, TweetRole::abusive,
                            TweetRole::overt_hate, TweetRole::code_word_hate}) {
    if (text == to_string(r)) return r;
  }
  throw Error("unknown tweet role '" + std::string(text) + "'");
}

SynthCorpus synth_corpus(const SynthSpec& spec) {
  spec.validate();
  SynthCorpus out;
  const int n_cat = spec.n_categories;

  // Lexicon ------------------------------------------------------------------
  {
    Rng rng(derive_seed(spec.seed, "lexicon"));
    TokenFactory factory(rng);
    Lexicon& lex = out.lexicon;
    lex.benign = factory.unique(spec.vocab_size, [&] { return factory.benign_word(); });
    lex.swears = factory.unique(spec.n_swear_words, [&] { return factory.family_word(0); });
    lex.insults = factory.unique(spec.insult_lexicon_size, [&] { return factory.family_word(1); });
    lex.positives = factory.unique(spec.positive_lexicon_size, [&] { return factory.family_word(2); });
    for (int c = 0; c < n_cat; ++c) {
      lex.categories.push_back(factory.unique(spec.lexicon_size, [&] { return factory.family_word(kFixedFamilies + c); }));
    }
    // Code words are mid-frequency benign words, so they also show up in
    // ordinary benign tweets.
    const int lo = std::min(spec.vocab_size / 10, spec.vocab_size - n_cat * spec.code_words_per_category);
    std::vector<std::string> pool(lex.benign.begin() + lo, lex.benign.end());
    rng.shuffle(pool);
    for (int c = 0; c < n_cat; ++c) {
      lex.code_words.emplace_back(pool.begin() + c * spec.code_words_per_category,
                                  pool.begin() + (c + 1) * spec.code_words_per_category);
    }
  }
  const Lexicon& lex = out.lexicon;

  // Accounts and follow graph -------------------------------------------------
  Rng graph_rng(derive_seed(spec.seed, "graph"));
  const int acc_width = digits_for(spec.n_accounts);
  std::vector<std::string> accounts;
  for (int i = 0; i < spec.n_accounts; ++i) accounts.push_back(pad_id('a', i, acc_width));
  std::vector<std::string> shuffled = accounts;
  graph_rng.shuffle(shuffled);
  const int per_cat = std::max(2, static_cast<int>(std::lround(0.6 * spec.n_accounts / n_cat)));
  std::vector<std::vector<std::string>> hate_accounts(static_cast<std::size_t>(n_cat));
  std::vector<std::string> general_accounts;
  for (int i = 0; i < spec.n_accounts; ++i) {
    const int c = i / per_cat;
    const std::string& a = shuffled[static_cast<std::size_t>(i)];
    if (c < n_cat) {
      hate_accounts[static_cast<std::size_t>(c)].push_back(a);
      out.account_categories[a] = c;
    } else {
      general_accounts.push_back(a);
      out.account_categories[a] = -1;
    }
  }
  if (general_accounts.empty()) throw Error("synth: n_accounts leaves no general accounts");
  for (auto& v : hate_accounts) std::sort(v.begin(), v.end());
  std::sort(general_accounts.begin(), general_accounts.end());

  std::set<Edge> edge_set;
  for (const auto& a : accounts) {
    const int ca = out.account_categories[a];
    for (const auto& b : accounts) {
      if (a == b) continue;
      const int cb = out.account_categories[b];
      double p;
      if (ca >= 0 && cb == ca) {
        p = 0.25;
      } else if (ca >= 0 && cb < 0) {
        p = 0.05;
      } else if (ca < 0 && cb < 0) {
        p = 0.08;
      } else if (ca < 0) {
        p = 0.01;
      } else {
        p = 0.005;
      }
      if (graph_rng.bernoulli(p)) edge_set.emplace(a, b);
    }
  }
  for (int c = 0; c < n_cat; ++c) {
    std::vector<std::string> pool = hate_accounts[static_cast<std::size_t>(c)];
    graph_rng.shuffle(pool);
    const std::size_t n_seed = (pool.size() + 2) / 3;
    for (std::size_t i = 0; i < n_seed; ++i) out.seed_accounts.insert(pool[i]);
  }

  auto follow_some = [&](const std::string& author, const std::vector<std::string>& pool, int lo, int hi) {
    std::vector<std::string> p = pool;
    graph_rng.shuffle(p);
    const int k = std::min(static_cast<int>(p.size()), graph_rng.between(lo, hi));
    for (int i = 0; i < k; ++i) edge_set.emplace(author, p[static_cast<std::size_t>(i)]);
  };

  // Authors -------------------------------------------------------------------
  const int auth_width = digits_for(spec.n_authors);
  std::vector<std::string> authors;
  std::vector<std::vector<std::string>> members(static_cast<std::size_t>(n_cat));
  std::vector<std::string> outsiders;
  for (int i = 0; i < spec.n_authors; ++i) {
    const std::string id = pad_id('u', i, auth_width);
    authors.push_back(id);
    int community = -1;
    if (i < 2 * n_cat) {
      community = i < n_cat ? i : -1;  // every community and the outside pool are non-empty
    } else if (graph_rng.bernoulli(spec.community_author_fraction)) {
      community = static_cast<int>(graph_rng.index(static_cast<std::size_t>(n_cat)));
    }
    out.author_communities[id] = community;
    if (community >= 0) {
      members[static_cast<std::size_t>(community)].push_back(id);
      follow_some(id, hate_accounts[static_cast<std::size_t>(community)], 3, 8);
      if (graph_rng.bernoulli(0.3)) {
        int other = static_cast<int>(graph_rng.index(static_cast<std::size_t>(n_cat - 1)));
        if (other >= community) ++other;
        follow_some(id, hate_accounts[static_cast<std::size_t>(other)], 1, 1);
      }
      follow_some(id, general_accounts, 2, 6);
    } else {
      outsiders.push_back(id);
      follow_some(id, general_accounts, 2, 8);
      if (graph_rng.bernoulli(0.15)) {
        const auto& cat = hate_accounts[graph_rng.index(static_cast<std::size_t>(n_cat))];
        follow_some(id, cat, 1, 1);
      }
    }
  }
  out.edges.assign(edge_set.begin(), edge_set.end());

  // Tweets --------------------------------------------------------------------
  Rng rng(derive_seed(spec.seed, "tweets"));
  const auto benign_cum = zipf(lex.benign.size(), 1.0);
  const auto insult_cum = zipf(lex.insults.size(), 0.9);
  const auto positive_cum = zipf(lex.positives.size(), 0.9);
  const auto category_cum = zipf(static_cast<std::size_t>(spec.lexicon_size), 0.8);

  auto benign_words = [&](int lo, int hi) {
    std::vector<std::string> w;
    const int n = rng.between(lo, hi);
    for (int i = 0; i < n; ++i) w.push_back(lex.benign[rng.weighted(benign_cum)]);
    return w;
  };
  auto insert_random = [&](std::vector<std::string>& words, const std::string& token) {
    const std::size_t pos = rng.index(words.size() + 1);
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos), token);
  };
  auto any_author = [&] { return authors[rng.index(authors.size())]; };
  auto outsider = [&] { return outsiders[rng.index(outsiders.size())]; };
  auto member = [&](int c) {
    const auto& m = members[static_cast<std::size_t>(c)];
    return m[rng.index(m.size())];
  };
  auto any_member = [&] { return member(static_cast<int>(rng.index(static_cast<std::size_t>(n_cat)))); };

  const int tweet_width = digits_for(spec.n_tweets);
  for (int i = 0; i < spec.n_tweets; ++i) {
    TweetRecord r;
    r.id = pad_id('t', i, tweet_width);
    r.source = Source::synthetic;
    std::vector<std::string> words;
    TweetRole role;
    const double u = rng.uniform();
    if (u < spec.hate_fraction) {
      r.label = Label::hate;
      const int c = static_cast<int>(rng.index(static_cast<std::size_t>(n_cat)));
      out.truth[r.id] = c;
      if (rng.bernoulli(spec.code_word_fraction)) {
        role = TweetRole::code_word_hate;
        words = benign_words(4, 9);
        const auto& codes = lex.code_words[static_cast<std::size_t>(c)];
        insert_random(words, codes[rng.index(codes.size())]);
        r.author_id = member(c);
      } else {
        role = TweetRole::overt_hate;
        words = benign_words(1, 5);
        const auto& cat = lex.categories[static_cast<std::size_t>(c)];
        const int n_lex = rng.between(1, 2);
        for (int k = 0; k < n_lex; ++k) insert_random(words, cat[rng.weighted(category_cum)]);
        if (rng.bernoulli(0.7)) insert_random(words, lex.swears[rng.index(lex.swears.size())]);
        r.author_id = rng.bernoulli(spec.lone_hater_fraction) ? outsider() : member(c);
      }
    } else if (u < spec.hate_fraction + spec.abusive_fraction) {
      r.label = Label::abusive;
      role = TweetRole::abusive;
      words = benign_words(1, 5);
      insert_random(words, lex.insults[rng.weighted(insult_cum)]);
      if (rng.bernoulli(0.8)) insert_random(words, lex.swears[rng.index(lex.swears.size())]);
      r.author_id = rng.bernoulli(0.8) ? outsider() : any_member();
    } else {
      r.label = Label::none;
      const double v = rng.uniform();
      if (v < spec.decoy_fraction) {
        role = TweetRole::decoy;
        words = benign_words(4, 9);
        const auto& codes = lex.code_words[rng.index(static_cast<std::size_t>(n_cat))];
        insert_random(words, codes[rng.index(codes.size())]);
        r.author_id = outsider();
      } else if (v < spec.decoy_fraction + spec.swear_positive_fraction) {
        role = TweetRole::swear_positive;
        words = benign_words(2, 6);
        const std::size_t pos = rng.index(words.size() + 1);
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos),
                     {lex.swears[rng.index(lex.swears.size())], lex.positives[rng.weighted(positive_cum)]});
        r.author_id = any_author();
      } else {
        role = TweetRole::benign;
        words = benign_words(4, 10);
        r.author_id = any_author();
      }
    }
    std::string text;
    for (const auto& w : words) {
      if (!text.empty()) text += ' ';
      text += w;
    }
    r.text = inject_misspellings(text, spec.misspelling_rate, derive_seed(spec.seed, "misspell/" + r.id));
    out.roles[r.id] = role;
    out.records.push_back(std::move(r));
  }
  return out;
}

std::string serialize_ground_truth(const GroundTruth& truth) { return serialize_int_map(truth); }

GroundTruth parse_ground_truth(std::string_view text) { return parse_int_map(text); }

std::string serialize_int_map(const std::map<std::string, int>& m) {
  std::string out;
  for (const auto& [id, v] : m) out += id + ' ' + std::to_string(v) + '\n';
  return out;
}

std::map<std::string, int> parse_int_map(std::string_view text) {
  std::map<std::string, int> m;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string id;
    if (!(fields >> id)) continue;
    int v;
    if (!(fields >> v)) throw ParseError(line_no, "expected 'id integer'");
    if (!m.emplace(id, v).second) throw ParseError(line_no, "duplicate id '" + id + "'");
  }
  return m;
}

std::string serialize_roles(const std::map<std::string, TweetRole>& roles) {
  std::string out;
  for (const auto& [id, r] : roles) out += id + ' ' + std::string(to_string(r)) + '\n';
  return out;
}

std::map<std::string, TweetRole> parse_roles(std::string_view text) {
  std::map<std::string, TweetRole> m;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string id, role;
    if (!(fields >> id)) continue;
    if (!(fields >> role)) throw ParseError(line_no, "expected 'id role'");
    try {
      m.emplace(id, parse_role(role));
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return m;
}

std::string serialize_lexicon(const Lexicon& lexicon) {
  std::string out;
  auto emit = [&](const std::string& family, const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) out += family + ' ' + t + '\n';
  };
  emit("swear", lexicon.swears);
  emit("insult", lexicon.insults);
  emit("positive", lexicon.positives);
  for (std::size_t c = 0; c < lexicon.categories.size(); ++c) {
    emit("category_" + std::to_string(c), lexicon.categories[c]);
    emit("code_word_" + std::to_string(c), lexicon.code_words[c]);
  }
  emit("benign", lexicon.benign);
  return out;
}

}  // namespace hsd
