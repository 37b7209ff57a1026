#include "hsd_cli/run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <map>
#include <sstream>

#include "hsd/error.hpp"
#include "hsd/fileio.hpp"

namespace hsd::cli {

namespace {

struct Field {
  std::function<void(std::string_view)> set;
  std::function<std::string()> get;
};

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error("config key '" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error("config key '" + std::string(key) + "' expects a number, got '" + s + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error("config key '" + std::string(key) + "' expects true or false, got '" + std::string(v) + "'");
}

std::string show(bool b) { return b ? "true" : "false"; }

template <typename Int>
Field int_field(std::string_view key, Int& ref) {
  return {[key, &ref](std::string_view v) { ref = parse_int<Int>(key, v); }, [&ref] { return std::to_string(ref); }};
}

Field real_field(std::string_view key, double& ref) {
  return {[key, &ref](std::string_view v) { ref = parse_real(key, v); }, [&ref] { return format_double(ref); }};
}

Field bool_field(std::string_view key, bool& ref) {
  return {[key, &ref](std::string_view v) { ref = parse_bool(key, v); }, [&ref] { return show(ref); }};
}

Field text_field(std::string& ref) {
  return {[&ref](std::string_view v) { ref = std::string(v); }, [&ref] { return ref; }};
}

std::map<std::string, Field, std::less<>> fields(RunConfig& c) {
  std::map<std::string, Field, std::less<>> f;
  f["seed"] = int_field("seed", c.seed);
  f["text_only"] = {[&c](std::string_view v) { c.model.text_only = c.train.text_only = parse_bool("text_only", v); },
                    [&c] { return show(c.model.text_only); }};

  f["paths.corpus"] = text_field(c.corpus);
  f["paths.edges"] = text_field(c.edges);
  f["paths.seeds"] = text_field(c.seeds);
  f["paths.truth"] = text_field(c.truth);
  f["paths.roles"] = text_field(c.roles);
  f["paths.communities"] = text_field(c.communities);
  f["corpus.drop_spam"] = bool_field("corpus.drop_spam", c.drop_spam);

  f["synth.n_tweets"] = int_field("synth.n_tweets", c.synth.n_tweets);
  f["synth.vocab_size"] = int_field("synth.vocab_size", c.synth.vocab_size);
  f["synth.n_categories"] = int_field("synth.n_categories", c.synth.n_categories);
  f["synth.n_accounts"] = int_field("synth.n_accounts", c.synth.n_accounts);
  f["synth.code_word_fraction"] = real_field("synth.code_word_fraction", c.synth.code_word_fraction);
  f["synth.n_authors"] = int_field("synth.n_authors", c.synth.n_authors);
  f["synth.lexicon_size"] = int_field("synth.lexicon_size", c.synth.lexicon_size);
  f["synth.insult_lexicon_size"] = int_field("synth.insult_lexicon_size", c.synth.insult_lexicon_size);
  f["synth.positive_lexicon_size"] = int_field("synth.positive_lexicon_size", c.synth.positive_lexicon_size);
  f["synth.n_swear_words"] = int_field("synth.n_swear_words", c.synth.n_swear_words);
  f["synth.code_words_per_category"] = int_field("synth.code_words_per_category", c.synth.code_words_per_category);
  f["synth.hate_fraction"] = real_field("synth.hate_fraction", c.synth.hate_fraction);
  f["synth.abusive_fraction"] = real_field("synth.abusive_fraction", c.synth.abusive_fraction);
  f["synth.decoy_fraction"] = real_field("synth.decoy_fraction", c.synth.decoy_fraction);
  f["synth.swear_positive_fraction"] = real_field("synth.swear_positive_fraction", c.synth.swear_positive_fraction);
  f["synth.community_author_fraction"] =
      real_field("synth.community_author_fraction", c.synth.community_author_fraction);
  f["synth.lone_hater_fraction"] = real_field("synth.lone_hater_fraction", c.synth.lone_hater_fraction);
  f["synth.misspelling_rate"] = real_field("synth.misspelling_rate", c.synth.misspelling_rate);

  f["split.train"] = real_field("split.train", c.splits.train);
  f["split.val"] = real_field("split.val", c.splits.val);
  f["split.test"] = real_field("split.test", c.splits.test);

  f["graph.damping"] = real_field("graph.damping", c.pagerank.damping);
  f["graph.tol"] = real_field("graph.tol", c.pagerank.tol);
  f["graph.max_iter"] = int_field("graph.max_iter", c.pagerank.max_iter);
  f["graph.k"] = int_field("graph.k", c.graph_k);

  f["model.word_dim"] = int_field("model.word_dim", c.model.word_dim);
  f["model.char_dim"] = int_field("model.char_dim", c.model.char_dim);
  f["model.char_attention_dim"] = int_field("model.char_attention_dim", c.model.char_attention_dim);
  f["model.input_dim"] = int_field("model.input_dim", c.model.input_dim);
  f["model.hidden_dim"] = int_field("model.hidden_dim", c.model.hidden_dim);
  f["model.attention_dim"] = int_field("model.attention_dim", c.model.attention_dim);
  f["model.cultural_dim"] = int_field("model.cultural_dim", c.model.cultural_dim);
  f["model.social_hidden_dim"] = int_field("model.social_hidden_dim", c.model.social_hidden_dim);
  f["model.social_dim"] = int_field("model.social_dim", c.model.social_dim);
  f["model.fused_dim"] = int_field("model.fused_dim", c.model.fused_dim);
  f["model.fusion_attention_dim"] = int_field("model.fusion_attention_dim", c.model.fusion_attention_dim);
  f["model.max_words"] = int_field("model.max_words", c.model.max_words);
  f["model.min_word_count"] = int_field("model.min_word_count", c.model.min_word_count);

  f["train.epochs"] = int_field("train.epochs", c.train.epochs);
  f["train.batch_size"] = int_field("train.batch_size", c.train.batch_size);
  f["train.learning_rate"] = real_field("train.learning_rate", c.train.learning_rate);
  f["train.patience"] = int_field("train.patience", c.train.early_stop_patience);
  f["train.grad_clip"] = real_field("train.grad_clip", c.train.grad_clip);
  f["train.class_weights"] = {
      [&c](std::string_view v) {
        if (v == "none") {
          c.train.class_weights.reset();
          return;
        }
        std::array<double, kNumClasses> w{};
        std::size_t start = 0;
        for (int i = 0; i < kNumClasses; ++i) {
          const std::size_t comma = v.find(',', start);
          if ((i < kNumClasses - 1) == (comma == std::string_view::npos)) {
            throw Error("config key 'train.class_weights' expects 'none' or three comma-separated numbers");
          }
          w[static_cast<std::size_t>(i)] = parse_real("train.class_weights", v.substr(start, comma - start));
          start = comma + 1;
        }
        c.train.class_weights = w;
      },
      [&c] {
        if (!c.train.class_weights) return std::string("none");
        const auto& w = *c.train.class_weights;
        return format_double(w[0]) + "," + format_double(w[1]) + "," + format_double(w[2]);
      }};

  f["cultural.provider"] = text_field(c.cultural_provider);
  f["cultural.signal"] = real_field("cultural.signal", c.cultural_signal);
  f["cultural.noise"] = real_field("cultural.noise", c.cultural_noise);

  f["baseline.epochs"] = int_field("baseline.epochs", c.baseline.epochs);
  f["baseline.batch_size"] = int_field("baseline.batch_size", c.baseline.batch_size);
  f["baseline.learning_rate"] = real_field("baseline.learning_rate", c.baseline.learning_rate);
  f["baseline.l2"] = real_field("baseline.l2", c.baseline.l2);
  f["baseline.min_word_count"] = int_field("baseline.min_word_count", c.baseline.min_word_count);

  f["cluster.k"] = int_field("cluster.k", c.k_clusters);
  f["cluster.linkage"] = text_field(c.linkage);
  f["cluster.metric"] = text_field(c.metric);
  f["cluster.purity"] = text_field(c.purity_mode);
  f["cluster.top_words"] = int_field("cluster.top_words", c.top_words);
  return f;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  auto f = fields(*this);
  const auto it = f.find(key);
  if (it == f.end()) throw Error("unknown config key '" + std::string(key) + "'");
  it->second.set(trim(value));
}

void RunConfig::apply(std::string_view text, const std::string& origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, origin + ": expected 'key = value'");
    }
    try {
      set(trim(body.substr(0, eq)), body.substr(eq + 1));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, origin + ": " + e.what());
    }
  }
}

void RunConfig::validate() const {
  synth.validate();
  train.validate();
  if (!(pagerank.damping > 0.0 && pagerank.damping < 1.0)) throw Error("graph.damping must lie in (0, 1)");
  if (!(pagerank.tol > 0.0)) throw Error("graph.tol must be positive");
  if (pagerank.max_iter < 1) throw Error("graph.max_iter must be positive");
  if (graph_k < 1) throw Error("graph.k must be positive");
  if (k_clusters < 1) throw Error("cluster.k must be at least 1");
  if (top_words < 1) throw Error("cluster.top_words must be positive");
  if (cultural_provider != "auto" && cultural_provider != "synth" && cultural_provider != "stub") {
    throw Error("cultural.provider must be auto, synth or stub");
  }
  if (purity_mode != "by_category" && purity_mode != "by_cluster") {
    throw Error("cluster.purity must be by_category or by_cluster");
  }
  parse_linkage(linkage);
  parse_metric(metric);
}

std::string RunConfig::to_text() const {
  auto f = fields(const_cast<RunConfig&>(*this));
  std::string out;
  for (const auto& [key, field] : f) out += key + " = " + field.get() + '\n';
  return out;
}

std::string RunConfig::hash() const { return checksum_hex(to_text()); }

std::vector<std::string> config_keys() {
  RunConfig c;
  std::vector<std::string> out;
  for (const auto& [key, field] : fields(c)) out.push_back(key);
  return out;
}

}  // namespace hsd::cli
