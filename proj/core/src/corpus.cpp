#include "hsd/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "hsd/error.hpp"
#include "hsd/random.hpp"
#include "hsd/text.hpp"

namespace hsd {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

struct SchemeEntry {
  std::string_view raw;
  std::optional<Label> unified;
};

// Public dataset label schemes onto the unified none/abusive/hate target.
// founta spam has no counterpart and folds into none (or is dropped).
const std::map<Source, std::vector<SchemeEntry>>& schemes() {
  static const std::map<Source, std::vector<SchemeEntry>> table{
      {Source::founta,
       {{"none", Label::none}, {"spam", Label::none}, {"abusive", Label::abusive}, {"hateful", Label::hate}}},
      {Source::davidson, {{"neither", Label::none}, {"offensive", Label::abusive}, {"hate", Label::hate}}},
      {Source::park, {{"none", Label::none}, {"sexism", Label::hate}, {"racism", Label::hate}}},
      {Source::golbeck, {{"none", Label::none}, {"harassment", Label::abusive}}},
      {Source::curated, {{"none", Label::none}, {"abusive", Label::abusive}, {"hate", Label::hate}}},
      {Source::synthetic, {{"none", Label::none}, {"abusive", Label::abusive}, {"hate", Label::hate}}},
  };
  return table;
}

}  // namespace

std::string_view to_string(Label label) {
  switch (label) {
    case Label::none: return "none";
    case Label::abusive: return "abusive";
    case Label::hate: return "hate";
  }
  return "none";
}

Label parse_label(std::string_view text) {
  const std::string s = lowercase(text);
  if (s == "none") return Label::none;
  if (s == "abusive") return Label::abusive;
  if (s == "hate") return Label::hate;
  throw Error("unknown label '" + std::string(text) + "' (expected none, abusive, hate)");
}

std::string_view to_string(Source source) {
  switch (source) {
    case Source::founta: return "founta";
    case Source::davidson: return "davidson";
    case Source::park: return "park";
    case Source::golbeck: return "golbeck";
    case Source::curated: return "curated";
    case Source::synthetic: return "synthetic";
  }
  return "synthetic";
}

Source parse_source(std::string_view text) {
  const std::string s = lowercase(text);
  for (const Source src : {Source::founta, Source::davidson, Source::park, Source::golbeck, Source::curated,
                           Source::synthetic}) {
    if (s == to_string(src)) return src;
  }
  throw Error("unknown source '" + std::string(text) + "'");
}

std::optional<Label> unify_label(Source source, std::string_view raw_label, UnifyOptions options) {
  const std::string raw = lowercase(raw_label);
  const auto& entries = schemes().at(source);
  for (const auto& e : entries) {
    if (e.raw == raw) {
      if (source == Source::founta && raw == "spam" && options.drop_spam) return std::nullopt;
      return e.unified;
    }
  }
  std::string valid;
  for (const auto& e : entries) {
    if (!valid.empty()) valid += ", ";
    valid += e.raw;
  }
  throw Error("unknown label '" + std::string(raw_label) + "' for source " + std::string(to_string(source)) +
              " (valid: " + valid + ")");
}

std::vector<TweetRecord> parse_corpus(std::istream& in, UnifyOptions options) {
  std::vector<TweetRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed record: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line_no, "record is not an object");
    auto field = [&](const char* name) -> std::string {
      const auto it = obj.find(name);
      if (it == obj.end()) throw ParseError(line_no, std::string("missing field \"") + name + "\"");
      if (!it->is_string()) throw ParseError(line_no, std::string("field \"") + name + "\" is not a string");
      return it->get<std::string>();
    };
    TweetRecord r;
    r.id = field("id");
    r.text = field("text");
    r.author_id = field("author_id");
    const std::string raw_label = field("label");
    const std::string raw_source = field("source");
    try {
      r.source = parse_source(raw_source);
      const auto label = unify_label(r.source, raw_label, options);
      if (!label) continue;
      r.label = *label;
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    if (r.id.empty()) throw ParseError(line_no, "empty id");
    if (r.text.find_first_not_of(" \t\r\n") == std::string::npos) throw ParseError(line_no, "empty text");
    if (!seen.insert(r.id).second) throw ParseError(line_no, "duplicate id '" + r.id + "'");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<TweetRecord> parse_corpus(std::string_view text, UnifyOptions options) {
  std::istringstream in{std::string(text)};
  return parse_corpus(in, options);
}

std::string serialize_record(const TweetRecord& record) {
  // Fixed key order keeps output byte-stable.
  nlohmann::ordered_json obj;
  obj["id"] = record.id;
  obj["text"] = record.text;
  obj["author_id"] = record.author_id;
  obj["label"] = std::string(to_string(record.label));
  obj["source"] = std::string(to_string(record.source));
  return obj.dump();
}

std::string serialize_corpus(const std::vector<TweetRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += serialize_record(r);
    out += '\n';
  }
  return out;
}

namespace {

bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r'; }

void misspell_word(std::u32string& word, Rng& rng) {
  enum class Edit { swap, drop, twice };
  std::vector<Edit> edits;
  std::vector<std::size_t> swap_positions;
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (word[i] != word[i + 1]) swap_positions.push_back(i);
  }
  if (!swap_positions.empty()) edits.push_back(Edit::swap);
  if (word.size() >= 2) edits.push_back(Edit::drop);
  edits.push_back(Edit::twice);

  switch (edits[rng.index(edits.size())]) {
    case Edit::swap: {
      const std::size_t i = swap_positions[rng.index(swap_positions.size())];
      std::swap(word[i], word[i + 1]);
      break;
    }
    case Edit::drop:
      word.erase(rng.index(word.size()), 1);
      break;
    case Edit::twice: {
      const std::size_t i = rng.index(word.size());
      word.insert(word.begin() + static_cast<std::ptrdiff_t>(i), word[i]);
      break;
    }
  }
}

}  // namespace

std::string inject_misspellings(std::string_view text, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw Error("misspelling rate must lie in [0, 1]");
  if (rate == 0.0) return std::string(text);
  Rng rng(seed);
  const std::u32string in = decode_utf8(text);
  std::u32string out;
  out.reserve(in.size() + 8);
  std::size_t i = 0;
  while (i < in.size()) {
    if (is_space(in[i])) {
      out.push_back(in[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < in.size() && !is_space(in[j])) ++j;
    std::u32string word = in.substr(i, j - i);
    if (rng.bernoulli(rate)) misspell_word(word, rng);
    out += word;
    i = j;
  }
  return encode_utf8(out);
}

DatasetSplits split(const std::vector<TweetRecord>& records, SplitRatios ratios, std::uint64_t seed) {
  if (!(ratios.train > 0 && ratios.val > 0 && ratios.test > 0)) throw Error("split ratios must be positive");
  if (std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) throw Error("split ratios must sum to 1");

  DatasetSplits out;
  out.seed = seed;
  std::array<std::vector<std::size_t>, 3> assigned;
  Rng rng(seed);
  const std::array<double, 3> r{ratios.train, ratios.val, ratios.test};
  for (const Label label : kAllLabels) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].label == label) idx.push_back(i);
    }
    if (idx.empty()) continue;
    if (idx.size() < 3) {
      throw Error("label '" + std::string(to_string(label)) + "' has " + std::to_string(idx.size()) +
                  " records, fewer than the 3 splits");
    }
    rng.shuffle(idx);
    // Largest-remainder apportionment: each count within one of its quota.
    const double n = static_cast<double>(idx.size());
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainder{};
    std::size_t total = 0;
    for (int s = 0; s < 3; ++s) {
      const double quota = r[static_cast<std::size_t>(s)] * n;
      counts[static_cast<std::size_t>(s)] = static_cast<std::size_t>(std::floor(quota));
      remainder[static_cast<std::size_t>(s)] = quota - std::floor(quota);
      total += counts[static_cast<std::size_t>(s)];
    }
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return remainder[static_cast<std::size_t>(a)] > remainder[static_cast<std::size_t>(b)];
    });
    for (std::size_t k = 0; total < idx.size(); ++k, ++total) ++counts[static_cast<std::size_t>(order[k % 3])];
    std::size_t pos = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t c = 0; c < counts[s]; ++c) assigned[s].push_back(idx[pos++]);
    }
  }
  std::array<std::vector<TweetRecord>*, 3> dest{&out.train, &out.val, &out.test};
  for (std::size_t s = 0; s < 3; ++s) {
    std::sort(assigned[s].begin(), assigned[s].end());
    for (const std::size_t i : assigned[s]) dest[s]->push_back(records[i]);
  }
  return out;
}

}  // namespace hsd
