#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hsd {

/// Three-way target. No severity ordering is implied between the values.
enum class Label : std::uint8_t { none = 0, abusive = 1, hate = 2 };

inline constexpr int kNumClasses = 3;
inline constexpr std::array<Label, kNumClasses> kAllLabels{Label::none, Label::abusive, Label::hate};

std::string_view to_string(Label label);
Label parse_label(std::string_view text);

/// Provenance of a record. The first four are public annotated datasets with
/// their own label schemes.
enum class Source : std::uint8_t { founta, davidson, park, golbeck, curated, synthetic };

std::string_view to_string(Source source);
Source parse_source(std::string_view text);

struct TweetRecord {
  std::string id;
  std::string text;
  std::string author_id;
  Label label = Label::none;
  Source source = Source::synthetic;

  friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
};

struct UnifyOptions {
  /// When set, founta "spam" records map to nullopt and should be dropped
  /// instead of being folded into `none`.
  bool drop_spam = false;
};

/// Map a source-specific raw label onto the unified schema. Case-insensitive.
/// Returns nullopt only for founta spam with `drop_spam` set. Throws hsd::Error
/// listing the valid labels for unknown pairs.
std::optional<Label> unify_label(Source source, std::string_view raw_label, UnifyOptions options = {});

/// Parse line-delimited JSON records (fields id, text, author_id, label,
/// source). Blank lines are skipped. `label` may be a unified label or a raw
/// label of the record's source scheme.
std::vector<TweetRecord> parse_corpus(std::istream& in, UnifyOptions options = {});
std::vector<TweetRecord> parse_corpus(std::string_view text, UnifyOptions options = {});

std::string serialize_record(const TweetRecord& record);
std::string serialize_corpus(const std::vector<TweetRecord>& records);

/// Apply, per word and with probability `rate`, exactly one edit chosen
/// uniformly from {adjacent swap, character drop, character double}.
/// Whitespace layout and word count are preserved.
std::string inject_misspellings(std::string_view text, double rate, std::uint64_t seed);

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct DatasetSplits {
  std::vector<TweetRecord> train;
  std::vector<TweetRecord> val;
  std::vector<TweetRecord> test;
  std::uint64_t seed = 0;
};

/// Stratified shuffle split. Within each label the train/val/test counts are
/// within one record of the requested ratios.
DatasetSplits split(const std::vector<TweetRecord>& records, SplitRatios ratios, std::uint64_t seed);

}  // namespace hsd
