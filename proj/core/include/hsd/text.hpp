#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hsd {

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

/// Character placed between consecutive words in the character stream.
inline constexpr char32_t kWordBoundary = U'␟';

/// Word and character view of one text. Spans are inclusive character
/// positions, strictly increasing and separated by one boundary character.
struct TokenizedText {
  std::vector<std::string> words;
  std::u32string chars;
  std::vector<std::pair<int, int>> spans;
};

/// Lowercase (ASCII), split on whitespace and punctuation. Word characters are
/// ASCII alphanumerics, '#', '_', '\'', '@' and any non-ASCII code point.
/// Throws hsd::Error when no word survives.
TokenizedText tokenize(std::string_view text);

/// Token → row mapping for an embedding table. Row 0 is padding, row 1 the
/// shared out-of-vocabulary row.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kOov = 1;

  Vocabulary();

  /// Tokens are added in the given order, skipping duplicates.
  explicit Vocabulary(const std::vector<std::string>& tokens);

  int add(const std::string& token);
  int lookup(const std::string& token) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// Build word and character vocabularies from texts. Words seen fewer than
/// `min_word_count` times map to OOV. Entries are ordered by descending count,
/// ties broken by the token itself.
std::pair<Vocabulary, Vocabulary> build_vocabularies(const std::vector<TokenizedText>& texts, int min_word_count,
                                                     int min_char_count = 1);

std::string char_token(char32_t c);

}  // namespace hsd
