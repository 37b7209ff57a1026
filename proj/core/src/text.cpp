#include "hsd/text.hpp"

#include <algorithm>
#include <map>

#include "hsd/error.hpp"

namespace hsd {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      extra = 1;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      extra = 2;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      extra = 3;
    } else {
      out.push_back(U'�');
      ++i;
      continue;
    }
    if (i + static_cast<std::size_t>(extra) >= s.size()) {
      out.push_back(U'�');
      break;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      const auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(U'�');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const char32_t cp : s) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

namespace {

bool is_word_char(char32_t c) {
  if (c >= 0x80) return c != kWordBoundary && c != U' ';
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '#' || c == '_' ||
         c == '\'' || c == '@';
}

char32_t lower(char32_t c) { return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c; }

}  // namespace

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  const std::u32string cps = decode_utf8(text);
  std::u32string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!out.chars.empty()) out.chars.push_back(kWordBoundary);
    const int start = static_cast<int>(out.chars.size());
    out.chars += current;
    out.spans.emplace_back(start, static_cast<int>(out.chars.size()) - 1);
    out.words.push_back(encode_utf8(current));
    current.clear();
  };
  for (const char32_t c : cps) {
    if (is_word_char(c)) {
      current.push_back(lower(c));
    } else {
      flush();
    }
  }
  flush();
  if (out.words.empty()) throw Error("text is empty after normalization");
  return out;
}

Vocabulary::Vocabulary() : tokens_{"<pad>", "<oov>"} {
  index_.emplace("<pad>", kPad);
  index_.emplace("<oov>", kOov);
}

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) : Vocabulary() {
  for (const auto& t : tokens) add(t);
}

int Vocabulary::add(const std::string& token) {
  const auto [it, inserted] = index_.emplace(token, size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

int Vocabulary::lookup(const std::string& token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? kOov : it->second;
}

std::string char_token(char32_t c) { return encode_utf8(std::u32string_view(&c, 1)); }

namespace {

Vocabulary ranked(const std::map<std::string, int>& counts, int min_count) {
  std::vector<std::pair<std::string, int>> entries(counts.begin(), counts.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary vocab;
  for (const auto& [token, count] : entries) {
    if (count >= min_count) vocab.add(token);
  }
  return vocab;
}

}  // namespace

std::pair<Vocabulary, Vocabulary> build_vocabularies(const std::vector<TokenizedText>& texts, int min_word_count,
                                                     int min_char_count) {
  std::map<std::string, int> word_counts;
  std::map<std::string, int> char_counts;
  for (const auto& t : texts) {
    for (const auto& w : t.words) ++word_counts[w];
    for (const char32_t c : t.chars) ++char_counts[char_token(c)];
  }
  return {ranked(word_counts, min_word_count), ranked(char_counts, min_char_count)};
}

}  // namespace hsd
