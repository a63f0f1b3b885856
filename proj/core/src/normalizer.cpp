#include "capcorpus/normalizer.hpp"

#include <array>

#include "capcorpus/utf8.hpp"

namespace capcorpus {

namespace {

bool is_ascii_letter(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }
bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == 0x00A0 || (c >= 0x2000 && c <= 0x200A) || c == 0x202F || c == 0x205F ||
         c == 0x3000;
}

// Marks that only structure a sentence. They are never kept next to a digit
// unless they sit between two digits.
bool is_clause_mark(char32_t c) {
  switch (c) {
    case U'.': case U',': case U'!': case U'?': case U';': case U':': case U'"':
    case U'(': case U')': case U'[': case U']': case U'{': case U'}': case U'-':
      return true;
    default:
      return (c >= 0x2010 && c <= 0x205E) || (c >= 0x3000 && c <= 0x303F) || c == 0x00AB ||
             c == 0x00BB || c == 0x00BF || c == 0x00A1;
  }
}

// Non-ASCII code points treated as punctuation or symbols and removed.
bool is_nonascii_symbol(char32_t c) {
  return (c >= 0x00A1 && c <= 0x00BF) || c == 0x00D7 || c == 0x00F7 ||
         (c >= 0x2010 && c <= 0x205E) || (c >= 0x20A0 && c <= 0x20CF) ||
         (c >= 0x2100 && c <= 0x2BFF) || (c >= 0x3000 && c <= 0x303F) ||
         (c >= 0xFF01 && c <= 0xFF0F) || (c >= 0x1F000 && c <= 0x1FAFF);
}

bool is_speaker_label_char(char32_t c) {
  return is_ascii_letter(c) || is_digit(c) || c == U' ' || c == U'.' || c == U'\'';
}

std::u32string collapse_whitespace(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char32_t c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

// Removes one innermost open..close pair per call; returns false when none
// is left. An opener is matched with the first closer after it, so the pair
// never contains another bracket of the same kind.
bool remove_one_pair(std::u32string& s, char32_t open, char32_t close) {
  std::size_t last_open = std::u32string::npos;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == open && (open != close || last_open == std::u32string::npos)) {
      last_open = i;
    } else if (s[i] == close && last_open != std::u32string::npos) {
      s.replace(last_open, i - last_open + 1, U" ");
      return true;
    }
  }
  return false;
}

void remove_annotations(std::u32string& s) {
  bool changed = true;
  while (changed) {
    changed = remove_one_pair(s, U'[', U']') || remove_one_pair(s, U'(', U')') ||
              remove_one_pair(s, U'*', U'*');
  }
}

void remove_speaker_label(std::u32string& s) {
  if (s.empty() || !is_ascii_letter(s[0])) return;
  std::size_t i = 1;
  while (i < s.size() && i <= 30 && is_speaker_label_char(s[i])) ++i;
  if (i < s.size() && s[i] == U':' && (i + 1 == s.size() || is_space(s[i + 1]))) {
    s.erase(0, i + 1);
  }
}

constexpr std::array<std::string_view, 20> kOnes = {
    "",        "one",     "two",       "three",    "four",     "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen"};
constexpr std::array<std::string_view, 10> kTens = {
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"};

std::array<std::string, 101> build_spelled_table() {
  std::array<std::string, 101> table;
  for (int n = 1; n < 20; ++n) table[n] = kOnes[n];
  for (int n = 20; n < 100; ++n) {
    table[n] = kTens[n / 10];
    if (n % 10 != 0) table[n] += " " + std::string(kOnes[n % 10]);
  }
  table[100] = "one hundred";
  return table;
}

const std::array<std::string, 101>& spelled_table() {
  static const auto table = build_spelled_table();
  return table;
}

bool is_ascii_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

std::optional<std::string_view> spelled_number(int n) {
  if (n < 1 || n > 100) return std::nullopt;
  return spelled_table()[n];
}

std::string strip_nonspeech(std::string_view text) {
  std::u32string s = utf8::decode_lossy(text);
  for (auto& c : s) {
    if (c == 0x2019) c = U'\'';
  }

  // Leading whitespace must not hide a speaker label.
  std::size_t lead = 0;
  while (lead < s.size() && is_space(s[lead])) ++lead;
  s.erase(0, lead);
  remove_speaker_label(s);
  remove_annotations(s);

  std::u32string kept;
  kept.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char32_t c = s[i];
    if (is_ascii_letter(c) || is_digit(c) || c == U'\'') {
      kept.push_back(c);
      continue;
    }
    if (is_space(c)) {
      kept.push_back(U' ');
      continue;
    }
    const bool is_punct = c < 0x80 || is_nonascii_symbol(c);
    if (!is_punct) {
      kept.push_back(c);  // non-Latin letters and the like
      continue;
    }
    const bool prev_digit = i > 0 && is_digit(s[i - 1]);
    const bool next_digit = i + 1 < s.size() && is_digit(s[i + 1]);
    if ((prev_digit && next_digit) || (!is_clause_mark(c) && (prev_digit || next_digit))) {
      kept.push_back(c);
    }
  }
  return utf8::encode(collapse_whitespace(kept));
}

std::string spell_numbers(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 16);
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_ascii_space(text[i])) {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !is_ascii_space(text[j])) ++j;
    const auto token = text.substr(i, j - i);
    const bool plain_integer = token.size() <= 3 && token[0] != '0' &&
                               token.find_first_not_of("0123456789") == std::string_view::npos;
    std::optional<std::string_view> spelled;
    if (plain_integer) spelled = spelled_number(std::stoi(std::string(token)));
    out.append(spelled ? *spelled : token);
    i = j;
  }
  return out;
}

std::string normalize(std::string_view text) {
  std::string s = spell_numbers(strip_nonspeech(text));
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return utf8::encode(collapse_whitespace(utf8::decode_lossy(s)));
}

bool matches_transcript_grammar(std::string_view text) {
  if (text.empty() || text.front() == ' ' || text.back() == ' ') return false;
  char prev = 0;
  for (char c : text) {
    const bool ok = (c >= 'a' && c <= 'z') || c == '\'' || c == ' ';
    if (!ok) return false;
    if (c == ' ' && prev == ' ') return false;
    prev = c;
  }
  return true;
}

}  // namespace capcorpus
