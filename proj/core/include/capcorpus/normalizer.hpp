#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace capcorpus {

// Removes a leading speaker label, bracketed / parenthesised / star-delimited
// annotations and punctuation, then collapses whitespace.
//
// Punctuation that carries numeric meaning is kept so the transcript is
// rejected later instead of being silently rewritten: a mark between two
// digits ("1,500", "3.5", "3:30") and any non-clause symbol touching a digit
// ("$5", "5%"). Non-ASCII letters are kept for the charset gate to see;
// U+2019 becomes an ASCII apostrophe.
std::string strip_nonspeech(std::string_view text);

// Replaces standalone integer tokens in [1, 100] by their spelled form
// ("21" -> "twenty one"). Everything else is left as is.
std::string spell_numbers(std::string_view text);

// Spelled form for n in [1, 100]; nullopt otherwise.
std::optional<std::string_view> spelled_number(int n);

// strip_nonspeech -> spell_numbers -> lowercase -> whitespace collapse.
std::string normalize(std::string_view text);

// True iff `text` is non-empty and made of a-z, apostrophe and single
// interior spaces.
bool matches_transcript_grammar(std::string_view text);

}  // namespace capcorpus
