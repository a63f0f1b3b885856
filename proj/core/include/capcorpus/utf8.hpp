#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace capcorpus::utf8 {

// Decodes UTF-8 into code points. Returns nullopt on malformed input
// (overlongs, surrogates and truncated sequences included).
std::optional<std::u32string> decode(std::string_view bytes);

// Lossy variant: malformed bytes become U+FFFD.
std::u32string decode_lossy(std::string_view bytes);

std::string encode(std::u32string_view cps);
void append(std::string& out, char32_t cp);

bool is_ascii(std::string_view bytes);

}  // namespace capcorpus::utf8
