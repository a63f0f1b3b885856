#include "capcorpus/metrics.hpp"

#include <algorithm>

#include "capcorpus/utf8.hpp"

namespace capcorpus {

template <class T>
EditCounts align_tokens(std::span<const T> ref, std::span<const T> hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t width = m + 1;
  std::vector<std::uint32_t> cost((n + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return cost[i * width + j]; };

  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditCounts counts;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t here = at(i, j);
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && at(i - 1, j - 1) == here) {
      ++counts.correct, --i, --j;
    } else if (i > 0 && j > 0 && ref[i - 1] != hyp[j - 1] && at(i - 1, j - 1) + 1 == here) {
      ++counts.substitutions, --i, --j;
    } else if (i > 0 && at(i - 1, j) + 1 == here) {
      ++counts.deletions, --i;
    } else {
      ++counts.insertions, --j;
    }
  }
  return counts;
}

template EditCounts align_tokens<std::string>(std::span<const std::string>, std::span<const std::string>);
template EditCounts align_tokens<char32_t>(std::span<const char32_t>, std::span<const char32_t>);

double wer(const EditCounts& counts) {
  const auto denom = counts.reference_length();
  if (denom <= 0) throw EmptyReference();
  return static_cast<double>(counts.errors()) / static_cast<double>(denom);
}

double cer(std::string_view ref, std::string_view hyp) {
  const auto r = utf8::decode_lossy(ref);
  const auto h = utf8::decode_lossy(hyp);
  return wer(align_tokens<char32_t>(std::span<const char32_t>(r), std::span<const char32_t>(h)));
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\n') ++j;
    if (j > i) words.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return words;
}

EditCounts word_counts(std::string_view ref, std::string_view hyp) {
  return align_tokens(split_words(ref), split_words(hyp));
}

EditCounts pooled_counts(std::span<const std::pair<std::string, std::string>> pairs) {
  EditCounts total;
  for (const auto& [ref, hyp] : pairs) total += word_counts(ref, hyp);
  return total;
}

double pooled_wer(std::span<const std::pair<std::string, std::string>> pairs) {
  return wer(pooled_counts(pairs));
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

}  // namespace capcorpus
