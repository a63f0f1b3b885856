#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "capcorpus/model.hpp"

namespace capcorpus {

struct EditCounts {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t correct = 0;

  std::int64_t errors() const { return substitutions + deletions + insertions; }
  std::int64_t reference_length() const { return substitutions + deletions + correct; }
  std::int64_t hypothesis_length() const { return substitutions + insertions + correct; }

  EditCounts& operator+=(const EditCounts& o) {
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    correct += o.correct;
    return *this;
  }
  bool operator==(const EditCounts&) const = default;
};

class EmptyReference : public Error {
 public:
  EmptyReference() : Error("empty reference: WER is undefined") {}
};

// Minimum unit-cost alignment. Among optimal alignments the backtrace prefers
// correct > substitution > deletion > insertion at every step, so counts are
// reproducible.
template <class T>
EditCounts align_tokens(std::span<const T> ref, std::span<const T> hyp);

extern template EditCounts align_tokens<std::string>(std::span<const std::string>,
                                                     std::span<const std::string>);
extern template EditCounts align_tokens<char32_t>(std::span<const char32_t>,
                                                  std::span<const char32_t>);

inline EditCounts align_tokens(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  return align_tokens<std::string>(std::span<const std::string>(ref), std::span<const std::string>(hyp));
}

// (S + D + I) / (S + D + C). Throws EmptyReference when S + D + C == 0.
double wer(const EditCounts& counts);

// WER over code points, spaces included. Throws EmptyReference on empty ref.
double cer(std::string_view ref, std::string_view hyp);

std::vector<std::string> split_words(std::string_view text);

EditCounts word_counts(std::string_view ref, std::string_view hyp);

// Sums per-pair word counts, then applies wer().
EditCounts pooled_counts(std::span<const std::pair<std::string, std::string>> pairs);
double pooled_wer(std::span<const std::pair<std::string, std::string>> pairs);

// Plain Levenshtein distance over code points.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

}  // namespace capcorpus
