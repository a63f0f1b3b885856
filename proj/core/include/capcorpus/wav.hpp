#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "capcorpus/model.hpp"

namespace capcorpus::wav {

inline constexpr std::uint32_t kSampleRate = 16000;

struct Pcm16 {
  std::uint32_t sample_rate = kSampleRate;
  std::uint16_t channels = 1;
  std::vector<std::int16_t> samples;  // interleaved

  std::size_t frames() const { return channels == 0 ? 0 : samples.size() / channels; }
};

// RIFF/WAVE, PCM16 little endian.
std::string encode(const Pcm16& audio);
Pcm16 decode(std::string_view bytes);

void write_file(const std::filesystem::path& path, const Pcm16& audio);
Pcm16 read_file(const std::filesystem::path& path);

// Frame index of a timestamp at `sample_rate` (exact for millisecond times at
// 16 kHz).
std::size_t frame_at(Millis t, std::uint32_t sample_rate);

// Frames [start, end) of a mono file, clipped to its length.
Pcm16 slice(const Pcm16& audio, Millis start, Millis end);

double rms(const Pcm16& audio);

}  // namespace capcorpus::wav
