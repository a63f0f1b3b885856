#include "capcorpus/wav.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace capcorpus::wav {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}
std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + i]);
  return v;
}
std::uint16_t get_u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}

}  // namespace

std::string encode(const Pcm16& audio) {
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, audio.channels);
  put_u32(out, audio.sample_rate);
  put_u32(out, audio.sample_rate * audio.channels * 2);
  put_u16(out, static_cast<std::uint16_t>(audio.channels * 2));
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (std::int16_t s : audio.samples) put_u16(out, static_cast<std::uint16_t>(s));
  return out;
}

Pcm16 decode(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE") {
    throw IoError("not a RIFF/WAVE file");
  }
  Pcm16 audio;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const auto id = bytes.substr(pos, 4);
    const std::uint32_t size = get_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw IoError("truncated WAV chunk");
    if (id == "fmt ") {
      if (size < 16) throw IoError("short fmt chunk");
      if (get_u16(bytes, body) != 1 || get_u16(bytes, body + 14) != 16) {
        throw IoError("only PCM16 WAV is supported");
      }
      audio.channels = get_u16(bytes, body + 2);
      audio.sample_rate = get_u32(bytes, body + 4);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw IoError("data chunk before fmt chunk");
      audio.samples.resize(size / 2);
      for (std::size_t i = 0; i < audio.samples.size(); ++i) {
        audio.samples[i] = static_cast<std::int16_t>(get_u16(bytes, body + 2 * i));
      }
      return audio;
    }
    pos = body + size + (size & 1);
  }
  throw IoError("WAV file without data chunk");
}

void write_file(const std::filesystem::path& path, const Pcm16& audio) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const auto bytes = encode(audio);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Pcm16 read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode(buf.str());
}

std::size_t frame_at(Millis t, std::uint32_t sample_rate) {
  if (t.count() <= 0) return 0;
  // Rounded to the nearest frame; exact when sample_rate is a multiple of 1000.
  return static_cast<std::size_t>((static_cast<std::uint64_t>(t.count()) * sample_rate + 500) / 1000);
}

Pcm16 slice(const Pcm16& audio, Millis start, Millis end) {
  Pcm16 out;
  out.sample_rate = audio.sample_rate;
  out.channels = audio.channels;
  const std::size_t total = audio.frames();
  const std::size_t first = std::min(frame_at(start, audio.sample_rate), total);
  const std::size_t last = std::min(frame_at(end, audio.sample_rate), total);
  if (last > first) {
    out.samples.assign(audio.samples.begin() + static_cast<std::ptrdiff_t>(first * audio.channels),
                       audio.samples.begin() + static_cast<std::ptrdiff_t>(last * audio.channels));
  }
  return out;
}

double rms(const Pcm16& audio) {
  if (audio.samples.empty()) return 0.0;
  double acc = 0.0;
  for (std::int16_t s : audio.samples) acc += static_cast<double>(s) * s;
  return std::sqrt(acc / static_cast<double>(audio.samples.size()));
}

}  // namespace capcorpus::wav
