#include "pia/extractors/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include "pia/errors.hpp"

namespace pia::extractors {

namespace {

constexpr int kSincHalfWidth = 16;  // taps on each side at the output rate

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double blackman(double x, double half_width) {
  // x in [-half_width, half_width]
  const double r = (x + half_width) / (2.0 * half_width);
  return 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * r) + 0.08 * std::cos(4.0 * std::numbers::pi * r);
}

std::vector<float> resample(const std::vector<float>& mono, int from_rate, int to_rate) {
  const double ratio = static_cast<double>(to_rate) / from_rate;
  const auto out_count =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(mono.size()) * ratio)));
  const double cutoff = std::min(1.0, ratio);  // relative to the input Nyquist
  const double half_width = kSincHalfWidth / cutoff;
  std::vector<float> out(out_count);
  const auto n = static_cast<long>(mono.size());
  for (std::size_t i = 0; i < out_count; ++i) {
    const double center = static_cast<double>(i) / ratio;
    const long lo = std::max(0L, static_cast<long>(std::ceil(center - half_width)));
    const long hi = std::min(n - 1, static_cast<long>(std::floor(center + half_width)));
    double acc = 0.0;
    double weight_sum = 0.0;
    for (long k = lo; k <= hi; ++k) {
      const double x = static_cast<double>(k) - center;
      const double w = cutoff * sinc(cutoff * x) * blackman(x, half_width);
      acc += w * mono[static_cast<std::size_t>(k)];
      weight_sum += w;
    }
    out[i] = static_cast<float>(weight_sum != 0.0 ? acc / weight_sum : 0.0);
  }
  return out;
}

template <typename T>
T read_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

}  // namespace

AudioTrack canonicalize_audio(const AudioTrack& raw) {
  if (raw.samples.empty()) throw InvalidInput("empty audio");
  if (raw.sample_rate <= 0) throw InvalidInput("sample rate must be positive");
  if (raw.channels <= 0) throw InvalidInput("channel count must be positive");
  if (raw.samples.size() % static_cast<std::size_t>(raw.channels) != 0) {
    throw InvalidInput("sample count is not a multiple of the channel count");
  }

  std::vector<float> mono(raw.frame_count());
  const auto channels = static_cast<std::size_t>(raw.channels);
  for (std::size_t f = 0; f < mono.size(); ++f) {
    double sum = 0.0;
    for (std::size_t c = 0; c < channels; ++c) sum += raw.samples[f * channels + c];
    mono[f] = static_cast<float>(sum / static_cast<double>(channels));
  }

  AudioTrack out;
  out.channels = 1;
  out.sample_rate = kCanonicalSampleRate;
  out.samples = raw.sample_rate == kCanonicalSampleRate ? std::move(mono) : resample(mono, raw.sample_rate, kCanonicalSampleRate);
  return out;
}

bool is_silent(const AudioTrack& audio) {
  return std::all_of(audio.samples.begin(), audio.samples.end(), [](float s) { return s == 0.0f; });
}

AudioTrack read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open " + path);
  char riff[4], wave[4];
  in.read(riff, 4);
  read_le<std::uint32_t>(in);
  in.read(wave, 4);
  if (!in || std::memcmp(riff, "RIFF", 4) != 0 || std::memcmp(wave, "WAVE", 4) != 0) {
    throw DecodeError(path + " is not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  while (in) {
    char id[4];
    in.read(id, 4);
    const auto size = read_le<std::uint32_t>(in);
    if (!in) break;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      format = read_le<std::uint16_t>(in);
      channels = read_le<std::uint16_t>(in);
      rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);
      read_le<std::uint16_t>(in);
      bits = read_le<std::uint16_t>(in);
      in.seekg(static_cast<std::streamoff>(size) - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw DecodeError(path + ": data chunk before fmt chunk");
      AudioTrack track;
      track.sample_rate = static_cast<int>(rate);
      track.channels = channels;
      if (format == 1 && bits == 16) {
        std::vector<std::int16_t> raw(size / 2);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 2));
        track.samples.reserve(raw.size());
        for (auto s : raw) track.samples.push_back(static_cast<float>(s) / 32768.0f);
      } else if (format == 3 && bits == 32) {
        track.samples.resize(size / 4);
        in.read(reinterpret_cast<char*>(track.samples.data()), static_cast<std::streamsize>(track.samples.size() * 4));
      } else {
        throw DecodeError(path + ": unsupported WAV encoding (format " + std::to_string(format) + ", " +
                          std::to_string(bits) + " bits)");
      }
      if (!in) throw DecodeError(path + ": truncated data chunk");
      return track;
    } else {
      in.seekg(size + (size & 1u), std::ios::cur);
    }
  }
  throw DecodeError(path + ": no data chunk");
}

void write_wav_pcm16(const std::string& path, const AudioTrack& audio) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DecodeError("cannot open " + path + " for writing");
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  const auto put32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  const auto put16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
  out.write("RIFF", 4);
  put32(36 + data_bytes);
  out.write("WAVEfmt ", 8);
  put32(16);
  put16(1);
  put16(static_cast<std::uint16_t>(audio.channels));
  put32(static_cast<std::uint32_t>(audio.sample_rate));
  put32(static_cast<std::uint32_t>(audio.sample_rate * audio.channels * 2));
  put16(static_cast<std::uint16_t>(audio.channels * 2));
  put16(16);
  out.write("data", 4);
  put32(data_bytes);
  for (float s : audio.samples) {
    const auto v = static_cast<std::int16_t>(std::lround(std::clamp(s, -1.0f, 32767.0f / 32768.0f) * 32768.0f));
    put16(static_cast<std::uint16_t>(v));
  }
}

}  // namespace pia::extractors
