#pragma once

#include <string>
#include <vector>

namespace pia::extractors {

inline constexpr int kCanonicalSampleRate = 16000;

struct AudioTrack {
  std::vector<float> samples;  // interleaved when channels > 1
  int sample_rate = 0;
  int channels = 1;

  std::size_t frame_count() const { return channels > 0 ? samples.size() / static_cast<std::size_t>(channels) : 0; }
  double duration() const { return sample_rate > 0 ? static_cast<double>(frame_count()) / sample_rate : 0.0; }
};

// Down-mixes to mono by channel averaging and resamples to 16 kHz with a
// windowed-sinc interpolator (low-passed at the lower Nyquist rate).
// Throws InvalidInput for empty audio or a non-positive rate/channel count.
AudioTrack canonicalize_audio(const AudioTrack& raw);

bool is_silent(const AudioTrack& audio);

// 16-bit PCM or 32-bit float RIFF/WAVE. Throws DecodeError on malformed files.
AudioTrack read_wav(const std::string& path);
void write_wav_pcm16(const std::string& path, const AudioTrack& audio);

}  // namespace pia::extractors
