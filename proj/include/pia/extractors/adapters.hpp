#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pia/extractors/audio.hpp"
#include "pia/types.hpp"

namespace pia::extractors {

// Which implementation backs an adapter: a wrapped external model, replayed
// recordings, or synthgen ground truth.
enum class AdapterKind { kLive, kFixture, kSynthetic };

AdapterKind adapter_kind_from_string(const std::string& text);
std::string to_string(AdapterKind kind);

class Transcriber {
 public:
  virtual ~Transcriber() = default;
  // Ordered, non-overlapping word segments within [0, duration]; silent audio yields none.
  std::vector<WordSegment> transcribe(const AudioTrack& audio);

 protected:
  virtual std::vector<WordSegment> do_transcribe(const AudioTrack& audio) = 0;
};

class Phonemizer {
 public:
  virtual ~Phonemizer() = default;
  // Throws InvalidInput for segments with end <= start.
  std::vector<PhonemeInterval> phonemize(const std::vector<WordSegment>& segments);

 protected:
  virtual std::vector<PhonemeInterval> do_phonemize(const std::vector<WordSegment>& segments) = 0;
};

class LandmarkDetector {
 public:
  virtual ~LandmarkDetector() = default;
  // Corrupt frames throw DecodeError; an all-black frame reports detected = false.
  LandmarkSet detect(const Frame& frame);

 protected:
  virtual LandmarkSet do_detect(const Frame& frame) = 0;
};

class IdentityEmbedder {
 public:
  virtual ~IdentityEmbedder() = default;
  // Throws NoFaceError for frames without a face (including all-black frames).
  IdentityEmbedding embed(const Frame& frame);

 protected:
  virtual std::vector<float> do_embed(const Frame& frame) = 0;
};

// Throws DecodeError for inconsistent dimensions or non-finite pixels.
void validate_frame(const Frame& frame);
bool is_black(const Image& image);

// Every interval lies inside some segment and intervals are pairwise disjoint and ordered.
bool phonemes_contained(const std::vector<WordSegment>& segments, const std::vector<PhonemeInterval>& intervals);

// ---------------------------------------------------------------- fixtures

std::vector<WordSegment> load_segments_json(const std::string& path);
void save_segments_json(const std::string& path, const std::vector<WordSegment>& segments);
std::vector<PhonemeInterval> load_intervals_json(const std::string& path);
void save_intervals_json(const std::string& path, const std::vector<PhonemeInterval>& intervals);
std::vector<LandmarkSet> load_landmarks_json(const std::string& path);
void save_landmarks_json(const std::string& path, const std::vector<LandmarkSet>& frames);
std::vector<std::vector<float>> load_embeddings_f32(const std::string& path);
void save_embeddings_f32(const std::string& path, const std::vector<std::vector<float>>& embeddings);

class FixtureTranscriber final : public Transcriber {
 public:
  explicit FixtureTranscriber(std::string transcript_path);

 protected:
  std::vector<WordSegment> do_transcribe(const AudioTrack& audio) override;

 private:
  std::string path_;
};

class FixturePhonemizer final : public Phonemizer {
 public:
  explicit FixturePhonemizer(std::string intervals_path);

 protected:
  std::vector<PhonemeInterval> do_phonemize(const std::vector<WordSegment>& segments) override;

 private:
  std::string path_;
};

class FixtureLandmarkDetector final : public LandmarkDetector {
 public:
  explicit FixtureLandmarkDetector(const std::string& landmarks_path);

 protected:
  LandmarkSet do_detect(const Frame& frame) override;

 private:
  std::vector<LandmarkSet> frames_;
};

class FixtureIdentityEmbedder final : public IdentityEmbedder {
 public:
  explicit FixtureIdentityEmbedder(const std::string& embeddings_path);

 protected:
  std::vector<float> do_embed(const Frame& frame) override;

 private:
  std::vector<std::vector<float>> embeddings_;
};

// ------------------------------------------------------ reference / synthetic

// Rule-based grapheme-to-IPA conversion with a small built-in lexicon; each
// word's duration is split uniformly across its phonemes.
class ReferencePhonemizer final : public Phonemizer {
 public:
  static std::vector<std::string> word_to_phonemes(const std::string& word);

 protected:
  std::vector<PhonemeInterval> do_phonemize(const std::vector<WordSegment>& segments) override;
};

// Replays synthgen's planted embeddings by frame index.
class SyntheticIdentityEmbedder final : public IdentityEmbedder {
 public:
  explicit SyntheticIdentityEmbedder(std::vector<std::vector<float>> truth) : truth_(std::move(truth)) {}

 protected:
  std::vector<float> do_embed(const Frame& frame) override;

 private:
  std::vector<std::vector<float>> truth_;
};

// ------------------------------------------------------------------- live

// Wraps an external model behind a shell command. The command template's
// "{input}" is replaced by a file path holding the input (WAV, segment JSON or
// a binary PPM frame); the command must print the fixture JSON format (or, for
// identity, a JSON array of 512 numbers) on stdout. Inputs are staged under
// work_dir. A failing or missing command raises AdapterError.
class LiveCommand {
 public:
  LiveCommand(std::string command_template, std::string work_dir);
  std::string run(const std::string& input_path) const;
  const std::string& work_dir() const { return work_dir_; }

 private:
  std::string template_;
  std::string work_dir_;
};

class LiveTranscriber final : public Transcriber {
 public:
  explicit LiveTranscriber(LiveCommand command) : command_(std::move(command)) {}

 protected:
  std::vector<WordSegment> do_transcribe(const AudioTrack& audio) override;

 private:
  LiveCommand command_;
};

class LivePhonemizer final : public Phonemizer {
 public:
  explicit LivePhonemizer(LiveCommand command) : command_(std::move(command)) {}

 protected:
  std::vector<PhonemeInterval> do_phonemize(const std::vector<WordSegment>& segments) override;

 private:
  LiveCommand command_;
};

class LiveLandmarkDetector final : public LandmarkDetector {
 public:
  explicit LiveLandmarkDetector(LiveCommand command) : command_(std::move(command)) {}

 protected:
  LandmarkSet do_detect(const Frame& frame) override;

 private:
  LiveCommand command_;
};

// The live embedder passes the full frame; face cropping is the wrapped model's job.
class LiveIdentityEmbedder final : public IdentityEmbedder {
 public:
  explicit LiveIdentityEmbedder(LiveCommand command) : command_(std::move(command)) {}

 protected:
  std::vector<float> do_embed(const Frame& frame) override;

 private:
  LiveCommand command_;
};

void write_ppm(const std::string& path, const Image& image);

}  // namespace pia::extractors
