#include "pia/extractors/adapters.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sys/wait.h>

#include <json.hpp>

#include "pia/errors.hpp"

namespace pia::extractors {

namespace {

constexpr double kTimeTolerance = 1e-6;

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AdapterError("cannot open fixture " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError("malformed fixture " + path + ": " + e.what());
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw AdapterError("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::vector<WordSegment> segments_from_json(const nlohmann::json& j) {
  std::vector<WordSegment> out;
  for (const auto& s : j.at("segments")) {
    out.push_back({s.at("text").get<std::string>(), s.at("start").get<double>(), s.at("end").get<double>()});
  }
  return out;
}

std::vector<PhonemeInterval> intervals_from_json(const nlohmann::json& j) {
  std::vector<PhonemeInterval> out;
  for (const auto& s : j.at("intervals")) {
    out.push_back({s.at("symbol").get<std::string>(), s.at("start").get<double>(), s.at("end").get<double>()});
  }
  return out;
}

LandmarkSet landmarks_from_json(const nlohmann::json& f) {
  LandmarkSet set;
  set.detected = f.at("detected").get<bool>();
  if (set.detected) {
    for (const auto& p : f.at("points")) set.points.push_back({p.at(0).get<float>(), p.at(1).get<float>()});
  }
  return set;
}

void validate_landmarks(const LandmarkSet& set) {
  if (!set.detected) return;
  if (set.points.size() != static_cast<std::size_t>(kMeshLandmarkCount)) {
    throw AdapterError("landmark set must hold 468 points, got " + std::to_string(set.points.size()));
  }
  for (const auto& p : set.points) {
    if (!(p.x >= 0.0f && p.x <= 1.0f && p.y >= 0.0f && p.y <= 1.0f)) {
      throw AdapterError("landmark coordinate outside [0, 1]");
    }
  }
}

}  // namespace

AdapterKind adapter_kind_from_string(const std::string& text) {
  if (text == "live") return AdapterKind::kLive;
  if (text == "fixture") return AdapterKind::kFixture;
  if (text == "synthetic") return AdapterKind::kSynthetic;
  throw InvalidConfig("unknown adapter kind '" + text + "' (expected live|fixture|synthetic)");
}

std::string to_string(AdapterKind kind) {
  switch (kind) {
    case AdapterKind::kLive: return "live";
    case AdapterKind::kFixture: return "fixture";
    case AdapterKind::kSynthetic: return "synthetic";
  }
  return "unknown";
}

// ----------------------------------------------------------- base wrappers

std::vector<WordSegment> Transcriber::transcribe(const AudioTrack& audio) {
  if (audio.sample_rate != kCanonicalSampleRate || audio.channels != 1) {
    throw InvalidInput("transcription expects canonical 16 kHz mono audio");
  }
  if (is_silent(audio)) return {};
  auto segments = do_transcribe(audio);
  const double duration = audio.duration();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!(s.start >= 0.0 && s.start < s.end && s.end <= duration + kTimeTolerance)) {
      throw AdapterError("segment '" + s.text + "' lies outside [0, duration] or is empty");
    }
    if (i > 0 && s.start < segments[i - 1].end) throw AdapterError("segments overlap or are out of order");
  }
  return segments;
}

std::vector<PhonemeInterval> Phonemizer::phonemize(const std::vector<WordSegment>& segments) {
  for (const auto& s : segments) {
    if (!(s.end > s.start)) throw InvalidInput("word segment '" + s.text + "' has end <= start");
  }
  if (segments.empty()) return {};
  auto intervals = do_phonemize(segments);
  if (!phonemes_contained(segments, intervals)) {
    throw AdapterError("phoneme intervals are not contained in their word segments");
  }
  return intervals;
}

LandmarkSet LandmarkDetector::detect(const Frame& frame) {
  validate_frame(frame);
  if (is_black(frame.image)) return {};
  auto set = do_detect(frame);
  validate_landmarks(set);
  return set;
}

IdentityEmbedding IdentityEmbedder::embed(const Frame& frame) {
  validate_frame(frame);
  if (is_black(frame.image)) throw NoFaceError("no face in frame " + std::to_string(frame.index));
  IdentityEmbedding e;
  e.vector = do_embed(frame);
  e.frame_index = frame.index;
  if (e.vector.size() != static_cast<std::size_t>(kIdentityDim)) {
    throw AdapterError("identity embedding must have 512 components");
  }
  if (!std::all_of(e.vector.begin(), e.vector.end(), [](float v) { return std::isfinite(v); })) {
    throw AdapterError("identity embedding has non-finite components");
  }
  return e;
}

void validate_frame(const Frame& frame) {
  const auto& im = frame.image;
  if (im.width <= 0 || im.height <= 0 || im.channels <= 0) throw DecodeError("frame has empty dimensions");
  if (im.pixels.size() != static_cast<std::size_t>(im.width) * im.height * im.channels) {
    throw DecodeError("frame pixel count does not match its dimensions");
  }
  if (!std::all_of(im.pixels.begin(), im.pixels.end(), [](float v) { return std::isfinite(v); })) {
    throw DecodeError("frame has non-finite pixels");
  }
}

bool is_black(const Image& image) {
  return std::all_of(image.pixels.begin(), image.pixels.end(), [](float v) { return v < 1.0f / 255.0f; });
}

bool phonemes_contained(const std::vector<WordSegment>& segments, const std::vector<PhonemeInterval>& intervals) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    if (!(iv.start < iv.end)) return false;
    if (i > 0 && iv.start < intervals[i - 1].end) return false;
    const bool inside = std::any_of(segments.begin(), segments.end(), [&](const WordSegment& s) {
      return iv.start >= s.start - kTimeTolerance && iv.end <= s.end + kTimeTolerance;
    });
    if (!inside) return false;
  }
  return true;
}

// ------------------------------------------------------------ fixture I/O

std::vector<WordSegment> load_segments_json(const std::string& path) {
  try {
    return segments_from_json(read_json(path));
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError("bad transcript fixture " + path + ": " + e.what());
  }
}

void save_segments_json(const std::string& path, const std::vector<WordSegment>& segments) {
  nlohmann::json j;
  j["segments"] = nlohmann::json::array();
  for (const auto& s : segments) j["segments"].push_back({{"text", s.text}, {"start", s.start}, {"end", s.end}});
  write_json(path, j);
}

std::vector<PhonemeInterval> load_intervals_json(const std::string& path) {
  try {
    return intervals_from_json(read_json(path));
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError("bad phoneme fixture " + path + ": " + e.what());
  }
}

void save_intervals_json(const std::string& path, const std::vector<PhonemeInterval>& intervals) {
  nlohmann::json j;
  j["intervals"] = nlohmann::json::array();
  for (const auto& s : intervals) j["intervals"].push_back({{"symbol", s.symbol}, {"start", s.start}, {"end", s.end}});
  write_json(path, j);
}

std::vector<LandmarkSet> load_landmarks_json(const std::string& path) {
  const auto j = read_json(path);
  std::vector<LandmarkSet> frames;
  try {
    for (const auto& f : j.at("frames")) frames.push_back(landmarks_from_json(f));
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError("bad landmark fixture " + path + ": " + e.what());
  }
  return frames;
}

void save_landmarks_json(const std::string& path, const std::vector<LandmarkSet>& frames) {
  nlohmann::json j;
  j["frames"] = nlohmann::json::array();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    nlohmann::json f = {{"index", i}, {"detected", frames[i].detected}};
    auto pts = nlohmann::json::array();
    for (const auto& p : frames[i].points) pts.push_back({p.x, p.y});
    f["points"] = std::move(pts);
    j["frames"].push_back(std::move(f));
  }
  std::ofstream out(path);
  if (!out) throw AdapterError("cannot write " + path);
  out << j.dump() << '\n';
}

std::vector<std::vector<float>> load_embeddings_f32(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw AdapterError("cannot open embedding fixture " + path);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  const std::size_t row = kIdentityDim * sizeof(float);
  if (bytes % row != 0) throw AdapterError(path + " is not a whole number of 512-d float32 rows");
  in.seekg(0);
  std::vector<std::vector<float>> out(bytes / row, std::vector<float>(kIdentityDim));
  for (auto& e : out) in.read(reinterpret_cast<char*>(e.data()), static_cast<std::streamsize>(row));
  return out;
}

void save_embeddings_f32(const std::string& path, const std::vector<std::vector<float>>& embeddings) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AdapterError("cannot write " + path);
  for (const auto& e : embeddings) {
    if (e.size() != static_cast<std::size_t>(kIdentityDim)) throw InvalidInput("embedding must have 512 components");
    out.write(reinterpret_cast<const char*>(e.data()), static_cast<std::streamsize>(e.size() * sizeof(float)));
  }
}

// --------------------------------------------------------------- fixtures

FixtureTranscriber::FixtureTranscriber(std::string transcript_path) : path_(std::move(transcript_path)) {}

std::vector<WordSegment> FixtureTranscriber::do_transcribe(const AudioTrack&) { return load_segments_json(path_); }

FixturePhonemizer::FixturePhonemizer(std::string intervals_path) : path_(std::move(intervals_path)) {}

std::vector<PhonemeInterval> FixturePhonemizer::do_phonemize(const std::vector<WordSegment>&) {
  return load_intervals_json(path_);
}

FixtureLandmarkDetector::FixtureLandmarkDetector(const std::string& landmarks_path)
    : frames_(load_landmarks_json(landmarks_path)) {}

LandmarkSet FixtureLandmarkDetector::do_detect(const Frame& frame) {
  if (frame.index < 0 || frame.index >= static_cast<int>(frames_.size())) {
    throw AdapterError("no landmark fixture for frame " + std::to_string(frame.index));
  }
  return frames_[static_cast<std::size_t>(frame.index)];
}

FixtureIdentityEmbedder::FixtureIdentityEmbedder(const std::string& embeddings_path)
    : embeddings_(load_embeddings_f32(embeddings_path)) {}

std::vector<float> FixtureIdentityEmbedder::do_embed(const Frame& frame) {
  if (frame.index < 0 || frame.index >= static_cast<int>(embeddings_.size())) {
    throw AdapterError("no embedding fixture for frame " + std::to_string(frame.index));
  }
  return embeddings_[static_cast<std::size_t>(frame.index)];
}

std::vector<float> SyntheticIdentityEmbedder::do_embed(const Frame& frame) {
  if (frame.index < 0 || frame.index >= static_cast<int>(truth_.size())) {
    throw AdapterError("no planted embedding for frame " + std::to_string(frame.index));
  }
  return truth_[static_cast<std::size_t>(frame.index)];
}

// ------------------------------------------------------ reference phonemes

std::vector<std::string> ReferencePhonemizer::word_to_phonemes(const std::string& word) {
  static const std::map<std::string, std::vector<std::string>> kLexicon = {
      {"hello", {"h", "ɛ", "l", "o"}},      {"world", {"w", "ɜ", "ɹ", "l", "d"}},
      {"the", {"ð", "ə"}},                  {"a", {"ə"}},
      {"is", {"ɪ", "z"}},                   {"of", {"ʌ", "v"}},
      {"to", {"t", "u"}},                   {"you", {"j", "u"}},
      {"we", {"w", "i"}},                   {"me", {"m", "i"}},
      {"she", {"ʃ", "i"}},                  {"be", {"b", "i"}},
      {"go", {"ɡ", "o"}},                   {"so", {"s", "o"}},
      {"no", {"n", "o"}},                   {"show", {"ʃ", "o"}},
  };
  // Longest-match grapheme rules; multi-phoneme outputs are space separated.
  static const std::vector<std::pair<std::string, std::string>> kRules = {
      {"tch", "t ʃ"}, {"sh", "ʃ"}, {"ch", "t ʃ"}, {"th", "θ"}, {"ng", "ŋ"}, {"ph", "f"}, {"wh", "w"},
      {"ck", "k"},    {"ee", "i"}, {"ea", "i"},   {"oo", "u"}, {"oa", "o"}, {"ow", "o"}, {"ou", "aʊ"},
      {"ai", "eɪ"},   {"ay", "eɪ"}, {"qu", "k w"}, {"a", "æ"}, {"b", "b"},  {"c", "k"},  {"d", "d"},
      {"e", "ɛ"},     {"f", "f"},  {"g", "ɡ"},    {"h", "h"},  {"i", "ɪ"},  {"j", "d ʒ"}, {"k", "k"},
      {"l", "l"},     {"m", "m"},  {"n", "n"},    {"o", "o"},  {"p", "p"},  {"q", "k"},  {"r", "ɹ"},
      {"s", "s"},     {"t", "t"},  {"u", "ʌ"},    {"v", "v"},  {"w", "w"},  {"x", "k s"}, {"y", "j"},
      {"z", "z"}};

  std::string w;
  for (unsigned char c : word) {
    if (std::isalpha(c)) w.push_back(static_cast<char>(std::tolower(c)));
  }
  if (w.empty()) return {};
  if (const auto it = kLexicon.find(w); it != kLexicon.end()) return it->second;
  // Silent final e after a consonant.
  if (w.size() > 2 && w.back() == 'e' && std::string("aeiou").find(w[w.size() - 2]) == std::string::npos) w.pop_back();

  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < w.size()) {
    // Doubled consonants collapse.
    if (i + 1 < w.size() && w[i] == w[i + 1] && std::string("aeiou").find(w[i]) == std::string::npos) {
      ++i;
      continue;
    }
    bool matched = false;
    for (const auto& [graph, phones] : kRules) {
      if (w.compare(i, graph.size(), graph) != 0) continue;
      std::string token;
      for (char c : phones) {
        if (c == ' ') {
          out.push_back(token);
          token.clear();
        } else {
          token.push_back(c);
        }
      }
      out.push_back(token);
      i += graph.size();
      matched = true;
      break;
    }
    if (!matched) ++i;
  }
  // Word-final y reads as a vowel.
  if (!out.empty() && out.back() == "j" && w.back() == 'y' && out.size() > 1) out.back() = "i";
  return out;
}

std::vector<PhonemeInterval> ReferencePhonemizer::do_phonemize(const std::vector<WordSegment>& segments) {
  std::vector<PhonemeInterval> out;
  for (const auto& s : segments) {
    const auto phones = word_to_phonemes(s.text);
    const auto n = phones.size();
    for (std::size_t j = 0; j < n; ++j) {
      const double start = s.start + (s.end - s.start) * static_cast<double>(j) / static_cast<double>(n);
      const double end = (j + 1 == n) ? s.end : s.start + (s.end - s.start) * static_cast<double>(j + 1) / static_cast<double>(n);
      out.push_back({phones[j], start, end});
    }
  }
  return out;
}

// -------------------------------------------------------------------- live

LiveCommand::LiveCommand(std::string command_template, std::string work_dir)
    : template_(std::move(command_template)), work_dir_(std::move(work_dir)) {
  if (template_.empty()) throw AdapterError("live adapter needs a command");
}

std::string LiveCommand::run(const std::string& input_path) const {
  std::string cmd = template_;
  const std::string token = "{input}";
  const std::string quoted = "'" + input_path + "'";
  if (const auto pos = cmd.find(token); pos != std::string::npos) {
    cmd.replace(pos, token.size(), quoted);
  } else {
    cmd += " " + quoted;
  }
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) throw AdapterError("cannot start '" + cmd + "'");
  std::string output;
  std::array<char, 4096> buffer{};
  while (const auto n = std::fread(buffer.data(), 1, buffer.size(), pipe)) output.append(buffer.data(), n);
  const int status = pclose(pipe);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw AdapterError("live adapter command failed or is unavailable: " + template_);
  }
  return output;
}

namespace {

nlohmann::json parse_live(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError(std::string("live adapter produced invalid JSON: ") + e.what());
  }
}

std::string stage_path(const LiveCommand& command, const std::string& name) {
  std::filesystem::create_directories(command.work_dir());
  return (std::filesystem::path(command.work_dir()) / name).string();
}

}  // namespace

std::vector<WordSegment> LiveTranscriber::do_transcribe(const AudioTrack& audio) {
  const auto path = stage_path(command_, "live_audio.wav");
  write_wav_pcm16(path, audio);
  try {
    return segments_from_json(parse_live(command_.run(path)));
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError(std::string("live transcript: ") + e.what());
  }
}

std::vector<PhonemeInterval> LivePhonemizer::do_phonemize(const std::vector<WordSegment>& segments) {
  const auto path = stage_path(command_, "live_segments.json");
  save_segments_json(path, segments);
  try {
    return intervals_from_json(parse_live(command_.run(path)));
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError(std::string("live phonemes: ") + e.what());
  }
}

LandmarkSet LiveLandmarkDetector::do_detect(const Frame& frame) {
  const auto path = stage_path(command_, "live_frame.ppm");
  write_ppm(path, frame.image);
  try {
    return landmarks_from_json(parse_live(command_.run(path)));
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError(std::string("live landmarks: ") + e.what());
  }
}

std::vector<float> LiveIdentityEmbedder::do_embed(const Frame& frame) {
  const auto path = stage_path(command_, "live_frame.ppm");
  write_ppm(path, frame.image);
  try {
    return parse_live(command_.run(path)).get<std::vector<float>>();
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError(std::string("live embedding: ") + e.what());
  }
}

void write_ppm(const std::string& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AdapterError("cannot write " + path);
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const float v = image.at(x, y, std::min(c, image.channels - 1));
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f))));
      }
    }
  }
}

}  // namespace pia::extractors
