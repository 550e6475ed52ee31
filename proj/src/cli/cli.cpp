#include "pia/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pia/alignment/index.hpp"
#include "pia/errors.hpp"
#include "pia/extractors/audio.hpp"
#include "pia/extractors/cache.hpp"
#include "pia/extractors/frames.hpp"
#include "pia/extractors/pipeline.hpp"
#include "pia/geometry/geometry.hpp"
#include "pia/harness/ablation.hpp"
#include "pia/harness/dataset.hpp"
#include "pia/harness/evaluate.hpp"
#include "pia/harness/metrics.hpp"
#include "pia/harness/train.hpp"
#include "pia/identity/drift.hpp"
#include "pia/model/detector.hpp"
#include "pia/plot/plot.hpp"
#include "pia/synthgen/synthgen.hpp"

namespace pia::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr plot::Rgb kRealColor{31, 119, 180};
constexpr plot::Rgb kFakeColor{214, 39, 40};
const std::vector<plot::Rgb> kPalette = {{31, 119, 180}, {214, 39, 40}, {44, 160, 44}, {148, 103, 189}, {255, 127, 14}};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot read config file " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidConfig("config file " + path + " is not valid JSON: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
}

// Resolves an output name below the output directory; absolute names are kept.
fs::path under(const std::string& out_dir, const std::string& name) {
  const fs::path p(name);
  return p.is_absolute() ? p : fs::path(out_dir) / p;
}

std::string file_stem_id(const std::string& name) {
  std::string s = name;
  std::replace(s.begin(), s.end(), '/', '_');
  return s;
}

// ----------------------------------------------------------------- layering

// Built-in defaults, overlaid by a config file, overlaid by explicit flags.
struct Layers {
  ordered_json values;

  void overlay_file(const std::string& path, const std::vector<std::string>& sections) {
    if (path.empty()) return;
    const auto file = read_json_file(path);
    if (!file.is_object()) throw InvalidConfig("config file must hold a JSON object");
    for (const auto& [key, value] : file.items()) {
      if (!values.contains(key)) throw InvalidConfig("unknown config key '" + key + "'");
      if (std::find(sections.begin(), sections.end(), key) != sections.end()) {
        if (!value.is_object()) throw InvalidConfig("config section '" + key + "' must be an object");
        for (const auto& [k, v] : value.items()) {
          if (!values[key].contains(k)) throw InvalidConfig("unknown config key '" + key + "." + k + "'");
          values[key][k] = v;
        }
      } else {
        values[key] = value;
      }
    }
  }
};

// Flag values that were given on the command line, keyed by config key.
struct FlagOverrides {
  std::map<std::string, std::function<json()>> getters;
  std::map<std::string, CLI::Option*> options;

  template <typename T>
  void add(CLI::App* app, const std::string& flag, const std::string& key, T& storage, const std::string& help) {
    options[key] = app->add_option(flag, storage, help + " [" + key + "]");
    getters[key] = [&storage] { return json(storage); };
  }

  void apply(ordered_json& values) const {
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) values[key] = getters.at(key)();
    }
  }
};

void print_config(std::ostream& out, const std::string& command, const ordered_json& values) {
  out << "config " << command << ": " << values.dump() << '\n';
}

// ------------------------------------------------------------ train settings

struct TrainSettings {
  std::string config_path;
  std::string data;
  std::string out;
  bool verbose = false;
  FlagOverrides flags;
  harness::TrainConfig train_storage;
  std::string backbone_weights;
  CLI::Option* backbone_option = nullptr;

  void bind(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file (train keys and an optional \"model\" object)")
        ->check(CLI::ExistingFile);
    app->add_option("--data", data, "dataset index (index.jsonl)")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "output directory")->required();
    app->add_flag("-v,--verbose", verbose, "print per-step losses");
    flags.add(app, "--lr", "learning_rate", train_storage.learning_rate, "Adam learning rate");
    flags.add(app, "--weight-decay", "weight_decay", train_storage.weight_decay, "L2 weight decay");
    flags.add(app, "--epochs", "epochs", train_storage.epochs, "training epochs");
    flags.add(app, "--batch-size", "batch_size", train_storage.batch_size, "videos per batch");
    flags.add(app, "--lambda", "lambda", train_storage.lambda, "identity consistency weight");
    flags.add(app, "--heads", "heads", train_storage.heads, "attention heads");
    flags.add(app, "--seed", "seed", train_storage.seed, "random seed");
    flags.add(app, "--label-smoothing", "label_smoothing", train_storage.label_smoothing, "label smoothing");
    backbone_option = app->add_option("--backbone-weights", backbone_weights,
                                      "checkpoint supplying image backbone weights [model.backbone_weights]");
    app->footer(
        "Config keys: optimizer, learning_rate, weight_decay, epochs, batch_size, lambda, heads, seed,\n"
        "label_smoothing, beta1, beta2, adam_epsilon, and model: {architecture, d, heads, key_dim,\n"
        "geometry_hidden, identity_hidden, head_hidden, conv3d_channels, backbone_channels, backbone,\n"
        "backbone_weights, use_geometry, use_visual, use_identity, use_phoneme, num_classes, group_size,\n"
        "output_init_scale}. Precedence: flag > config file > default.");
  }

  // Returns the effective configuration as JSON.
  ordered_json resolve(harness::TrainConfig& train, model::ModelConfig& model) const {
    Layers layers;
    layers.values = harness::TrainConfig{}.to_json();
    layers.values["model"] = model::ModelConfig{}.to_json();
    layers.overlay_file(config_path, {"model"});
    flags.apply(layers.values);
    if (backbone_option->count() > 0) layers.values["model"]["backbone_weights"] = backbone_weights;
    json train_json = layers.values;
    train_json.erase("model");
    train = harness::TrainConfig{};
    train.apply_json(train_json);
    train.validate();
    model = model::ModelConfig::from_json(layers.values["model"]);
    model.heads = train.heads;
    model.validate();
    layers.values["model"]["heads"] = train.heads;
    return layers.values;
  }
};

// ---------------------------------------------------------------- commands

struct SynthArgs {
  std::string config_path;
  std::string out;
  int real = 60;
  int fake = 60;
  std::uint64_t seed = 0;
  bool raw_scale = false;
  double fps = 25.0;
  FlagOverrides flags;
};

int cmd_synth(SynthArgs& a, std::ostream& out) {
  Layers layers;
  layers.values = {{"real", 60}, {"fake", 60}, {"seed", 0}, {"raw_scale", false}, {"fps", 25.0}};
  layers.overlay_file(a.config_path, {});
  a.flags.apply(layers.values);
  print_config(out, "synth", layers.values);
  synthgen::SynthOptions options;
  options.raw_scale = layers.values["raw_scale"].get<bool>();
  options.fps = layers.values["fps"].get<double>();
  const auto summary = synthgen::generate_dataset(layers.values["real"].get<int>(), layers.values["fake"].get<int>(),
                                                  layers.values["seed"].get<std::uint64_t>(), a.out, options);
  out << "wrote " << summary.videos << " videos, " << summary.groups << " groups to " << summary.index_path << '\n';
  return 0;
}

struct ExtractArgs {
  std::string out;
  std::string adapters = "fixture";
  std::string id = "video";
  std::string label = "real";
  std::string category;
  std::string split;
  double fps = 25.0;
  std::string frames_dir, video, audio;
  std::string transcript, phonemes, landmarks, embeddings;
  std::string transcribe_cmd, phonemize_cmd, landmark_cmd, embed_cmd;
  std::uint64_t seed = 0;
};

int cmd_extract(const ExtractArgs& a, std::ostream& out) {
  const auto kind = extractors::adapter_kind_from_string(a.adapters);
  const Label label = label_from_string(a.label);
  const std::string category = a.category.empty() ? (label == Label::kReal ? "real" : "fake") : a.category;
  ordered_json shown = {{"adapters", a.adapters}, {"id", a.id},     {"label", a.label},
                        {"category", category},   {"split", a.split}, {"fps", a.fps}};
  print_config(out, "extract", shown);
  fs::create_directories(fs::path(a.out) / "cache");

  extractors::ExtractedVideo extracted;
  if (kind == extractors::AdapterKind::kSynthetic) {
    const auto profile = label == Label::kReal ? synthgen::real_profile() : synthgen::fake_profile(category);
    synthgen::SynthOptions options;
    options.fps = a.fps;
    const auto video = synthgen::generate_video(profile, options, a.seed, a.id);
    extracted = synthgen::extract_synthetic(video);
  } else {
    std::vector<Frame> frames;
    std::string audio = a.audio;
    if (!a.video.empty()) {
      auto decoded = extractors::decode_video(a.video, (fs::path(a.out) / "work").string());
      frames = std::move(decoded.frames);
      if (audio.empty()) audio = decoded.audio_path;
    } else if (!a.frames_dir.empty()) {
      frames = extractors::load_frame_directory(a.frames_dir);
    } else {
      throw InvalidInput("extract needs --frames or --video");
    }
    if (audio.empty()) throw InvalidInput("extract needs --audio (or a --video with sound)");
    const auto track = extractors::read_wav(audio);

    std::unique_ptr<extractors::Transcriber> transcriber;
    std::unique_ptr<extractors::Phonemizer> phonemizer;
    std::unique_ptr<extractors::LandmarkDetector> detector;
    std::unique_ptr<extractors::IdentityEmbedder> embedder;
    const auto need = [](const std::string& value, const char* flag) {
      if (value.empty()) throw InvalidInput(std::string("missing ") + flag);
      return value;
    };
    if (kind == extractors::AdapterKind::kFixture) {
      transcriber = std::make_unique<extractors::FixtureTranscriber>(need(a.transcript, "--transcript"));
      if (!a.phonemes.empty()) phonemizer = std::make_unique<extractors::FixturePhonemizer>(a.phonemes);
      detector = std::make_unique<extractors::FixtureLandmarkDetector>(need(a.landmarks, "--landmarks"));
      embedder = std::make_unique<extractors::FixtureIdentityEmbedder>(need(a.embeddings, "--embeddings"));
    } else {
      const auto work = (fs::path(a.out) / "work").string();
      fs::create_directories(work);
      const auto command = [&](const std::string& cmd, const char* flag) {
        return extractors::LiveCommand(need(cmd, flag), work);
      };
      transcriber = std::make_unique<extractors::LiveTranscriber>(command(a.transcribe_cmd, "--transcribe-cmd"));
      if (!a.phonemize_cmd.empty()) {
        phonemizer = std::make_unique<extractors::LivePhonemizer>(command(a.phonemize_cmd, "--phonemize-cmd"));
      }
      detector = std::make_unique<extractors::LiveLandmarkDetector>(command(a.landmark_cmd, "--landmark-cmd"));
      embedder = std::make_unique<extractors::LiveIdentityEmbedder>(command(a.embed_cmd, "--embed-cmd"));
    }
    if (!phonemizer) phonemizer = std::make_unique<extractors::ReferencePhonemizer>();
    const auto intervals = extractors::phonemes_from_audio(track, *transcriber, *phonemizer);
    extracted = extractors::extract_frames({a.id, a.fps, 0, label, category}, intervals, frames, *detector, *embedder);
  }

  const std::string cache_rel = "cache/" + a.id + ".pia";
  extractors::write_cache((fs::path(a.out) / cache_rel).string(), extracted.cache.manifest, extracted.cache.frames,
                          extracted.cache.crops);
  const auto entries = extractors::index_entries(extracted, cache_rel, a.split);
  alignment::write_index((fs::path(a.out) / "index.jsonl").string(), entries);
  out << "extracted " << extracted.cache.frames.size() << " frames, " << entries.size() << " groups\n";
  return 0;
}

struct BuildArgs {
  std::vector<std::string> indexes;
  std::string out;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  std::string holdout;
};

int cmd_build_dataset(const BuildArgs& a, std::ostream& out) {
  print_config(out, "build-dataset",
               {{"seed", a.seed}, {"train_fraction", a.train_fraction}, {"holdout", a.holdout}});
  if (!(a.train_fraction > 0.0 && a.train_fraction < 1.0)) throw InvalidConfig("train_fraction must be in (0, 1)");
  struct Video {
    alignment::VideoRef ref;
    fs::path cache;
    std::vector<alignment::IndexEntry> entries;
  };
  std::vector<Video> videos;
  std::map<std::string, std::size_t> position;
  for (const auto& index : a.indexes) {
    const auto base = fs::path(index).parent_path();
    for (auto& e : alignment::read_index(index)) {
      auto it = position.find(e.video_id);
      if (it == position.end()) {
        it = position.emplace(e.video_id, videos.size()).first;
        videos.push_back({{e.video_id, e.label, e.category}, base / e.cache, {}});
      } else if (videos[it->second].cache != base / e.cache) {
        throw InvalidDataset("video id " + e.video_id + " appears with two caches");
      }
      videos[it->second].entries.push_back(std::move(e));
    }
  }
  if (videos.empty()) throw InvalidDataset("no index entries");
  std::vector<alignment::VideoRef> refs;
  for (const auto& v : videos) refs.push_back(v.ref);
  const auto splits = a.holdout.empty() ? alignment::stratified_split(refs, a.train_fraction, a.seed)
                                        : alignment::leave_category_out_split(refs, a.holdout, a.train_fraction, a.seed);
  fs::create_directories(fs::path(a.out) / "cache");
  std::vector<alignment::IndexEntry> all;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const std::string rel = "cache/" + videos[i].ref.id + ".pia";
    const auto target = fs::path(a.out) / rel;
    if (fs::weakly_canonical(videos[i].cache) != fs::weakly_canonical(target)) {
      fs::copy_file(videos[i].cache, target, fs::copy_options::overwrite_existing);
    }
    for (auto e : videos[i].entries) {
      e.cache = rel;
      e.split = splits[i];
      all.push_back(std::move(e));
    }
  }
  alignment::write_index((fs::path(a.out) / "index.jsonl").string(), all);
  out << "wrote " << videos.size() << " videos, " << all.size() << " groups\n";
  return 0;
}

struct TrainArgs {
  TrainSettings settings;
  std::string split = "train";
};

int cmd_train(TrainArgs& a, std::ostream& out, std::ostream& err) {
  harness::TrainConfig train;
  model::ModelConfig model;
  const auto effective = a.settings.resolve(train, model);
  print_config(out, "train", effective);
  const auto data = harness::load_dataset(a.settings.data, a.split);
  fs::create_directories(a.settings.out);
  write_text(fs::path(a.settings.out) / "config.json", effective.dump(2) + "\n");
  auto result = harness::train(model, data, train, a.settings.out, a.settings.verbose ? &err : nullptr);
  out << "trained " << result.history.size() << " steps; checkpoint " << result.checkpoint << '\n';
  return 0;
}

struct EvalArgs {
  std::string ckpt;
  std::string data;
  std::string out;
  std::string report = "report.json";
  std::string split = "test";
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  print_config(out, "eval", {{"ckpt", a.ckpt}, {"data", a.data}, {"split", a.split}, {"report", a.report}});
  auto detector = model::load_checkpoint<float>(a.ckpt);
  const auto data = harness::load_dataset(a.data, a.split);
  const auto report = harness::evaluate(*detector, data);
  fs::create_directories(a.out);
  const auto path = under(a.out, a.report);
  write_text(path, harness::report_json(report, {{"split", a.split}}).dump(2) + "\n");
  out << "AUC " << report.auc << "  AP " << report.ap << "  ACC " << report.acc << "  (" << report.n_videos
      << " videos) -> " << path.string() << '\n';
  return 0;
}

struct AblateArgs {
  TrainSettings settings;
  std::vector<std::string> names;
  std::string train_split = "train";
  std::string test_split = "test";
};

int cmd_ablate(AblateArgs& a, std::ostream& out, std::ostream& err) {
  harness::TrainConfig train;
  model::ModelConfig model;
  const auto effective = a.settings.resolve(train, model);
  print_config(out, "ablate", effective);
  std::vector<std::string> names;
  for (const auto& n : a.names) {
    if (n == "all") {
      names.insert(names.end(), harness::ablation_names().begin(), harness::ablation_names().end());
    } else {
      harness::ablation_variant(n, model, train);
      names.push_back(n);
    }
  }
  const auto train_set = harness::load_dataset(a.settings.data, a.train_split);
  const auto test_set = harness::load_dataset(a.settings.data, a.test_split);
  ordered_json summary = ordered_json::object();
  for (const auto& name : names) {
    const auto dir = fs::path(a.settings.out) / file_stem_id(name);
    const auto report = harness::run_ablation(name, train_set, test_set, model, train, dir.string(),
                                              a.settings.verbose ? &err : nullptr);
    write_text(dir / "report.json", harness::report_json(report, {{"ablation", name}}).dump(2) + "\n");
    summary[name] = {{"auc", report.auc}, {"ap", report.ap}, {"acc", report.acc}};
    out << name << ": AUC " << report.auc << "  AP " << report.ap << "  ACC " << report.acc << '\n';
  }
  write_text(fs::path(a.settings.out) / "ablation.json", summary.dump(2) + "\n");
  return 0;
}

// Per-pair drift of a cache; masked pairs are excluded from the statistics.
struct CacheDrift {
  extractors::VideoCache cache;
  identity::DriftSeries series;
};

CacheDrift cache_drift(const std::string& path) {
  CacheDrift d;
  d.cache = extractors::read_cache(path);
  std::vector<std::vector<float>> embeddings;
  std::vector<bool> mask;
  for (const auto& f : d.cache.frames) {
    embeddings.push_back(f.identity ? *f.identity : std::vector<float>(kIdentityDim, 0.0f));
    mask.push_back(f.valid && f.identity.has_value());
  }
  d.series = identity::drift_series(embeddings, mask);
  return d;
}

plot::Figure drift_figure(const std::vector<CacheDrift>& drifts, double threshold) {
  plot::Figure fig;
  fig.threshold = threshold;
  for (const auto& d : drifts) {
    plot::Series s;
    s.color = d.cache.manifest.label == Label::kFake ? kFakeColor : kRealColor;
    for (std::size_t t = 0; t < d.series.l2.size(); ++t) {
      s.x.push_back(static_cast<double>(t));
      s.y.push_back(d.series.mask[t] ? d.series.l2[t] : std::numeric_limits<double>::quiet_NaN());
    }
    fig.series.push_back(std::move(s));
  }
  return fig;
}

struct DriftArgs {
  std::vector<std::string> caches;
  std::string out;
  double threshold = identity::kDefaultSpikeThreshold;
};

int cmd_analyze_drift(const DriftArgs& a, std::ostream& out) {
  print_config(out, "analyze-drift", {{"threshold", a.threshold}});
  fs::create_directories(a.out);
  std::vector<CacheDrift> drifts;
  ordered_json stats = ordered_json::object();
  for (const auto& path : a.caches) {
    auto d = cache_drift(path);
    const auto& id = d.cache.manifest.id;
    write_text(fs::path(a.out) / ("drift_" + id + ".csv"), identity::drift_csv(d.series));
    const auto s = identity::drift_stats(d.series, a.threshold);
    stats[id] = {{"label", to_string(d.cache.manifest.label)},
                 {"mean_l2", s.mean_l2},
                 {"max_l2", s.max_l2},
                 {"spike_count", s.spike_count},
                 {"pairs", s.masked_pair_count}};
    out << id << " (" << to_string(d.cache.manifest.label) << "): mean_l2 " << s.mean_l2 << "  max_l2 " << s.max_l2
        << "  spikes " << s.spike_count << '\n';
    drifts.push_back(std::move(d));
  }
  write_text(fs::path(a.out) / "drift_stats.json", stats.dump(2) + "\n");
  plot::save((fs::path(a.out) / "drift.png").string(), drift_figure(drifts, a.threshold));
  return 0;
}

struct GeometryArgs {
  std::vector<std::string> caches;
  std::string out;
  std::string lips;
};

int cmd_analyze_geometry(const GeometryArgs& a, std::ostream& out) {
  print_config(out, "analyze-geometry", {{"lips", a.lips.empty() ? "standard" : a.lips}});
  const auto lips = a.lips.empty() ? geometry::LipLandmarkIndexSet::standard()
                                   : geometry::LipLandmarkIndexSet::from_json_file(a.lips);
  fs::create_directories(a.out);
  for (const auto& path : a.caches) {
    const auto cache = extractors::read_cache(path);
    const auto rows = geometry::geometry_series(cache.frames, lips);
    const auto file = fs::path(a.out) / ("geometry_" + cache.manifest.id + ".csv");
    write_text(file, geometry::geometry_csv(cache.frames, rows));
    out << "wrote " << file.string() << '\n';
  }
  return 0;
}

struct PlotArgs {
  std::string kind;
  std::vector<std::string> caches;
  std::vector<std::string> reports;
  std::string out;
  std::string name;
  double threshold = identity::kDefaultSpikeThreshold;
};

int cmd_plot(const PlotArgs& a, std::ostream& out) {
  print_config(out, "plot", {{"kind", a.kind}, {"threshold", a.threshold}});
  fs::create_directories(a.out);
  const auto file = fs::path(a.out) / (a.name.empty() ? a.kind + ".png" : a.name);
  if (a.kind == "drift") {
    if (a.caches.empty()) throw InvalidInput("plot --kind drift needs --cache");
    std::vector<CacheDrift> drifts;
    for (const auto& c : a.caches) drifts.push_back(cache_drift(c));
    plot::save(file.string(), drift_figure(drifts, a.threshold));
  } else {
    if (a.reports.empty()) throw InvalidInput("plot --kind roc needs --report");
    plot::Figure fig;
    fig.diagonal = true;
    fig.limits = std::array<double, 4>{0.0, 1.0, 0.0, 1.0};
    for (std::size_t i = 0; i < a.reports.size(); ++i) {
      const auto report = read_json_file(a.reports[i]);
      if (!report.contains("videos")) throw InvalidInput(a.reports[i] + " is not an evaluation report");
      std::vector<double> scores;
      std::vector<int> labels;
      for (const auto& v : report.at("videos")) {
        scores.push_back(v.at("score").get<double>());
        labels.push_back(static_cast<int>(label_from_string(v.at("label").get<std::string>())));
      }
      plot::Series s;
      s.color = kPalette[i % kPalette.size()];
      for (const auto& p : harness::roc_curve(scores, labels)) {
        s.x.push_back(p.fpr);
        s.y.push_back(p.tpr);
      }
      fig.series.push_back(std::move(s));
    }
    plot::save(file.string(), fig);
  }
  out << "wrote " << file.string() << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phoneme-identity-articulation deepfake detector toolkit", "pia"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pia 1.0");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic labeled dataset");
  synth_cmd->add_option("--config", synth.config_path, "JSON config (keys: real, fake, seed, raw_scale, fps)")
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--out", synth.out, "output directory")->required();
  synth.flags.add(synth_cmd, "--real", "real", synth.real, "number of real videos");
  synth.flags.add(synth_cmd, "--fake", "fake", synth.fake, "number of fake videos");
  synth.flags.add(synth_cmd, "--seed", "seed", synth.seed, "random seed");
  synth.flags.add(synth_cmd, "--fps", "fps", synth.fps, "frame rate");
  synth.flags.options["raw_scale"] =
      synth_cmd->add_flag("--raw-scale", synth.raw_scale, "identity drift at raw embedding scale (x8) [raw_scale]");
  synth.flags.getters["raw_scale"] = [&synth] { return json(synth.raw_scale); };

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "extract per-frame features of one video into a cache");
  extract_cmd->add_option("--out", extract.out, "output directory")->required();
  extract_cmd->add_option("--adapters", extract.adapters, "live | fixture | synthetic")
      ->check(CLI::IsMember({"live", "fixture", "synthetic"}));
  extract_cmd->add_option("--id", extract.id, "video id");
  extract_cmd->add_option("--label", extract.label, "real | fake")->check(CLI::IsMember({"real", "fake"}));
  extract_cmd->add_option("--category", extract.category, "manipulation category (synthetic: lip_sync, face_swap, avatar)");
  extract_cmd->add_option("--split", extract.split, "split written to the index");
  extract_cmd->add_option("--fps", extract.fps, "frame rate");
  extract_cmd->add_option("--frames", extract.frames_dir, "directory of PPM/PGM frames")->check(CLI::ExistingDirectory);
  extract_cmd->add_option("--video", extract.video, "video file decoded with ffmpeg")->check(CLI::ExistingFile);
  extract_cmd->add_option("--audio", extract.audio, "WAV audio")->check(CLI::ExistingFile);
  extract_cmd->add_option("--transcript", extract.transcript, "fixture word segments (JSON)");
  extract_cmd->add_option("--phonemes", extract.phonemes, "fixture phoneme intervals (JSON); default: reference phonemizer");
  extract_cmd->add_option("--landmarks", extract.landmarks, "fixture landmarks (JSON)");
  extract_cmd->add_option("--embeddings", extract.embeddings, "fixture embeddings (float32)");
  extract_cmd->add_option("--transcribe-cmd", extract.transcribe_cmd, "live transcription command ({input} = WAV)");
  extract_cmd->add_option("--phonemize-cmd", extract.phonemize_cmd, "live alignment command ({input} = segments JSON)");
  extract_cmd->add_option("--landmark-cmd", extract.landmark_cmd, "live landmark command ({input} = PPM frame)");
  extract_cmd->add_option("--embed-cmd", extract.embed_cmd, "live identity command ({input} = PPM frame)");
  extract_cmd->add_option("--seed", extract.seed, "synthetic adapter seed");

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build-dataset", "merge extracted indexes and assign train/test splits");
  build_cmd->add_option("--index", build.indexes, "index.jsonl to merge (repeatable)")->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--out", build.out, "output directory")->required();
  build_cmd->add_option("--seed", build.seed, "split seed");
  build_cmd->add_option("--train-fraction", build.train_fraction, "stratified train fraction");
  build_cmd->add_option("--holdout", build.holdout, "fake category withheld for testing (cross-manipulation)");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train a detector");
  train.settings.bind(train_cmd);
  train_cmd->add_option("--split", train.split, "index split to train on (empty: all)");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "score a dataset split and write a report");
  eval_cmd->add_option("--ckpt", eval.ckpt, "model checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", eval.data, "dataset index")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eval.out, "output directory")->required();
  eval_cmd->add_option("--report", eval.report, "report file name inside --out");
  eval_cmd->add_option("--split", eval.split, "index split to score (empty: all)");

  AblateArgs ablate;
  auto* ablate_cmd = app.add_subcommand("ablate", "train and evaluate ablation variants");
  ablate.settings.bind(ablate_cmd);
  ablate_cmd->add_option("--name", ablate.names, "variant (repeatable): all, full, w/o_vi, w/o_geom, w/o_arc, w_ph, "
                                                 "w/o_EB0, plain_cnn, w_ph_w/o_vi, w_ph_w/o_geom, w_ph_w/o_arc")
      ->required();
  ablate_cmd->add_option("--train-split", ablate.train_split, "split to train on");
  ablate_cmd->add_option("--test-split", ablate.test_split, "split to evaluate on");

  DriftArgs drift;
  auto* drift_cmd = app.add_subcommand("analyze-drift", "identity drift series, statistics and plot of caches");
  drift_cmd->add_option("--cache", drift.caches, "feature cache (repeatable)")->required()->check(CLI::ExistingFile);
  drift_cmd->add_option("--out", drift.out, "output directory")->required();
  drift_cmd->add_option("--threshold", drift.threshold, "spike threshold on consecutive L2");

  GeometryArgs geom;
  auto* geom_cmd = app.add_subcommand("analyze-geometry", "per-frame lip geometry CSV of caches");
  geom_cmd->add_option("--cache", geom.caches, "feature cache (repeatable)")->required()->check(CLI::ExistingFile);
  geom_cmd->add_option("--out", geom.out, "output directory")->required();
  geom_cmd->add_option("--lips", geom.lips, "lip landmark index set (JSON)")->check(CLI::ExistingFile);

  PlotArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plot", "PNG drift or ROC figure");
  plot_cmd->add_option("--kind", plot_args.kind, "drift | roc")->required()->check(CLI::IsMember({"drift", "roc"}));
  plot_cmd->add_option("--cache", plot_args.caches, "feature cache for drift (repeatable)")->check(CLI::ExistingFile);
  plot_cmd->add_option("--report", plot_args.reports, "evaluation report for ROC (repeatable)")->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", plot_args.out, "output directory")->required();
  plot_cmd->add_option("--name", plot_args.name, "file name (default <kind>.png)");
  plot_cmd->add_option("--threshold", plot_args.threshold, "spike threshold line for drift plots");

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth, out);
    if (extract_cmd->parsed()) return cmd_extract(extract, out);
    if (build_cmd->parsed()) return cmd_build_dataset(build, out);
    if (train_cmd->parsed()) return cmd_train(train, out, err);
    if (eval_cmd->parsed()) return cmd_eval(eval, out);
    if (ablate_cmd->parsed()) return cmd_ablate(ablate, out, err);
    if (drift_cmd->parsed()) return cmd_analyze_drift(drift, out);
    if (geom_cmd->parsed()) return cmd_analyze_geometry(geom, out);
    if (plot_cmd->parsed()) return cmd_plot(plot_args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace pia::cli
