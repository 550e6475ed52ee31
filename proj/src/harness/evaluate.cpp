#include "pia/harness/evaluate.hpp"

#include <set>

#include "pia/errors.hpp"
#include "pia/harness/metrics.hpp"

namespace pia::harness {

namespace {

struct Columns {
  std::vector<double> scores;
  std::vector<int> labels;
};

Columns columns(const std::vector<VideoScore>& scores, const std::string& category) {
  Columns c;
  for (const auto& s : scores) {
    if (category.empty() || s.label == Label::kReal || s.category == category) {
      c.scores.push_back(s.probability);
      c.labels.push_back(static_cast<int>(s.label));
    }
  }
  return c;
}

}  // namespace

EvalReport report_from_scores(std::vector<VideoScore> scores) {
  EvalReport r;
  const auto all = columns(scores, "");
  r.n_videos = static_cast<int>(scores.size());
  r.auc = 100.0 * roc_auc(all.scores, all.labels);
  r.ap = 100.0 * average_precision(all.scores, all.labels);
  r.acc = 100.0 * accuracy(all.scores, all.labels);

  std::set<std::string> categories;
  for (const auto& s : scores) categories.insert(s.category);
  for (const auto& name : categories) {
    CategoryReport c;
    std::vector<double> own_scores;
    std::vector<int> own_labels;
    bool has_fake = false;
    for (const auto& s : scores) {
      if (s.category != name) continue;
      ++c.n_videos;
      own_scores.push_back(s.probability);
      own_labels.push_back(static_cast<int>(s.label));
      has_fake = has_fake || s.label == Label::kFake;
    }
    if (has_fake) {
      const auto subset = columns(scores, name);
      c.acc = 100.0 * accuracy(subset.scores, subset.labels);
      c.auc = 100.0 * roc_auc(subset.scores, subset.labels);
      c.ap = 100.0 * average_precision(subset.scores, subset.labels);
    } else {
      c.acc = 100.0 * accuracy(own_scores, own_labels);
    }
    r.categories[name] = c;
  }
  r.videos = std::move(scores);
  return r;
}

EvalReport evaluate(model::Detector<float>& detector, const Dataset& test_set) {
  std::vector<VideoScore> scores;
  scores.reserve(test_set.videos.size());
  for (const auto& v : test_set.videos) {
    scores.push_back({v.id, v.label, v.category, detector.score(v).probability});
  }
  return report_from_scores(std::move(scores));
}

nlohmann::ordered_json report_json(const EvalReport& report, const nlohmann::json& extra) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["n_videos"] = report.n_videos;
  j["acc"] = report.acc;
  j["auc"] = report.auc;
  j["ap"] = report.ap;
  auto cats = nlohmann::ordered_json::object();
  for (const auto& [name, c] : report.categories) {
    nlohmann::ordered_json cj;
    cj["n_videos"] = c.n_videos;
    cj["acc"] = c.acc;
    cj["auc"] = c.auc ? nlohmann::ordered_json(*c.auc) : nlohmann::ordered_json(nullptr);
    cj["ap"] = c.ap ? nlohmann::ordered_json(*c.ap) : nlohmann::ordered_json(nullptr);
    cats[name] = std::move(cj);
  }
  j["categories"] = std::move(cats);
  auto videos = nlohmann::ordered_json::array();
  for (const auto& v : report.videos) {
    videos.push_back({{"id", v.id}, {"label", to_string(v.label)}, {"category", v.category}, {"score", v.probability}});
  }
  j["videos"] = std::move(videos);
  if (!extra.is_null()) j["run"] = extra;
  return j;
}

}  // namespace pia::harness
