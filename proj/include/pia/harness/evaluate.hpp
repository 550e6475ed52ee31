#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pia/harness/dataset.hpp"
#include "pia/model/detector.hpp"

namespace pia::harness {

inline constexpr int kReportSchemaVersion = 1;

struct VideoScore {
  std::string id;
  Label label = Label::kReal;
  std::string category = "real";
  double probability = 0.5;
};

// Metrics in percent. For a fake category the set is its fakes plus every real
// video; the real category only reports accuracy.
struct CategoryReport {
  int n_videos = 0;
  double acc = 0.0;
  std::optional<double> auc;
  std::optional<double> ap;
};

struct EvalReport {
  double acc = 0.0;
  double auc = 0.0;
  double ap = 0.0;
  int n_videos = 0;
  std::map<std::string, CategoryReport> categories;
  std::vector<VideoScore> videos;
};

// Throws MetricError when the scores hold a single class.
EvalReport report_from_scores(std::vector<VideoScore> scores);

// Scores every video with one pooled forward pass.
EvalReport evaluate(model::Detector<float>& detector, const Dataset& test_set);

nlohmann::ordered_json report_json(const EvalReport& report, const nlohmann::json& extra = {});

}  // namespace pia::harness
