#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cliquewatch/baselines.hpp"
#include "cliquewatch/scoring.hpp"
#include "cliquewatch/stream.hpp"

namespace cliquewatch {

// Evaluation unit: one node in one window.
struct InstanceKey {
  NodeIndex node = 0;
  WindowIndex window = 0;

  friend auto operator<=>(const InstanceKey&, const InstanceKey&) = default;
};

std::string to_string(const InstanceKey& key);

struct ScoredInstance {
  NodeIndex node = 0;
  WindowIndex window = 0;
  double score = 0.0;  // larger = more anomalous
  int label = 0;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocResult {
  std::string method;
  std::vector<RocPoint> points;  // (0,0) ... (1,1)
  double auc = 0.0;
};

// Threshold sweep over distinct scores, descending, one vertex per tied
// score; AUC by the trapezoid rule.
RocResult roc(std::span<const ScoredInstance> instances, std::string method = {});

// Detections among the given verdicts, all assumed to be label-0.
double empirical_fpr(std::span<const AnomalyVerdict> negatives);

using ScoreTable = std::map<InstanceKey, double>;
using LabelTable = std::map<InstanceKey, int>;

struct NamedScores {
  std::string method;
  ScoreTable scores;
};

struct ComparisonReport {
  std::vector<RocResult> results;
};

// One ROC per method over exactly the labeled instances. Every method must
// score every labeled instance; scores for unlabeled keys are ignored.
ComparisonReport compare(const std::vector<NamedScores>& methods, const LabelTable& labels);

// ---- files ----

// node,window_index,n_t,m,mu_hat,half_width,score,is_anomaly,side,mode,delta
void write_score_csv_header(std::ostream& out);
void write_detections_csv(std::ostream& out, std::span<const Detection> detections,
                          const DetectOptions& options, bool header = true);
void write_baseline_csv(std::ostream& out, const BaselineScoreTable& table);
// window_index,m,lower,upper for one node.
void write_band_csv(std::ostream& out, std::span<const Detection> node_detections);

// Reads node, window_index and score columns located by header name.
ScoreTable read_score_csv(std::istream& in);
ScoreTable read_score_csv_file(const std::string& path);
LabelTable read_labels_csv(std::istream& in);
LabelTable read_labels_csv_file(const std::string& path);

// method,fpr,tpr
void write_roc_csv(std::ostream& out, const ComparisonReport& report);
// method,auc
void write_auc_csv(std::ostream& out, const ComparisonReport& report);

}  // namespace cliquewatch
