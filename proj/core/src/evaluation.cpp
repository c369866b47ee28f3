#include "cliquewatch/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "cliquewatch/error.hpp"
#include "cliquewatch/text.hpp"

namespace cliquewatch {

std::string to_string(const InstanceKey& key) {
  return "(node " + std::to_string(key.node) + ", window " + std::to_string(key.window) + ")";
}

RocResult roc(std::span<const ScoredInstance> instances, std::string method) {
  std::size_t positives = 0;
  for (const auto& s : instances) {
    if (!std::isfinite(s.score)) throw EvaluationError("non-finite score at " +
                                                       to_string(InstanceKey{s.node, s.window}));
    if (s.label != 0 && s.label != 1) throw EvaluationError("labels must be 0 or 1");
    positives += static_cast<std::size_t>(s.label);
  }
  const std::size_t negatives = instances.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw EvaluationError("ROC needs at least one positive and one negative instance");
  }

  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return instances[a].score > instances[b].score; });

  RocResult result;
  result.method = std::move(method);
  result.points.push_back({0.0, 0.0});
  const auto P = static_cast<double>(positives);
  const auto N = static_cast<double>(negatives);
  std::size_t tp = 0;
  std::size_t fp = 0;
  double auc = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double score = instances[order[i]].score;
    std::size_t j = i;
    for (; j < order.size() && instances[order[j]].score == score; ++j) {
      if (instances[order[j]].label == 1) {
        ++tp;
      } else {
        ++fp;
      }
    }
    const RocPoint next{static_cast<double>(fp) / N, static_cast<double>(tp) / P};
    const RocPoint& prev = result.points.back();
    auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) / 2.0;
    result.points.push_back(next);
    i = j;
  }
  result.auc = auc;
  return result;
}

double empirical_fpr(std::span<const AnomalyVerdict> negatives) {
  if (negatives.empty()) throw EvaluationError("FPR needs at least one negative instance");
  std::size_t detections = 0;
  for (const auto& v : negatives) detections += v.is_anomaly ? 1 : 0;
  return static_cast<double>(detections) / static_cast<double>(negatives.size());
}

ComparisonReport compare(const std::vector<NamedScores>& methods, const LabelTable& labels) {
  ComparisonReport report;
  for (const auto& m : methods) {
    std::vector<ScoredInstance> instances;
    instances.reserve(labels.size());
    for (const auto& [key, label] : labels) {
      const auto it = m.scores.find(key);
      if (it == m.scores.end()) {
        throw EvaluationError("method '" + m.method + "' has no score for labeled instance " +
                              to_string(key));
      }
      instances.push_back({key.node, key.window, it->second, label});
    }
    report.results.push_back(roc(instances, m.method));
  }
  return report;
}

// ---------------------------------------------------------------- files

void write_score_csv_header(std::ostream& out) {
  out << "node,window_index,n_t,m,mu_hat,half_width,score,is_anomaly,side,mode,delta\n";
}

void write_detections_csv(std::ostream& out, std::span<const Detection> detections,
                          const DetectOptions& options, bool header) {
  if (header) write_score_csv_header(out);
  const std::string side = to_string(options.side);
  const std::string mode = to_string(options.mode);
  const std::string delta = format_double(options.delta);
  for (const auto& d : detections) {
    const auto& v = d.verdict;
    out << v.node << ',' << v.window << ',' << v.n_t << ',' << v.observed << ','
        << format_double(v.mu_hat) << ',' << format_double(d.band.half_width) << ','
        << format_double(v.score) << ',' << (v.is_anomaly ? 1 : 0) << ',' << side << ',' << mode
        << ',' << delta << '\n';
  }
}

void write_baseline_csv(std::ostream& out, const BaselineScoreTable& table) {
  write_score_csv_header(out);
  const std::string side = to_string(table.side);
  const std::string mode = to_string(table.method);
  const std::size_t T = table.windows.size();
  for (NodeIndex j = 0; j < table.node_count; ++j) {
    for (std::size_t t = 0; t < T; ++t) {
      const auto& e = table.at(j, t);
      out << j << ',' << table.windows[t] << ',' << table.n_t[t] << ','
          << format_double(e.statistic) << ',' << format_double(e.reference) << ','
          << format_double(e.scale) << ',' << format_double(e.score) << ','
          << (e.is_anomaly ? 1 : 0) << ',' << side << ',' << mode << ",\n";
    }
  }
}

void write_band_csv(std::ostream& out, std::span<const Detection> node_detections) {
  out << "window_index,m,lower,upper\n";
  for (const auto& d : node_detections) {
    out << d.verdict.window << ',' << d.verdict.observed << ',' << format_double(d.band.lower)
        << ',' << format_double(d.band.upper) << '\n';
  }
}

namespace {

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ValidationError("CSV is missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

template <typename Fn>
void for_each_row(std::istream& in, const std::vector<std::string>& required, Fn&& fn) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("CSV is empty");
  const auto header = split_csv_line(line);
  std::vector<std::size_t> idx;
  for (const auto& name : required) idx.push_back(column(header, name));
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields");
    }
    std::vector<std::string> picked;
    for (std::size_t i : idx) picked.push_back(fields[i]);
    try {
      fn(picked);
    } catch (const ValidationError& e) {
      throw ParseError(lineno, e.what());
    }
  }
}

}  // namespace

ScoreTable read_score_csv(std::istream& in) {
  ScoreTable table;
  for_each_row(in, {"node", "window_index", "score"}, [&](const std::vector<std::string>& f) {
    const long long node = parse_int(f[0]);
    if (node < 0) throw ValidationError("negative node index");
    const InstanceKey key{static_cast<NodeIndex>(node), parse_int(f[1])};
    if (!table.emplace(key, parse_double(f[2])).second) {
      throw ValidationError("duplicate score for " + to_string(key));
    }
  });
  return table;
}

ScoreTable read_score_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open score file '" + path + "'");
  return read_score_csv(in);
}

LabelTable read_labels_csv(std::istream& in) {
  LabelTable table;
  for_each_row(in, {"node", "window", "label"}, [&](const std::vector<std::string>& f) {
    const long long node = parse_int(f[0]);
    const long long label = parse_int(f[2]);
    if (node < 0) throw ValidationError("negative node index");
    if (label != 0 && label != 1) throw ValidationError("label must be 0 or 1");
    const InstanceKey key{static_cast<NodeIndex>(node), parse_int(f[1])};
    if (!table.emplace(key, static_cast<int>(label)).second) {
      throw ValidationError("duplicate label for " + to_string(key));
    }
  });
  return table;
}

LabelTable read_labels_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open labels file '" + path + "'");
  return read_labels_csv(in);
}

void write_roc_csv(std::ostream& out, const ComparisonReport& report) {
  out << "method,fpr,tpr\n";
  for (const auto& r : report.results) {
    for (const auto& p : r.points) {
      out << r.method << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
    }
  }
}

void write_auc_csv(std::ostream& out, const ComparisonReport& report) {
  out << "method,auc\n";
  for (const auto& r : report.results) out << r.method << ',' << format_double(r.auc) << '\n';
}

}  // namespace cliquewatch
