#include "cliquewatch/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "cliquewatch/error.hpp"

namespace cliquewatch {

namespace {

double log_pmf(std::size_t i, double rate) {
  const double x = static_cast<double>(i);
  return x * std::log(rate) - rate - std::lgamma(x + 1.0);
}

struct Moments {
  double mean;
  double sd;
};

// Sample mean and standard deviation (denominator n - 1).
Moments moments(CountSeries::const_iterator begin, CountSeries::const_iterator end) {
  const auto n = static_cast<double>(end - begin);
  const double mean = std::accumulate(begin, end, 0.0) / n;
  double ss = 0.0;
  for (auto it = begin; it != end; ++it) ss += (*it - mean) * (*it - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

double oriented(double z, Side side) { return side == Side::bilateral ? std::abs(z) : -z; }

}  // namespace

double poisson_two_sided_pvalue(std::size_t k, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("Poisson rate must be > 0");

  const double at_k = std::exp(log_pmf(k, rate));
  double below = 0.0;
  for (std::size_t i = 0; i < k; ++i) below += std::exp(log_pmf(i, rate));

  double above = 0.0;
  for (std::size_t i = k + 1;; ++i) {
    const double term = std::exp(log_pmf(i, rate));
    above += term;
    const bool past_mode = static_cast<double>(i) > rate;
    if (past_mode && (term == 0.0 || term < above * 1e-17)) break;
  }

  const double p = 2.0 * std::min(below + 0.5 * at_k, above + 0.5 * at_k);
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

std::vector<double> leave_one_out_rates(const CountSeries& series, double floor) {
  if (series.size() < 2) throw ValidationError("retrospective fit needs at least 2 windows");
  const double total = std::accumulate(series.begin(), series.end(), 0.0);
  const auto others = static_cast<double>(series.size() - 1);
  std::vector<double> rates(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    rates[t] = std::max((total - series[t]) / others, floor);
  }
  return rates;
}

std::vector<double> heard_node_scores(const CountSeries& series) {
  const auto rates = leave_one_out_rates(series);
  std::vector<double> scores(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    scores[t] = -poisson_two_sided_pvalue(static_cast<std::size_t>(series[t]), rates[t]);
  }
  return scores;
}

namespace {

// Shared by heard_edge_scores and the table builder, which also needs the
// smallest incident p-value for the anomaly flag.
void heard_edges(const std::vector<AggregatedGraph>& graphs, std::vector<double>& scores,
                 std::vector<double>& min_p) {
  const std::size_t T = graphs.size();
  if (T < 2) throw ValidationError("retrospective fit needs at least 2 windows");
  const std::size_t n = graphs.front().node_count();
  scores.assign(n * T, 0.0);
  min_p.assign(n * T, 1.0);
  CountSeries series(T);
  for (NodeIndex u = 0; u < n; ++u) {
    for (NodeIndex v = u + 1; v < n; ++v) {
      double total = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        series[t] = graphs[t].weight(u, v);
        total += series[t];
      }
      if (total == 0.0) continue;
      const auto rates = leave_one_out_rates(series);
      for (std::size_t t = 0; t < T; ++t) {
        const double p = poisson_two_sided_pvalue(static_cast<std::size_t>(series[t]), rates[t]);
        scores[u * T + t] -= p;
        scores[v * T + t] -= p;
        min_p[u * T + t] = std::min(min_p[u * T + t], p);
        min_p[v * T + t] = std::min(min_p[v * T + t], p);
      }
    }
  }
}

}  // namespace

std::vector<double> heard_edge_scores(const std::vector<AggregatedGraph>& graphs) {
  std::vector<double> scores;
  std::vector<double> min_p;
  heard_edges(graphs, scores, min_p);
  return scores;
}

std::vector<double> scan_statistic_scores(const CountSeries& series, std::size_t lookback,
                                          Side side) {
  if (lookback < 2) throw ConfigError("scan lookback must be >= 2 windows");
  std::vector<double> scores(series.size(), 0.0);
  for (std::size_t t = lookback; t < series.size(); ++t) {
    const auto history = series.begin() + static_cast<std::ptrdiff_t>(t);
    const auto [mean, sd] = moments(history - static_cast<std::ptrdiff_t>(lookback), history);
    scores[t] = oriented((series[t] - mean) / std::max(sd, 1.0), side);
  }
  return scores;
}

std::vector<double> scan_batch_scores(const CountSeries& series, const CountSeries& batch,
                                      Side side) {
  if (batch.size() < 2) throw ConfigError("scan batch needs at least 2 training windows");
  const auto [mean, sd] = moments(batch.begin(), batch.end());
  const double scale = std::max(sd, 1.0);
  std::vector<double> scores(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    scores[t] = oriented((series[t] - mean) / scale, side);
  }
  return scores;
}

std::string to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::heard_node: return "heard-node";
    case BaselineMethod::heard_edge: return "heard-edge";
    case BaselineMethod::scan: return "scan";
    case BaselineMethod::scan_batch: return "scan-batch";
  }
  return "?";
}

BaselineMethod parse_baseline_method(const std::string& name) {
  if (name == "heard-node") return BaselineMethod::heard_node;
  if (name == "heard-edge") return BaselineMethod::heard_edge;
  if (name == "scan") return BaselineMethod::scan;
  if (name == "scan-batch") return BaselineMethod::scan_batch;
  throw ConfigError("unknown baseline '" + name +
                    "' (expected heard-node|heard-edge|scan|scan-batch)");
}

std::vector<CountSeries> node_count_series(const WindowedStream& windows) {
  const std::size_t T = windows.window_count();
  std::vector<CountSeries> out(windows.node_count(), CountSeries(T, 0.0));
  for (std::size_t w = 0; w < T; ++w) {
    for (const Event& e : windows.window(w).events) {
      for (NodeIndex j : e.fingerprint.participants()) out[j][w] += 1.0;
    }
  }
  return out;
}

std::vector<CountSeries> weighted_degree_series(const WindowedStream& windows) {
  const std::size_t T = windows.window_count();
  std::vector<CountSeries> out(windows.node_count(), CountSeries(T, 0.0));
  for (std::size_t w = 0; w < T; ++w) {
    const auto g = aggregate_window(windows.window(w));
    for (NodeIndex j = 0; j < windows.node_count(); ++j) {
      out[j][w] = static_cast<double>(g.weighted_degree(j));
    }
  }
  return out;
}

BaselineScoreTable baseline_scores(BaselineMethod method, const WindowedStream& stream,
                                   const BaselineOptions& options,
                                   const WindowedStream* training) {
  const std::size_t T = stream.window_count();
  const std::size_t n = stream.node_count();
  BaselineScoreTable table;
  table.method = method;
  table.side = options.side;
  table.node_count = n;
  table.entries.resize(n * T);
  for (std::size_t w = 0; w < T; ++w) {
    const auto view = stream.window(w);
    table.windows.push_back(view.index);
    table.n_t.push_back(view.size());
  }

  switch (method) {
    case BaselineMethod::heard_node: {
      const auto series = node_count_series(stream);
      for (NodeIndex j = 0; j < n; ++j) {
        const auto rates = leave_one_out_rates(series[j]);
        const auto scores = heard_node_scores(series[j]);
        for (std::size_t t = 0; t < T; ++t) {
          auto& e = table.entries[j * T + t];
          e.statistic = series[j][t];
          e.reference = rates[t];
          e.score = scores[t];
          e.is_anomaly = -scores[t] < options.alpha;
        }
      }
      break;
    }
    case BaselineMethod::heard_edge: {
      std::vector<AggregatedGraph> graphs;
      graphs.reserve(T);
      for (std::size_t w = 0; w < T; ++w) graphs.push_back(aggregate_window(stream.window(w)));
      std::vector<double> scores;
      std::vector<double> min_p;
      heard_edges(graphs, scores, min_p);
      for (NodeIndex j = 0; j < n; ++j) {
        for (std::size_t t = 0; t < T; ++t) {
          auto& e = table.entries[j * T + t];
          e.statistic = static_cast<double>(graphs[t].weighted_degree(j));
          e.score = scores[j * T + t];
          e.is_anomaly = min_p[j * T + t] < options.alpha;
        }
      }
      break;
    }
    case BaselineMethod::scan:
    case BaselineMethod::scan_batch: {
      const auto series = weighted_degree_series(stream);
      std::vector<CountSeries> batches;
      if (method == BaselineMethod::scan_batch) {
        if (training == nullptr) throw ConfigError("scan-batch needs a training stream");
        if (training->node_count() != n) {
          throw ValidationError("training and test streams disagree on the node count");
        }
        batches = weighted_degree_series(*training);
      }
      for (NodeIndex j = 0; j < n; ++j) {
        const auto scores = method == BaselineMethod::scan
                                ? scan_statistic_scores(series[j], options.lookback, options.side)
                                : scan_batch_scores(series[j], batches[j], options.side);
        std::optional<Moments> batch_moments;
        if (method == BaselineMethod::scan_batch) {
          batch_moments = moments(batches[j].begin(), batches[j].end());
        }
        for (std::size_t t = 0; t < T; ++t) {
          auto& e = table.entries[j * T + t];
          e.statistic = series[j][t];
          if (batch_moments) {
            e.reference = batch_moments->mean;
            e.scale = std::max(batch_moments->sd, 1.0);
          } else if (t >= options.lookback) {
            const auto history = series[j].begin() + static_cast<std::ptrdiff_t>(t);
            const auto m = moments(history - static_cast<std::ptrdiff_t>(options.lookback), history);
            e.reference = m.mean;
            e.scale = std::max(m.sd, 1.0);
          }
          e.score = scores[t];
          e.is_anomaly = scores[t] > options.z_threshold;
        }
      }
      break;
    }
  }
  return table;
}

}  // namespace cliquewatch
