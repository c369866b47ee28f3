#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cliquewatch/scoring.hpp"
#include "cliquewatch/stream.hpp"

namespace cliquewatch {

// Per-window counts of one node (or one edge).
using CountSeries = std::vector<double>;

inline constexpr double kPoissonRateFloor = 0.5;
inline constexpr std::size_t kDefaultScanLookback = 20;

// Mid-p two-sided Poisson p-value from exact tail sums:
// min(1, 2 min(P(X<k) + P(X=k)/2, P(X>k) + P(X=k)/2)), X ~ Poisson(rate).
double poisson_two_sided_pvalue(std::size_t k, double rate);

// Mean of the series without window t, floored at `floor`.
std::vector<double> leave_one_out_rates(const CountSeries& series,
                                        double floor = kPoissonRateFloor);

// -p per window, p from the retrospective (leave-one-out) Poisson fit.
std::vector<double> heard_node_scores(const CountSeries& series);

// Node score at window t is minus the sum of the leave-one-out p-values of
// its active edges (edges with a nonzero total count). Layout: node-major,
// scores[j * T + t].
std::vector<double> heard_edge_scores(const std::vector<AggregatedGraph>& graphs);

// Normalized deviation from the previous `lookback` windows:
// (x_t - mean) / max(sd, 1), sample sd; zero for t < lookback.
// Bilateral returns |z|, unilateral returns -z.
std::vector<double> scan_statistic_scores(const CountSeries& series, std::size_t lookback,
                                          Side side = Side::bilateral);

// Same normalization against fixed statistics of a training batch.
std::vector<double> scan_batch_scores(const CountSeries& series, const CountSeries& batch,
                                      Side side = Side::bilateral);

// ---- whole-stream tables ----

enum class BaselineMethod { heard_node, heard_edge, scan, scan_batch };

std::string to_string(BaselineMethod method);
BaselineMethod parse_baseline_method(const std::string& name);

struct BaselineEntry {
  double statistic = 0.0;  // count, weighted degree
  double reference = 0.0;  // fitted rate or reference mean
  double scale = 0.0;      // normalization for scan methods, 0 otherwise
  double score = 0.0;      // larger = more anomalous
  bool is_anomaly = false;
};

struct BaselineScoreTable {
  BaselineMethod method = BaselineMethod::heard_node;
  Side side = Side::bilateral;
  std::size_t node_count = 0;
  std::vector<WindowIndex> windows;
  std::vector<std::size_t> n_t;
  std::vector<BaselineEntry> entries;  // node-major

  const BaselineEntry& at(NodeIndex j, std::size_t w) const {
    return entries[j * windows.size() + w];
  }
};

struct BaselineOptions {
  std::size_t lookback = kDefaultScanLookback;
  Side side = Side::bilateral;
  // Flags p < alpha for the Heard variants (any incident edge for
  // heard-edge) and score > z_threshold for the scan variants.
  double alpha = 0.05;
  double z_threshold = 3.0;
};

// M_t^(j) per window for every node, node-major.
std::vector<CountSeries> node_count_series(const WindowedStream& windows);
// Weighted degree in the aggregated graph per window for every node.
std::vector<CountSeries> weighted_degree_series(const WindowedStream& windows);

BaselineScoreTable baseline_scores(BaselineMethod method, const WindowedStream& stream,
                                   const BaselineOptions& options,
                                   const WindowedStream* training = nullptr);

}  // namespace cliquewatch
