#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "cliquewatch/error.hpp"
#include "cliquewatch/scoring.hpp"

namespace cliquewatch {

CalibrationResult calibrate_delta(const EventStream& train, const RegressorConfig& config,
                                  const CalibrationOptions& options) {
  if (!(options.target_fpr > 0.0 && options.target_fpr <= 1.0)) {
    throw DomainError("target false positive rate must lie in (0, 1]");
  }
  if (options.folds < 2) throw ConfigError("calibration needs at least 2 folds");
  if (options.grid.empty()) throw ConfigError("calibration grid is empty");
  for (double d : options.grid) validate_delta(d);

  const WindowedStream windows(train, options.window_length, options.origin);
  const std::size_t total = windows.window_count();
  if (total < options.folds) {
    throw ValidationError("training stream spans " + std::to_string(total) +
                          " windows, fewer than the " + std::to_string(options.folds) +
                          " folds requested");
  }

  const std::size_t grid_size = options.grid.size();
  const std::size_t nodes = train.node_count();
  std::vector<std::size_t> detections(grid_size, 0);
  std::size_t instances = 0;
  // Half-widths depend only on (n_t, delta).
  std::map<std::size_t, std::vector<double>> half_widths;

  for (std::size_t k = 0; k < options.folds; ++k) {
    const std::size_t begin = k * total / options.folds;
    const std::size_t end = (k + 1) * total / options.folds;

    std::vector<Event> rest;
    for (std::size_t w = 0; w < total; ++w) {
      if (w >= begin && w < end) continue;
      const auto view = windows.window(w);
      rest.insert(rest.end(), view.events.begin(), view.events.end());
    }
    const EventStream fold_train(nodes, std::move(rest));
    const ModelSet models = fit_all(fold_train, config);

    // Held-out windows are contiguous, so their events form one run.
    const auto all = windows.stream().events();
    const auto first = static_cast<std::size_t>(windows.window(begin).events.data() - all.data());
    const auto last_view = windows.window(end - 1);
    const auto last =
        static_cast<std::size_t>(last_view.events.data() - all.data()) + last_view.size();
    std::vector<std::vector<double>> predictions(nodes);
    for (NodeIndex j = 0; j < nodes; ++j) {
      predictions[j] = models.model(j).predict_events(all.subspan(first, last - first));
    }

    for (std::size_t w = begin; w < end; ++w) {
      const auto view = windows.window(w);
      const std::size_t n_t = view.size();
      instances += nodes;
      if (n_t == 0) continue;
      const auto offset = static_cast<std::size_t>(view.events.data() - all.data()) - first;
      auto it = half_widths.find(n_t);
      if (it == half_widths.end()) {
        std::vector<double> s(grid_size);
        for (std::size_t g = 0; g < grid_size; ++g) {
          s[g] = invert_bound(options.mode, n_t, options.grid[g]);
        }
        it = half_widths.emplace(n_t, std::move(s)).first;
      }
      for (NodeIndex j = 0; j < nodes; ++j) {
        double mu = 0.0;
        for (std::size_t k = 0; k < n_t; ++k) mu += predictions[j][offset + k];
        const std::size_t m = node_count_in_window(view, j);
        for (std::size_t g = 0; g < grid_size; ++g) {
          DetectOptions opts;
          opts.delta = options.grid[g];
          opts.mode = options.mode;
          opts.side = options.side;
          const auto d = decide(j, view.index, n_t, m, mu, it->second[g], opts);
          if (d.verdict.is_anomaly) ++detections[g];
        }
      }
    }
  }

  CalibrationResult result;
  result.grid = options.grid;
  result.instances = instances;
  result.fpr.resize(grid_size);
  std::optional<double> best;
  for (std::size_t g = 0; g < grid_size; ++g) {
    result.fpr[g] = static_cast<double>(detections[g]) / static_cast<double>(instances);
    if (result.fpr[g] <= options.target_fpr && (!best || options.grid[g] > *best)) {
      best = options.grid[g];
    }
  }
  if (best) {
    result.delta = *best;
    result.achieved = true;
  } else {
    result.delta = *std::min_element(options.grid.begin(), options.grid.end());
    result.achieved = false;
  }
  return result;
}

}  // namespace cliquewatch
