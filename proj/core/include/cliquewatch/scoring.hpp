#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cliquewatch/regression.hpp"
#include "cliquewatch/stream.hpp"

namespace cliquewatch {

// Which tail bound turns a confidence level into a band half-width.
//   plugin         : 2 exp(-2 s^2 / n)               (Hoeffding, eta* replaced by its estimate)
//   theorem        : min_{k in [0,s]} 2 exp(-2k^2/n) + 2 exp(-(s-k)^2 / (2n))
//   theorem_closed : 4 exp(-2 s^2 / (9n))            (k = s/3 in the line above)
enum class BoundMode { plugin, theorem, theorem_closed };

enum class Side { bilateral, unilateral };

// The unilateral score has no square on the deviation. `squared` is an
// opt-in variant using sign(d) * d^2 in place of d.
enum class UnilateralForm { as_printed, squared };

std::string to_string(BoundMode mode);
std::string to_string(Side side);
BoundMode parse_bound_mode(const std::string& name);
Side parse_side(const std::string& name);

// 2 exp(-2 eps^2 / n).
double hoeffding_tail(double eps, std::size_t n);
// sqrt(n ln(2/delta) / 2), the eps at which hoeffding_tail equals delta.
double hoeffding_halfwidth(std::size_t n, double delta);

// rho = 2 exp(-2 (m - mu)^2 / n). Small rho means a large deviation.
double bilateral_score(std::size_t m, double mu, std::size_t n);
// rho = -exp(-2 (mu - m) / (9 n)); grows as m falls below mu.
double unilateral_score(std::size_t m, double mu, std::size_t n,
                        UnilateralForm form = UnilateralForm::as_printed);

double theorem_bound(double s, std::size_t n);
double theorem_bound_closed(double s, std::size_t n);
double bound_value(BoundMode mode, double s, std::size_t n);

// Smallest s >= 0 with bound_value(mode, s, n) <= delta, by bisection to
// an absolute tolerance of 1e-9. The returned s always satisfies the bound.
double invert_bound(BoundMode mode, std::size_t n, double delta);

struct ConfidenceBand {
  NodeIndex node = 0;
  WindowIndex window = 0;
  double center = 0.0;
  double half_width = 0.0;  // unclipped
  double lower = 0.0;       // clipped to [0, n_t]
  double upper = 0.0;
  double delta = 0.0;
  BoundMode mode = BoundMode::plugin;
};

struct AnomalyVerdict {
  NodeIndex node = 0;
  WindowIndex window = 0;
  std::size_t n_t = 0;
  std::size_t observed = 0;
  double mu_hat = 0.0;
  // Ranking score, larger = more anomalous: -rho for bilateral, rho for
  // unilateral.
  double score = 0.0;
  bool is_anomaly = false;
  Side side = Side::bilateral;
};

struct Detection {
  AnomalyVerdict verdict;
  ConfidenceBand band;
};

struct DetectOptions {
  double delta = 0.01;
  BoundMode mode = BoundMode::plugin;
  Side side = Side::bilateral;
  UnilateralForm unilateral_form = UnilateralForm::as_printed;
};

void validate_delta(double delta);

// Verdict from already-computed quantities; detect() is this plus mu_hat
// and m. half_width comes from invert_bound(mode, n_t, delta).
Detection decide(NodeIndex node, WindowIndex window, std::size_t n_t, std::size_t m,
                 double mu_hat, double half_width, const DetectOptions& options);

Detection detect(const ConditionalModel& model, const WindowView& window,
                 const DetectOptions& options);

// Detections for every requested node in every window of a stream.
// Half-widths are computed once per distinct n_t.
std::vector<Detection> detect_all(const ModelSet& models, const WindowedStream& windows,
                                  const std::vector<NodeIndex>& nodes,
                                  const DetectOptions& options, std::size_t threads = 0);

// ---- delta calibration ----

inline const std::vector<double>& default_delta_grid() {
  static const std::vector<double> grid{0.2,  0.1,  0.05, 0.02, 0.01,
                                        5e-3, 1e-3, 1e-4, 1e-5, 1e-6};
  return grid;
}

struct CalibrationOptions {
  double target_fpr = 0.05;
  std::size_t folds = 5;
  BoundMode mode = BoundMode::plugin;
  Side side = Side::bilateral;
  double window_length = 1.0;
  double origin = 0.0;
  std::vector<double> grid = default_delta_grid();
};

struct CalibrationResult {
  double delta = 0.0;
  // false when no grid value reaches the target; delta is then the
  // smallest grid value.
  bool achieved = true;
  std::vector<double> grid;
  std::vector<double> fpr;  // pooled cross-validated FPR per grid value
  std::size_t instances = 0;
};

// Contiguous-block K-fold cross-validation over the training windows.
CalibrationResult calibrate_delta(const EventStream& train, const RegressorConfig& config,
                                  const CalibrationOptions& options);

}  // namespace cliquewatch
