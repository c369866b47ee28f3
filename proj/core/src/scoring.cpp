#include "cliquewatch/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cliquewatch/error.hpp"
#include "parallel.hpp"

namespace cliquewatch {

std::string to_string(BoundMode mode) {
  switch (mode) {
    case BoundMode::plugin: return "plugin";
    case BoundMode::theorem: return "theorem";
    case BoundMode::theorem_closed: return "theorem_closed";
  }
  return "?";
}

std::string to_string(Side side) { return side == Side::bilateral ? "bilateral" : "unilateral"; }

BoundMode parse_bound_mode(const std::string& name) {
  if (name == "plugin") return BoundMode::plugin;
  if (name == "theorem") return BoundMode::theorem;
  if (name == "theorem_closed") return BoundMode::theorem_closed;
  throw ConfigError("unknown bound mode '" + name + "' (expected plugin|theorem|theorem_closed)");
}

Side parse_side(const std::string& name) {
  if (name == "bilateral") return Side::bilateral;
  if (name == "unilateral") return Side::unilateral;
  throw ConfigError("unknown side '" + name + "' (expected bilateral|unilateral)");
}

namespace {

void require_positive_count(std::size_t n, const char* where) {
  if (n == 0) throw DomainError(std::string(where) + ": n_t must be >= 1");
}

void require_nonnegative(double s, const char* what) {
  if (!(s >= 0.0)) throw DomainError(std::string(what) + " must be >= 0");
}

double theorem_objective(double k, double s, double n) {
  return 2.0 * std::exp(-2.0 * k * k / n) + 2.0 * std::exp(-(s - k) * (s - k) / (2.0 * n));
}

}  // namespace

double hoeffding_tail(double eps, std::size_t n) {
  require_nonnegative(eps, "hoeffding_tail: eps");
  require_positive_count(n, "hoeffding_tail");
  return 2.0 * std::exp(-2.0 * eps * eps / static_cast<double>(n));
}

void validate_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("confidence level delta must lie in (0, 1)");
  }
}

double hoeffding_halfwidth(std::size_t n, double delta) {
  validate_delta(delta);
  require_positive_count(n, "hoeffding_halfwidth");
  return std::sqrt(static_cast<double>(n) * std::log(2.0 / delta) / 2.0);
}

double bilateral_score(std::size_t m, double mu, std::size_t n) {
  require_positive_count(n, "bilateral_score");
  const double d = static_cast<double>(m) - mu;
  return 2.0 * std::exp(-2.0 * d * d / static_cast<double>(n));
}

double unilateral_score(std::size_t m, double mu, std::size_t n, UnilateralForm form) {
  require_positive_count(n, "unilateral_score");
  double d = mu - static_cast<double>(m);
  if (form == UnilateralForm::squared) d = d * std::abs(d);
  return -std::exp(-2.0 * d / (9.0 * static_cast<double>(n)));
}

double theorem_bound(double s, std::size_t n) {
  require_nonnegative(s, "theorem_bound: s");
  require_positive_count(n, "theorem_bound");
  if (s == 0.0) return 4.0;
  const double nn = static_cast<double>(n);

  constexpr int kGrid = 1000;  // 1001 points
  int best_i = 0;
  double best = theorem_objective(0.0, s, nn);
  for (int i = 1; i <= kGrid; ++i) {
    const double v = theorem_objective(s * i / kGrid, s, nn);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }

  // Golden-section refinement on the grid cells around the minimizer.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = s * std::max(best_i - 1, 0) / kGrid;
  double b = s * std::min(best_i + 1, kGrid) / kGrid;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = theorem_objective(c, s, nn);
  double fd = theorem_objective(d, s, nn);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * s; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = theorem_objective(c, s, nn);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = theorem_objective(d, s, nn);
    }
  }
  return std::min({best, fc, fd});
}

double theorem_bound_closed(double s, std::size_t n) {
  require_nonnegative(s, "theorem_bound_closed: s");
  require_positive_count(n, "theorem_bound_closed");
  return 4.0 * std::exp(-2.0 * s * s / (9.0 * static_cast<double>(n)));
}

double bound_value(BoundMode mode, double s, std::size_t n) {
  switch (mode) {
    case BoundMode::plugin: return hoeffding_tail(s, n);
    case BoundMode::theorem: return theorem_bound(s, n);
    case BoundMode::theorem_closed: return theorem_bound_closed(s, n);
  }
  throw DomainError("unknown bound mode");
}

double invert_bound(BoundMode mode, std::size_t n, double delta) {
  validate_delta(delta);
  require_positive_count(n, "invert_bound");
  double lo = 0.0;
  double hi = std::sqrt(static_cast<double>(n));
  while (bound_value(mode, hi, n) > delta) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (bound_value(mode, mid, n) <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

Detection decide(NodeIndex node, WindowIndex window, std::size_t n_t, std::size_t m,
                 double mu_hat, double half_width, const DetectOptions& options) {
  Detection out;
  auto& v = out.verdict;
  auto& band = out.band;
  v.node = band.node = node;
  v.window = band.window = window;
  v.side = options.side;
  v.n_t = n_t;
  band.delta = options.delta;
  band.mode = options.mode;

  if (n_t == 0) {
    v.score = options.side == Side::bilateral ? -2.0 : -1.0;
    return out;
  }

  v.observed = m;
  v.mu_hat = mu_hat;
  band.center = mu_hat;
  band.half_width = half_width;
  band.lower = std::max(0.0, mu_hat - half_width);
  band.upper = std::min(static_cast<double>(n_t), mu_hat + half_width);

  const double deviation = static_cast<double>(m) - mu_hat;
  if (options.side == Side::bilateral) {
    v.is_anomaly = std::abs(deviation) > half_width;
    v.score = -bilateral_score(m, mu_hat, n_t);
  } else {
    v.is_anomaly = deviation < -half_width;
    v.score = unilateral_score(m, mu_hat, n_t, options.unilateral_form);
  }
  return out;
}

Detection detect(const ConditionalModel& model, const WindowView& window,
                 const DetectOptions& options) {
  validate_delta(options.delta);
  if (window.node_count != model.node_count()) {
    throw IndexError("detect: window and model disagree on the node count");
  }
  const std::size_t n_t = window.size();
  if (n_t == 0) return decide(model.node(), window.index, 0, 0, 0.0, 0.0, options);
  const double mu = predicted_mean(model, window);
  const std::size_t m = node_count_in_window(window, model.node());
  return decide(model.node(), window.index, n_t, m, mu,
                invert_bound(options.mode, n_t, options.delta), options);
}

std::vector<Detection> detect_all(const ModelSet& models, const WindowedStream& windows,
                                  const std::vector<NodeIndex>& nodes,
                                  const DetectOptions& options, std::size_t threads) {
  validate_delta(options.delta);
  if (windows.node_count() != models.node_count()) {
    throw IndexError("detect: stream has N = " + std::to_string(windows.node_count()) +
                     " but the model has N = " + std::to_string(models.node_count()));
  }
  const std::size_t count = windows.window_count();
  std::vector<double> half_widths(count, 0.0);
  std::map<std::size_t, double> cache;
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t n_t = windows.window(w).size();
    if (n_t == 0) continue;
    auto it = cache.find(n_t);
    if (it == cache.end()) {
      it = cache.emplace(n_t, invert_bound(options.mode, n_t, options.delta)).first;
    }
    half_widths[w] = it->second;
  }

  std::vector<Detection> out(nodes.size() * count);
  const auto events = windows.stream().events();
  detail::parallel_for(nodes.size(), threads, [&](std::size_t i) {
    const auto predictions = models.model(nodes[i]).predict_events(events);
    for (std::size_t w = 0; w < count; ++w) {
      const auto view = windows.window(w);
      const std::size_t n_t = view.size();
      // Same summation order as predicted_mean.
      const auto first = static_cast<std::size_t>(view.events.data() - events.data());
      double mu = 0.0;
      for (std::size_t k = 0; k < n_t; ++k) mu += predictions[first + k];
      const std::size_t m = n_t == 0 ? 0 : node_count_in_window(view, nodes[i]);
      out[i * count + w] = decide(nodes[i], view.index, n_t, m, mu, half_widths[w], options);
    }
  });
  return out;
}

}  // namespace cliquewatch
