#include "cliquewatch/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cliquewatch/error.hpp"

namespace cliquewatch {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void MixtureModel::validate() const {
  if (means.empty()) throw ConfigError("mixture needs at least one component");
  if (sds.size() != means.size() || weights.size() != means.size()) {
    throw ConfigError("mixture means, sds and weights differ in length");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < means.size(); ++k) {
    if (!(sds[k] >= 0.0)) throw ConfigError("mixture component sd must be >= 0");
    if (!(weights[k] >= 0.0)) throw ConfigError("mixture weights must be >= 0");
    total += weights[k];
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("mixture weights must sum to 1");
}

MixtureModel MixtureModel::uniform_layout(std::size_t components, double sd, Rng& rng) {
  MixtureModel m;
  for (std::size_t k = 0; k < components; ++k) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    m.means.push_back({x, y});
    m.sds.push_back(sd);
    m.weights.push_back(1.0 / static_cast<double>(components));
  }
  return m;
}

Point sample_point(const MixtureModel& mixture, Rng& rng) {
  // Inverse-CDF component choice; zero-weight components are never hit.
  const double u = rng.uniform();
  std::size_t chosen = mixture.size();
  std::size_t last_positive = 0;
  double acc = 0.0;
  for (std::size_t k = 0; k < mixture.size(); ++k) {
    if (mixture.weights[k] <= 0.0) continue;
    last_positive = k;
    acc += mixture.weights[k];
    if (u < acc) {
      chosen = k;
      break;
    }
  }
  if (chosen == mixture.size()) chosen = last_positive;
  const double dx = rng.normal();
  const double dy = rng.normal();
  const auto& mean = mixture.means[chosen];
  return {mean.x + mixture.sds[chosen] * dx, mean.y + mixture.sds[chosen] * dy};
}

std::vector<Point> sample_locations(const MixtureModel& mixture, std::size_t count, Rng& rng) {
  mixture.validate();
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_point(mixture, rng));
  return out;
}

std::vector<double> sample_flat_dirichlet(std::size_t k, Rng& rng) {
  std::vector<double> w(k);
  for (auto& v : w) v = rng.exponential();
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= total;
  // Fold rounding residue into the largest entry so the weights sum to 1.
  const double residue = 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
  *std::max_element(w.begin(), w.end()) += residue;
  return w;
}

double participation_probability(const Point& node, const Point& transmission, double visibility) {
  return std::exp(-distance(node, transmission) / visibility);
}

Fingerprint sample_fingerprint_at(const std::vector<Point>& locations,
                                  const std::vector<double>& visibilities,
                                  const Point& transmission, Rng& rng) {
  Fingerprint fp(locations.size());
  for (std::size_t j = 0; j < locations.size(); ++j) {
    const double p = participation_probability(locations[j], transmission, visibilities[j]);
    if (rng.uniform() < p) fp.set(j);
  }
  return fp;
}

SampledEvent sample_event(const std::vector<Point>& locations,
                          const std::vector<double>& visibilities, const MixtureModel& mixture,
                          Rng& rng) {
  if (visibilities.size() != locations.size()) {
    throw ConfigError("one visibility per node location is required");
  }
  for (double v : visibilities) {
    if (!(v > 0.0)) throw ConfigError("visibility parameters must be > 0");
  }
  for (std::size_t attempt = 0; attempt < kMaxRejections; ++attempt) {
    const Point l = sample_point(mixture, rng);
    Fingerprint fp = sample_fingerprint_at(locations, visibilities, l, rng);
    if (fp.none()) continue;
    double none = 1.0;
    for (std::size_t j = 0; j < locations.size(); ++j) {
      none *= 1.0 - participation_probability(locations[j], l, visibilities[j]);
    }
    return SampledEvent{std::move(fp), l, 1.0 - none};
  }
  throw DegenerateConfigError("no event with a participant after " +
                              std::to_string(kMaxRejections) + " draws; visibilities too small?");
}

// ---------------------------------------------------------------- config

void SimulationConfig::validate() const {
  if (node_count < 1) throw ConfigError("nodes must be >= 1");
  if (components < 1) throw ConfigError("components must be >= 1");
  if (timestamps <= train_windows) throw ConfigError("timestamps must exceed train_windows");
  if (events_per_timestamp.size() != 1 && events_per_timestamp.size() != timestamps) {
    throw ConfigError("events_per_timestamp needs 1 or `timestamps` values");
  }
  if (visibility.size() != 1 && visibility.size() != node_count) {
    throw ConfigError("visibility needs 1 or `nodes` values");
  }
  for (double v : visibility) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("visibility values must be > 0");
  }
  if (!(component_sd >= 0.0)) throw ConfigError("component_sd must be >= 0");
  if (!anomaly) return;
  if (anomaly->node >= node_count) throw ConfigError("anomaly node out of range");
  std::vector<AnomalyInterval> sorted = anomaly->intervals;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& a = sorted[i];
    if (a.first > a.last) throw ConfigError("anomaly interval with first > last");
    if (a.first < static_cast<WindowIndex>(train_windows) ||
        a.last >= static_cast<WindowIndex>(timestamps)) {
      throw ConfigError("anomaly intervals must lie inside the test range");
    }
    if (!(a.visibility_multiplier > 0.0 && a.visibility_multiplier <= 1.0)) {
      throw ConfigError("visibility multiplier must lie in (0, 1]");
    }
    if (!(a.count_multiplier >= 1.0)) throw ConfigError("count multiplier must be >= 1");
    if (i > 0 && sorted[i - 1].last >= a.first) {
      throw ConfigError("anomaly intervals overlap");
    }
  }
}

std::size_t SimulationConfig::events_at(std::size_t t) const {
  const std::size_t base =
      events_per_timestamp.size() == 1 ? events_per_timestamp[0] : events_per_timestamp[t];
  if (const auto* a = anomaly_at(static_cast<WindowIndex>(t))) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(base) * a->count_multiplier));
  }
  return base;
}

double SimulationConfig::visibility_of(NodeIndex j) const {
  return visibility.size() == 1 ? visibility[0] : visibility[j];
}

const AnomalyInterval* SimulationConfig::anomaly_at(WindowIndex t) const {
  if (!anomaly) return nullptr;
  for (const auto& a : anomaly->intervals) {
    if (t >= a.first && t <= a.last) return &a;
  }
  return nullptr;
}

Preset parse_preset(const std::string& name) {
  if (name == "E1") return Preset::E1;
  if (name == "E2") return Preset::E2;
  if (name == "E3") return Preset::E3;
  throw ConfigError("unknown preset '" + name + "' (expected E1|E2|E3)");
}

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::E1: return "E1";
    case Preset::E2: return "E2";
    case Preset::E3: return "E3";
  }
  return "?";
}

SimulationConfig preset(Preset which) {
  SimulationConfig c;
  c.node_count = 100;
  c.components = 10;
  c.timestamps = 1100;
  c.train_windows = 500;
  c.events_per_timestamp = {100};
  c.visibility = {0.08};
  c.component_sd = 0.05;
  c.layout_seed = 2019;
  c.dirichlet_mixing = which != Preset::E1;

  // The last interval is cut at the final timestamp, 1099.
  const WindowIndex starts[] = {750, 850, 950, 1050};
  const WindowIndex ends[] = {800, 900, 1000, 1099};
  const double visibility[] = {0.8, 0.6, 0.45, 0.3};
  const double counts[] = {1.3, 1.6, 2.0, 2.5};
  AnomalySpec spec;
  spec.node = kPresetAnomalousNode;
  for (int i = 0; i < 4; ++i) {
    spec.intervals.push_back(
        {starts[i], ends[i], visibility[i], which == Preset::E3 ? counts[i] : 1.0});
  }
  c.anomaly = spec;
  return c;
}

// ---------------------------------------------------------------- generation

Layout sample_layout(const SimulationConfig& config) {
  Rng rng(config.layout_seed);
  Layout layout;
  layout.mixture = MixtureModel::uniform_layout(config.components, config.component_sd, rng);
  layout.locations = sample_locations(layout.mixture, config.node_count, rng);
  return layout;
}

std::vector<double> expected_count_drops(const Layout& layout, const SimulationConfig& config,
                                         double multiplier, std::size_t samples, Rng& rng) {
  if (!(multiplier > 0.0)) throw ConfigError("visibility multiplier must be > 0");
  if (samples == 0) throw ConfigError("need at least one Monte-Carlo sample");
  const std::size_t n = layout.locations.size();
  // E[count] per event = E[p_j] / E[acceptance] under rejection sampling.
  std::vector<double> base(n, 0.0);
  std::vector<double> lowered(n, 0.0);
  std::vector<double> p(n);
  double acceptance = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Point l = sample_point(layout.mixture, rng);
    double none = 1.0;
    for (NodeIndex j = 0; j < n; ++j) {
      const double v = config.visibility_of(j);
      p[j] = participation_probability(layout.locations[j], l, v);
      none *= 1.0 - p[j];
      base[j] += p[j];
      lowered[j] += participation_probability(layout.locations[j], l, v * multiplier);
    }
    acceptance += 1.0 - none;
  }
  const auto events = static_cast<double>(config.events_at(0));
  std::vector<double> drops(n);
  for (NodeIndex j = 0; j < n; ++j) drops[j] = events * (base[j] - lowered[j]) / acceptance;
  return drops;
}

double LabeledStream::visibility_at(NodeIndex j, WindowIndex t) const {
  double v = config_.visibility_of(j);
  if (config_.anomaly && config_.anomaly->node == j) {
    if (const auto* a = config_.anomaly_at(t)) v *= a->visibility_multiplier;
  }
  return v;
}

bool LabeledStream::label(NodeIndex j, WindowIndex t) const {
  return config_.anomaly && config_.anomaly->node == j && config_.anomaly_at(t) != nullptr;
}

double LabeledStream::oracle(std::size_t event, NodeIndex j) const {
  const Event& e = stream_[event];
  const auto t = static_cast<WindowIndex>(std::floor(e.timestamp));
  const double p = participation_probability(locations_[j], transmission_[event], visibility_at(j, t));
  return p / acceptance_[event];
}

LabeledStream generate(const SimulationConfig& config) {
  config.validate();
  LabeledStream out;
  out.config_ = config;
  auto layout = sample_layout(config);
  out.mixture_ = std::move(layout.mixture);
  out.locations_ = std::move(layout.locations);

  Rng rng(config.seed);
  MixtureModel current = out.mixture_;
  std::vector<double> visibilities(config.node_count);
  std::vector<Event> events;
  for (std::size_t t = 0; t < config.timestamps; ++t) {
    if (config.dirichlet_mixing) current.weights = sample_flat_dirichlet(config.components, rng);
    for (NodeIndex j = 0; j < config.node_count; ++j) {
      visibilities[j] = out.visibility_at(j, static_cast<WindowIndex>(t));
    }
    const std::size_t n_t = config.events_at(t);
    for (std::size_t i = 0; i < n_t; ++i) {
      auto sampled = sample_event(out.locations_, visibilities, current, rng);
      const double ts = static_cast<double>(t) + static_cast<double>(i) / static_cast<double>(n_t + 1);
      events.push_back(Event{ts, std::move(sampled.fingerprint)});
      out.transmission_.push_back(sampled.transmission);
      out.acceptance_.push_back(sampled.acceptance);
    }
  }
  out.stream_ = EventStream(config.node_count, std::move(events));
  return out;
}

}  // namespace cliquewatch
