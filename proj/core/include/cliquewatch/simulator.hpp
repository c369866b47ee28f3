#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cliquewatch/random.hpp"
#include "cliquewatch/stream.hpp"

namespace cliquewatch {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

// Mixture of isotropic bivariate Gaussians.
struct MixtureModel {
  std::vector<Point> means;
  std::vector<double> sds;
  std::vector<double> weights;

  std::size_t size() const noexcept { return means.size(); }
  void validate() const;

  // K components with means uniform on the unit square, common sd and
  // equal weights.
  static MixtureModel uniform_layout(std::size_t components, double sd, Rng& rng);
};

Point sample_point(const MixtureModel& mixture, Rng& rng);
std::vector<Point> sample_locations(const MixtureModel& mixture, std::size_t count, Rng& rng);

// Dirichlet(1, ..., 1) of order k.
std::vector<double> sample_flat_dirichlet(std::size_t k, Rng& rng);

// exp(-d(x, l) / visibility).
double participation_probability(const Point& node, const Point& transmission, double visibility);

// One Bernoulli draw per node at a fixed transmission point. May be
// all-zero; consumes exactly one uniform per node.
Fingerprint sample_fingerprint_at(const std::vector<Point>& locations,
                                  const std::vector<double>& visibilities,
                                  const Point& transmission, Rng& rng);

struct SampledEvent {
  Fingerprint fingerprint;
  Point transmission;
  // P(at least one participant | transmission); the oracle divides by it.
  double acceptance = 1.0;
};

inline constexpr std::size_t kMaxRejections = 10000;

// Draws a transmission point from the mixture (with the given weights)
// and the participants around it, redrawing everything while no node
// participates.
SampledEvent sample_event(const std::vector<Point>& locations,
                          const std::vector<double>& visibilities, const MixtureModel& mixture,
                          Rng& rng);

struct AnomalyInterval {
  WindowIndex first = 0;  // inclusive
  WindowIndex last = 0;   // inclusive
  double visibility_multiplier = 1.0;
  double count_multiplier = 1.0;
};

struct AnomalySpec {
  NodeIndex node = 0;
  std::vector<AnomalyInterval> intervals;
};

struct SimulationConfig {
  std::size_t node_count = 100;
  std::size_t components = 10;
  std::size_t timestamps = 1100;
  std::size_t train_windows = 500;
  // One value for a constant count, or one value per timestamp.
  std::vector<std::size_t> events_per_timestamp{100};
  // One shared value, or one value per node.
  std::vector<double> visibility{0.08};
  double component_sd = 0.05;
  bool dirichlet_mixing = false;
  std::optional<AnomalySpec> anomaly;
  std::uint64_t layout_seed = 2019;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t events_at(std::size_t t) const;
  double visibility_of(NodeIndex j) const;
  const AnomalyInterval* anomaly_at(WindowIndex t) const;
};

enum class Preset { E1, E2, E3 };

// Node whose visibility drops inside the preset anomaly intervals. Picked
// from the layout alone (layout_seed 2019): the node whose expected
// per-window count falls the most when its visibility is scaled by 0.8,
// the mildest preset multiplier. See expected_count_drops().
inline constexpr NodeIndex kPresetAnomalousNode = 80;

Preset parse_preset(const std::string& name);
std::string to_string(Preset preset);
SimulationConfig preset(Preset which);

// Generated stream with ground truth. Unit-length windows: timestamp t
// holds events t + i / (n_t + 1).
class LabeledStream {
 public:
  const SimulationConfig& config() const noexcept { return config_; }
  const EventStream& stream() const noexcept { return stream_; }
  const MixtureModel& mixture() const noexcept { return mixture_; }
  const std::vector<Point>& locations() const noexcept { return locations_; }

  bool label(NodeIndex j, WindowIndex t) const;

  // True probability that node j participates in event i, given the
  // event's transmission point and that the event has a participant.
  double oracle(std::size_t event, NodeIndex j) const;
  const Point& transmission(std::size_t event) const { return transmission_[event]; }
  double visibility_at(NodeIndex j, WindowIndex t) const;

 private:
  friend LabeledStream generate(const SimulationConfig& config);

  SimulationConfig config_;
  EventStream stream_;
  MixtureModel mixture_;
  std::vector<Point> locations_;
  std::vector<Point> transmission_;
  std::vector<double> acceptance_;
};

LabeledStream generate(const SimulationConfig& config);

// Only the mixture and node locations (the layout RNG lineage).
struct Layout {
  MixtureModel mixture;
  std::vector<Point> locations;
};
Layout sample_layout(const SimulationConfig& config);

// Monte-Carlo estimate, per node j, of how much j's expected count in a
// window of events_at(0) events drops when only j's visibility is scaled by
// `multiplier`. Transmission points come from the layout mixture.
std::vector<double> expected_count_drops(const Layout& layout, const SimulationConfig& config,
                                         double multiplier, std::size_t samples, Rng& rng);

// ---- files ----

// Flat "key = value" text; '#' starts a comment. Lists are comma
// separated, intervals are "first-last".
SimulationConfig parse_simulation_config(std::istream& in);
SimulationConfig read_simulation_config_file(const std::string& path);
void write_simulation_config(std::ostream& out, const SimulationConfig& config);

// node,window,label for every node and every test window (t >= train_windows).
void write_labels_csv(std::ostream& out, const LabeledStream& labeled);
// node,x,y
void write_locations_csv(std::ostream& out, const LabeledStream& labeled);
// {"i": event, "t": timestamp, "eta": [N probabilities, 6 significant digits]}
void write_oracle_jsonl(std::ostream& out, const LabeledStream& labeled);

}  // namespace cliquewatch
