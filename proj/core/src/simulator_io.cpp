#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "cliquewatch/error.hpp"
#include "cliquewatch/simulator.hpp"
#include "cliquewatch/text.hpp"

// Simulation config keys:
//   nodes, components, timestamps, train_windows      integers
//   events_per_timestamp                               int or list of T ints
//   visibility                                         float or list of N floats
//   component_sd                                       float
//   dirichlet_mixing                                   true|false
//   layout_seed, seed                                  integers
//   anomaly_node                                       integer (enables anomalies)
//   anomaly_intervals                                  list of first-last (inclusive)
//   anomaly_visibility, anomaly_count                  lists, one per interval

namespace cliquewatch {

namespace {

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  for (auto& item : split_csv_line(value)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& value) {
  const long long v = parse_int(value);
  if (v < 0) throw ConfigError(key + " must be non-negative");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key + " must be true or false");
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

}  // namespace

SimulationConfig parse_simulation_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second) {
      throw ParseError(lineno, "duplicate key '" + key + "'");
    }
  }

  static const std::set<std::string> known{
      "nodes",          "components",       "timestamps",         "train_windows",
      "events_per_timestamp", "visibility", "component_sd",       "dirichlet_mixing",
      "layout_seed",    "seed",             "anomaly_node",       "anomaly_intervals",
      "anomaly_visibility", "anomaly_count"};
  for (const auto& [key, value] : kv) {
    if (!known.contains(key)) throw ConfigError("unknown simulation config key '" + key + "'");
  }

  SimulationConfig c;
  try {
    if (kv.contains("nodes")) c.node_count = to_size("nodes", kv["nodes"]);
    if (kv.contains("components")) c.components = to_size("components", kv["components"]);
    if (kv.contains("timestamps")) c.timestamps = to_size("timestamps", kv["timestamps"]);
    if (kv.contains("train_windows")) c.train_windows = to_size("train_windows", kv["train_windows"]);
    if (kv.contains("events_per_timestamp")) {
      c.events_per_timestamp.clear();
      for (const auto& v : split_list(kv["events_per_timestamp"])) {
        c.events_per_timestamp.push_back(to_size("events_per_timestamp", v));
      }
    }
    if (kv.contains("visibility")) {
      c.visibility.clear();
      for (const auto& v : split_list(kv["visibility"])) c.visibility.push_back(parse_double(v));
    }
    if (kv.contains("component_sd")) c.component_sd = parse_double(kv["component_sd"]);
    if (kv.contains("dirichlet_mixing")) {
      c.dirichlet_mixing = to_bool("dirichlet_mixing", kv["dirichlet_mixing"]);
    }
    if (kv.contains("layout_seed")) c.layout_seed = to_size("layout_seed", kv["layout_seed"]);
    if (kv.contains("seed")) c.seed = to_size("seed", kv["seed"]);

    if (kv.contains("anomaly_node")) {
      AnomalySpec spec;
      spec.node = to_size("anomaly_node", kv["anomaly_node"]);
      const auto intervals = split_list(kv["anomaly_intervals"]);
      const auto vis = split_list(kv["anomaly_visibility"]);
      const auto counts = split_list(kv["anomaly_count"]);
      if (vis.size() != intervals.size() || (!counts.empty() && counts.size() != intervals.size())) {
        throw ConfigError("anomaly_visibility/anomaly_count need one value per interval");
      }
      for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto dash = intervals[i].find('-', 1);
        if (dash == std::string::npos) throw ConfigError("anomaly interval must be first-last");
        AnomalyInterval a;
        a.first = parse_int(intervals[i].substr(0, dash));
        a.last = parse_int(intervals[i].substr(dash + 1));
        a.visibility_multiplier = parse_double(vis[i]);
        a.count_multiplier = counts.empty() ? 1.0 : parse_double(counts[i]);
        spec.intervals.push_back(a);
      }
      c.anomaly = spec;
    } else if (kv.contains("anomaly_intervals")) {
      throw ConfigError("anomaly_intervals given without anomaly_node");
    }
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

SimulationConfig read_simulation_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open simulation config '" + path + "'");
  return parse_simulation_config(in);
}

void write_simulation_config(std::ostream& out, const SimulationConfig& c) {
  out << "nodes = " << c.node_count << '\n'
      << "components = " << c.components << '\n'
      << "timestamps = " << c.timestamps << '\n'
      << "train_windows = " << c.train_windows << '\n'
      << "events_per_timestamp = " << join(c.events_per_timestamp) << '\n'
      << "visibility = " << join(c.visibility) << '\n'
      << "component_sd = " << format_double(c.component_sd) << '\n'
      << "dirichlet_mixing = " << (c.dirichlet_mixing ? "true" : "false") << '\n'
      << "layout_seed = " << c.layout_seed << '\n'
      << "seed = " << c.seed << '\n';
  if (c.anomaly) {
    std::vector<std::string> intervals;
    std::vector<double> vis;
    std::vector<double> counts;
    for (const auto& a : c.anomaly->intervals) {
      intervals.push_back(std::to_string(a.first) + "-" + std::to_string(a.last));
      vis.push_back(a.visibility_multiplier);
      counts.push_back(a.count_multiplier);
    }
    std::string joined;
    for (std::size_t i = 0; i < intervals.size(); ++i) joined += (i ? ", " : "") + intervals[i];
    out << "anomaly_node = " << c.anomaly->node << '\n'
        << "anomaly_intervals = " << joined << '\n'
        << "anomaly_visibility = " << join(vis) << '\n'
        << "anomaly_count = " << join(counts) << '\n';
  }
}

void write_labels_csv(std::ostream& out, const LabeledStream& labeled) {
  const auto& c = labeled.config();
  out << "node,window,label\n";
  for (NodeIndex j = 0; j < c.node_count; ++j) {
    for (std::size_t t = c.train_windows; t < c.timestamps; ++t) {
      out << j << ',' << t << ',' << (labeled.label(j, static_cast<WindowIndex>(t)) ? 1 : 0) << '\n';
    }
  }
}

void write_locations_csv(std::ostream& out, const LabeledStream& labeled) {
  out << "node,x,y\n";
  const auto& loc = labeled.locations();
  for (NodeIndex j = 0; j < loc.size(); ++j) {
    out << j << ',' << format_double(loc[j].x) << ',' << format_double(loc[j].y) << '\n';
  }
}

void write_oracle_jsonl(std::ostream& out, const LabeledStream& labeled) {
  const auto& stream = labeled.stream();
  const std::size_t n = stream.node_count();
  char buf[32];
  for (std::size_t i = 0; i < stream.size(); ++i) {
    out << "{\"i\":" << i << ",\"t\":" << format_double(stream[i].timestamp) << ",\"eta\":[";
    for (NodeIndex j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof buf, "%.6g", labeled.oracle(i, j));
      if (j > 0) out << ',';
      out << buf;
    }
    out << "]}\n";
  }
}

}  // namespace cliquewatch
