#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cliquewatch {

using NodeIndex = std::size_t;
using WindowIndex = std::int64_t;

// Participation flags of one event over N nodes, packed 64 per word.
// A fingerprint taking part in a stream always has at least one bit set;
// reduced fingerprints produced by exclude_node may be all-zero.
class Fingerprint {
 public:
  Fingerprint() = default;
  explicit Fingerprint(std::size_t size);
  Fingerprint(std::size_t size, std::span<const NodeIndex> participants);
  Fingerprint(std::size_t size, std::initializer_list<NodeIndex> participants);

  // Parses a '0'/'1' string, leftmost character is node 0.
  static Fingerprint from_string(const std::string& bits);

  std::size_t size() const noexcept { return size_; }
  bool test(NodeIndex j) const;
  void set(NodeIndex j, bool value = true);
  std::size_t count() const noexcept;
  bool none() const noexcept { return count() == 0; }
  std::vector<NodeIndex> participants() const;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  std::string to_string() const;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

std::size_t hamming_distance(const Fingerprint& a, const Fingerprint& b);

// Drops position j, keeping the order of the remaining bits.
Fingerprint exclude_node(const Fingerprint& fp, NodeIndex j);

// Inverse of exclude_node: inserts `bit` at position j.
Fingerprint insert_node(const Fingerprint& reduced, NodeIndex j, bool bit);

struct Event {
  double timestamp = 0.0;
  Fingerprint fingerprint;
};

// Timestamp-ordered sequence of events over a fixed node set.
// Immutable after construction.
class EventStream {
 public:
  EventStream() = default;

  // Validates every event and stable-sorts by timestamp.
  EventStream(std::size_t node_count, std::vector<Event> events);

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  std::span<const Event> events() const noexcept { return events_; }
  const Event& operator[](std::size_t i) const { return events_[i]; }

  // Events with begin <= timestamp < end.
  EventStream slice(double begin, double end) const;

 private:
  std::size_t node_count_ = 0;
  std::vector<Event> events_;
};

// Events of one detection window: a contiguous run of the parent stream.
struct WindowView {
  WindowIndex index = 0;
  std::size_t node_count = 0;
  std::span<const Event> events;

  std::size_t size() const noexcept { return events.size(); }
  bool empty() const noexcept { return events.empty(); }
};

// Partition of a stream into half-open windows
// [origin + k*length, origin + (k+1)*length). Every window index between
// the first and last occupied one is materialized, empty or not.
class WindowedStream {
 public:
  WindowedStream(EventStream stream, double window_length, double origin = 0.0);

  double window_length() const noexcept { return window_length_; }
  double origin() const noexcept { return origin_; }
  const EventStream& stream() const noexcept { return stream_; }
  std::size_t node_count() const noexcept { return stream_.node_count(); }

  std::size_t window_count() const noexcept { return offsets_.size(); }
  WindowView window(std::size_t position) const;
  WindowIndex first_index() const noexcept { return first_index_; }

  // Events of windows [first, last) by position, as a new stream.
  EventStream sub_stream(std::size_t first, std::size_t last) const;

 private:
  EventStream stream_;
  double window_length_;
  double origin_;
  WindowIndex first_index_ = 0;
  // [begin, end) event offsets per materialized window.
  std::vector<std::pair<std::size_t, std::size_t>> offsets_;
};

WindowIndex window_index_of(double timestamp, double window_length, double origin);

// M_t^(j): number of events in the window in which node j participates.
std::size_t node_count_in_window(const WindowView& window, NodeIndex j);

// Symmetric co-participation counts for one window; diagonal is zero.
class AggregatedGraph {
 public:
  explicit AggregatedGraph(std::size_t node_count);

  std::size_t node_count() const noexcept { return n_; }
  std::uint32_t weight(NodeIndex u, NodeIndex v) const;
  void add(NodeIndex u, NodeIndex v, std::uint32_t w = 1);
  // Sum of incident edge weights.
  std::uint64_t weighted_degree(NodeIndex u) const;

  // (u, v, weight) with u < v and weight > 0, row-major.
  struct Triple {
    NodeIndex u;
    NodeIndex v;
    std::uint32_t weight;
  };
  std::vector<Triple> triples() const;

 private:
  std::size_t n_;
  std::vector<std::uint32_t> adjacency_;
};

AggregatedGraph aggregate_window(const WindowView& window);

// ---- interchange formats ----

// Newline-delimited JSON: a header record {"N": <int>} (optionally with
// "window_length") followed by {"t": <float>, "nodes": [<int>...]} records.
// When node_count_override is nonzero it replaces the header value and
// the header becomes optional.
struct ParsedStream {
  EventStream stream;
  double window_length = 0.0;  // 0 when the header carries none
};

ParsedStream parse_stream(std::istream& in, std::size_t node_count_override = 0);
ParsedStream parse_stream_text(const std::string& text, std::size_t node_count_override = 0);
ParsedStream read_stream_file(const std::string& path, std::size_t node_count_override = 0);

void write_stream(std::ostream& out, const EventStream& stream, double window_length = 0.0);
void write_stream_file(const std::string& path, const EventStream& stream,
                       double window_length = 0.0);

// CSV with header "u,v,weight".
void write_graph_csv(std::ostream& out, const AggregatedGraph& graph);

}  // namespace cliquewatch
