#include "cliquewatch/stream.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "cliquewatch/error.hpp"

namespace cliquewatch {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t words_for(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

void check_node(NodeIndex j, std::size_t n, const char* where) {
  if (j >= n) {
    throw IndexError(std::string(where) + ": node index " + std::to_string(j) +
                     " out of range for N = " + std::to_string(n));
  }
}

}  // namespace

Fingerprint::Fingerprint(std::size_t size) : size_(size), words_(words_for(size), 0) {}

Fingerprint::Fingerprint(std::size_t size, std::span<const NodeIndex> participants)
    : Fingerprint(size) {
  for (NodeIndex j : participants) set(j);
}

Fingerprint::Fingerprint(std::size_t size, std::initializer_list<NodeIndex> participants)
    : Fingerprint(size, std::span<const NodeIndex>(participants.begin(), participants.size())) {}

Fingerprint Fingerprint::from_string(const std::string& bits) {
  Fingerprint fp(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      fp.set(i);
    } else if (bits[i] != '0') {
      throw ValidationError("fingerprint string must contain only 0 and 1");
    }
  }
  return fp;
}

bool Fingerprint::test(NodeIndex j) const {
  check_node(j, size_, "Fingerprint::test");
  return (words_[j / kWordBits] >> (j % kWordBits)) & 1u;
}

void Fingerprint::set(NodeIndex j, bool value) {
  check_node(j, size_, "Fingerprint::set");
  const std::uint64_t mask = std::uint64_t{1} << (j % kWordBits);
  if (value) {
    words_[j / kWordBits] |= mask;
  } else {
    words_[j / kWordBits] &= ~mask;
  }
}

std::size_t Fingerprint::count() const noexcept {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<NodeIndex> Fingerprint::participants() const {
  std::vector<NodeIndex> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t word = words_[w];
    while (word != 0) {
      const int bit = std::countr_zero(word);
      out.push_back(w * kWordBits + static_cast<std::size_t>(bit));
      word &= word - 1;
    }
  }
  return out;
}

std::string Fingerprint::to_string() const {
  std::string s(size_, '0');
  for (NodeIndex j : participants()) s[j] = '1';
  return s;
}

std::size_t hamming_distance(const Fingerprint& a, const Fingerprint& b) {
  if (a.size() != b.size()) throw IndexError("hamming_distance: length mismatch");
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t d = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  }
  return d;
}

Fingerprint exclude_node(const Fingerprint& fp, NodeIndex j) {
  check_node(j, fp.size(), "exclude_node");
  Fingerprint out(fp.size() - 1);
  for (NodeIndex k : fp.participants()) {
    if (k < j) {
      out.set(k);
    } else if (k > j) {
      out.set(k - 1);
    }
  }
  return out;
}

Fingerprint insert_node(const Fingerprint& reduced, NodeIndex j, bool bit) {
  check_node(j, reduced.size() + 1, "insert_node");
  Fingerprint out(reduced.size() + 1);
  for (NodeIndex k : reduced.participants()) out.set(k < j ? k : k + 1);
  if (bit) out.set(j);
  return out;
}

EventStream::EventStream(std::size_t node_count, std::vector<Event> events)
    : node_count_(node_count), events_(std::move(events)) {
  if (node_count_ == 0) throw ValidationError("stream node count must be positive");
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& e = events_[i];
    if (!std::isfinite(e.timestamp) || e.timestamp < 0.0) {
      throw ValidationError("event " + std::to_string(i) + ": timestamp must be finite and >= 0");
    }
    if (e.fingerprint.size() != node_count_) {
      throw ValidationError("event " + std::to_string(i) + ": fingerprint length " +
                            std::to_string(e.fingerprint.size()) + " != N = " +
                            std::to_string(node_count_));
    }
    if (e.fingerprint.none()) {
      throw ValidationError("event " + std::to_string(i) + ": no participating node");
    }
  }
  std::stable_sort(events_.begin(), events_.end(),
                   [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
}

EventStream EventStream::slice(double begin, double end) const {
  auto lo = std::lower_bound(events_.begin(), events_.end(), begin,
                             [](const Event& e, double t) { return e.timestamp < t; });
  auto hi = std::lower_bound(lo, events_.end(), end,
                             [](const Event& e, double t) { return e.timestamp < t; });
  EventStream out;
  out.node_count_ = node_count_;
  out.events_.assign(lo, hi);
  return out;
}

WindowIndex window_index_of(double timestamp, double window_length, double origin) {
  return static_cast<WindowIndex>(std::floor((timestamp - origin) / window_length));
}

WindowedStream::WindowedStream(EventStream stream, double window_length, double origin)
    : stream_(std::move(stream)), window_length_(window_length), origin_(origin) {
  if (!(window_length_ > 0.0) || !std::isfinite(window_length_)) {
    throw ConfigError("window length must be a positive finite duration");
  }
  const auto events = stream_.events();
  if (events.empty()) return;
  first_index_ = window_index_of(events.front().timestamp, window_length_, origin_);
  const WindowIndex last = window_index_of(events.back().timestamp, window_length_, origin_);
  offsets_.assign(static_cast<std::size_t>(last - first_index_ + 1), {0, 0});
  std::size_t i = 0;
  for (std::size_t w = 0; w < offsets_.size(); ++w) {
    const WindowIndex index = first_index_ + static_cast<WindowIndex>(w);
    const std::size_t begin = i;
    while (i < events.size() &&
           window_index_of(events[i].timestamp, window_length_, origin_) == index) {
      ++i;
    }
    offsets_[w] = {begin, i};
  }
}

WindowView WindowedStream::window(std::size_t position) const {
  if (position >= offsets_.size()) throw IndexError("window position out of range");
  const auto [b, e] = offsets_[position];
  return WindowView{first_index_ + static_cast<WindowIndex>(position), stream_.node_count(),
                    stream_.events().subspan(b, e - b)};
}

EventStream WindowedStream::sub_stream(std::size_t first, std::size_t last) const {
  if (first > last || last > offsets_.size()) throw IndexError("window range out of bounds");
  std::vector<Event> events;
  for (std::size_t w = first; w < last; ++w) {
    const auto view = window(w);
    events.insert(events.end(), view.events.begin(), view.events.end());
  }
  return EventStream(stream_.node_count(), std::move(events));
}

std::size_t node_count_in_window(const WindowView& window, NodeIndex j) {
  check_node(j, window.node_count, "node_count_in_window");
  std::size_t m = 0;
  for (const Event& e : window.events) m += e.fingerprint.test(j) ? 1 : 0;
  return m;
}

AggregatedGraph::AggregatedGraph(std::size_t node_count)
    : n_(node_count), adjacency_(node_count * node_count, 0) {}

std::uint32_t AggregatedGraph::weight(NodeIndex u, NodeIndex v) const {
  check_node(u, n_, "AggregatedGraph::weight");
  check_node(v, n_, "AggregatedGraph::weight");
  return adjacency_[u * n_ + v];
}

void AggregatedGraph::add(NodeIndex u, NodeIndex v, std::uint32_t w) {
  check_node(u, n_, "AggregatedGraph::add");
  check_node(v, n_, "AggregatedGraph::add");
  if (u == v) return;
  adjacency_[u * n_ + v] += w;
  adjacency_[v * n_ + u] += w;
}

std::uint64_t AggregatedGraph::weighted_degree(NodeIndex u) const {
  check_node(u, n_, "AggregatedGraph::weighted_degree");
  std::uint64_t d = 0;
  for (std::size_t v = 0; v < n_; ++v) d += adjacency_[u * n_ + v];
  return d;
}

std::vector<AggregatedGraph::Triple> AggregatedGraph::triples() const {
  std::vector<Triple> out;
  for (std::size_t u = 0; u < n_; ++u) {
    for (std::size_t v = u + 1; v < n_; ++v) {
      if (const auto w = adjacency_[u * n_ + v]; w > 0) out.push_back({u, v, w});
    }
  }
  return out;
}

AggregatedGraph aggregate_window(const WindowView& window) {
  AggregatedGraph g(window.node_count);
  for (const Event& e : window.events) {
    const auto nodes = e.fingerprint.participants();
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      for (std::size_t b = a + 1; b < nodes.size(); ++b) g.add(nodes[a], nodes[b]);
    }
  }
  return g;
}

}  // namespace cliquewatch
