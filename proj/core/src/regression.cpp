#include "cliquewatch/regression.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <deque>
#include <map>
#include <optional>

#include "cliquewatch/error.hpp"
#include "cliquewatch/random.hpp"
#include "parallel.hpp"

namespace cliquewatch {

std::string to_string(RegressionMethod method) {
  switch (method) {
    case RegressionMethod::tree: return "tree";
    case RegressionMethod::forest: return "forest";
    case RegressionMethod::kernel: return "kernel";
  }
  return "?";
}

RegressionMethod parse_regression_method(const std::string& name) {
  if (name == "tree") return RegressionMethod::tree;
  if (name == "forest") return RegressionMethod::forest;
  if (name == "kernel") return RegressionMethod::kernel;
  throw ConfigError("unknown regression method '" + name + "' (expected tree|forest|kernel)");
}

void validate(const RegressorConfig& config) {
  if (config.forest_size < 1) throw ConfigError("forest_size must be >= 1");
  if (config.min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
  if (!(config.bandwidth > 0.0) || !std::isfinite(config.bandwidth)) {
    throw ConfigError("kernel bandwidth must be a positive finite number");
  }
}

// ---------------------------------------------------------------- trees

std::size_t RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> depth(nodes_.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, depth[i]);
    if (nodes_[i].feature >= 0) {
      depth[nodes_[i].zero] = depth[i] + 1;
      depth[nodes_[i].one] = depth[i] + 1;
    }
  }
  return best;
}

double RegressionTree::predict(const Fingerprint& reduced) const {
  std::uint32_t at = 0;
  while (nodes_[at].feature >= 0) {
    const Node& n = nodes_[at];
    at = reduced.test(static_cast<NodeIndex>(n.feature)) ? n.one : n.zero;
  }
  return nodes_[at].value;
}

double RegressionTree::predict_excluding(const Fingerprint& full, NodeIndex excluded) const {
  const auto words = full.words();
  std::uint32_t at = 0;
  while (nodes_[at].feature >= 0) {
    const Node& n = nodes_[at];
    std::size_t f = static_cast<std::size_t>(n.feature);
    if (f >= excluded) ++f;
    at = ((words[f / 64] >> (f % 64)) & 1u) ? n.one : n.zero;
  }
  return nodes_[at].value;
}

namespace {

// Row-major view of a training stream: participants per event (CSR) for
// split statistics and packed words for bit tests during partitioning.
struct TrainingMatrix {
  std::size_t rows = 0;
  std::size_t node_count = 0;
  std::size_t words_per_row = 0;
  std::vector<std::uint32_t> row_begin;
  std::vector<std::uint32_t> cols;
  std::vector<std::uint64_t> words;

  explicit TrainingMatrix(const EventStream& s)
      : rows(s.size()), node_count(s.node_count()), words_per_row((s.node_count() + 63) / 64) {
    row_begin.reserve(rows + 1);
    words.reserve(rows * words_per_row);
    row_begin.push_back(0);
    for (const Event& e : s.events()) {
      for (NodeIndex j : e.fingerprint.participants()) cols.push_back(static_cast<std::uint32_t>(j));
      row_begin.push_back(static_cast<std::uint32_t>(cols.size()));
      const auto w = e.fingerprint.words();
      words.insert(words.end(), w.begin(), w.end());
    }
  }

  bool bit(std::size_t row, std::size_t j) const {
    return (words[row * words_per_row + j / 64] >> (j % 64)) & 1u;
  }
};

struct Item {
  std::uint32_t row;
  std::uint32_t weight;
};

// Weighted counts for one tree node: per full feature index, the weight of
// rows having that bit set (w1) and how much of it has target 1 (s1).
struct SplitStats {
  std::uint64_t total_w = 0;
  std::uint64_t total_s = 0;
  std::vector<std::uint64_t> w1;
  std::vector<std::uint64_t> s1;
};

class TreeBuilder {
 public:
  TreeBuilder(const TrainingMatrix& m, NodeIndex target, const RegressorConfig& config,
              std::size_t features_per_split, Rng* rng)
      : m_(m),
        target_(target),
        config_(config),
        features_per_split_(features_per_split),
        rng_(rng) {}

  RegressionTree build(std::vector<Item> items) {
    items_ = std::move(items);
    nodes_.clear();
    SplitStats& root = level(0, 0);
    sweep(0, items_.size(), root);
    grow(0, items_.size(), 0, 0);
    return RegressionTree(std::move(nodes_));
  }

 private:
  // Two stat buffers per depth, one per child, so a subtree never
  // overwrites the stats its sibling still needs.
  SplitStats& level(std::size_t depth, int side) {
    const std::size_t slot = 2 * depth + static_cast<std::size_t>(side);
    if (slot >= stats_.size()) stats_.resize(slot + 1);
    SplitStats& st = stats_[slot];
    st.w1.resize(m_.node_count);
    st.s1.resize(m_.node_count);
    return st;
  }

  void sweep(std::size_t begin, std::size_t end, SplitStats& st) {
    std::fill(st.w1.begin(), st.w1.end(), 0);
    std::fill(st.s1.begin(), st.s1.end(), 0);
    st.total_w = 0;
    st.total_s = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const Item& it = items_[i];
      const bool y = m_.bit(it.row, target_);
      st.total_w += it.weight;
      if (y) st.total_s += it.weight;
      for (std::uint32_t k = m_.row_begin[it.row]; k < m_.row_begin[it.row + 1]; ++k) {
        const std::uint32_t c = m_.cols[k];
        st.w1[c] += it.weight;
        if (y) st.s1[c] += it.weight;
      }
    }
  }

  static void subtract(const SplitStats& parent, const SplitStats& child, SplitStats& out) {
    out.total_w = parent.total_w - child.total_w;
    out.total_s = parent.total_s - child.total_s;
    for (std::size_t c = 0; c < parent.w1.size(); ++c) {
      out.w1[c] = parent.w1[c] - child.w1[c];
      out.s1[c] = parent.s1[c] - child.s1[c];
    }
  }

  std::uint32_t grow(std::size_t begin, std::size_t end, std::size_t depth, int side) {
    const SplitStats& st = stats_[2 * depth + static_cast<std::size_t>(side)];
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    RegressionTree::Node leaf;
    leaf.value = st.total_w == 0
                     ? 0.0
                     : static_cast<double>(st.total_s) / static_cast<double>(st.total_w);
    nodes_.push_back(leaf);

    const bool pure = st.total_s == 0 || st.total_s == st.total_w;
    const bool too_small = st.total_w < 2 * config_.min_leaf;
    const bool too_deep = config_.max_depth != 0 && depth >= config_.max_depth;
    if (pure || too_small || too_deep) return id;

    const auto feature = best_split(st);
    if (!feature) return id;

    const std::size_t f = *feature;
    auto mid = std::partition(items_.begin() + static_cast<std::ptrdiff_t>(begin),
                              items_.begin() + static_cast<std::ptrdiff_t>(end),
                              [&](const Item& it) { return !m_.bit(it.row, f); });
    const auto split = static_cast<std::size_t>(mid - items_.begin());

    // Sweep the child with fewer rows; the other is parent minus it.
    SplitStats& zero_st = level(depth + 1, 0);
    SplitStats& one_st = level(depth + 1, 1);
    const SplitStats& parent = stats_[2 * depth + static_cast<std::size_t>(side)];
    if (split - begin <= end - split) {
      sweep(begin, split, zero_st);
      subtract(parent, zero_st, one_st);
    } else {
      sweep(split, end, one_st);
      subtract(parent, one_st, zero_st);
    }

    const std::uint32_t zero = grow(begin, split, depth + 1, 0);
    const std::uint32_t one = grow(split, end, depth + 1, 1);
    nodes_[id].feature = static_cast<std::int32_t>(f > target_ ? f - 1 : f);
    nodes_[id].zero = zero;
    nodes_[id].one = one;
    return id;
  }

  // Returns the full-index feature with the largest squared-error
  // reduction among the sampled non-constant features, if any is valid.
  std::optional<std::size_t> best_split(const SplitStats& st) {
    const std::uint64_t total_w = st.total_w;
    const std::uint64_t total_s = st.total_s;

    // Features constant over this node (never set, or always set) are skipped.
    candidates_.clear();
    for (std::size_t c = 0; c < st.w1.size(); ++c) {
      if (c == target_) continue;
      if (st.w1[c] > 0 && st.w1[c] < total_w) candidates_.push_back(static_cast<std::uint32_t>(c));
    }
    if (rng_ != nullptr && candidates_.size() > features_per_split_) {
      for (std::size_t i = 0; i < features_per_split_; ++i) {
        const auto pick = i + rng_->below(candidates_.size() - i);
        std::swap(candidates_[i], candidates_[pick]);
      }
      candidates_.resize(features_per_split_);
    }

    std::optional<std::size_t> best;
    double best_gain = 0.0;
    for (std::uint32_t c : candidates_) {
      const std::uint64_t w1 = st.w1[c];
      const std::uint64_t w0 = total_w - w1;
      if (w1 < config_.min_leaf || w0 < config_.min_leaf) continue;
      const std::uint64_t s1 = st.s1[c];
      const std::uint64_t s0 = total_s - s1;
      // SSE reduction = (s1*w0 - s0*w1)^2 / (w * w1 * w0); exact zero test
      // on integers so floating noise never triggers a split.
      const auto diff = static_cast<long double>(static_cast<std::int64_t>(s1 * w0) -
                                                 static_cast<std::int64_t>(s0 * w1));
      if (diff == 0) continue;
      const double gain = static_cast<double>(
          diff * diff /
          (static_cast<long double>(total_w) * static_cast<long double>(w1) *
           static_cast<long double>(w0)));
      if (!best || gain > best_gain || (gain == best_gain && c < *best)) {
        best = c;
        best_gain = gain;
      }
    }
    return best;
  }

  const TrainingMatrix& m_;
  NodeIndex target_;
  const RegressorConfig& config_;
  std::size_t features_per_split_;
  Rng* rng_;
  std::vector<Item> items_;
  std::vector<RegressionTree::Node> nodes_;
  std::deque<SplitStats> stats_;
  std::vector<std::uint32_t> candidates_;
};

std::vector<double> make_kernel_table(std::size_t node_count, double bandwidth, int radius) {
  std::vector<double> table(node_count + 1);
  for (std::size_t d = 0; d <= node_count; ++d) {
    const bool cut = radius >= 0 && d > static_cast<std::size_t>(radius);
    table[d] = cut ? 0.0 : std::exp(-static_cast<double>(d) / bandwidth);
  }
  return table;
}

double participation_rate(const EventStream& train, NodeIndex j) {
  std::size_t hits = 0;
  for (const Event& e : train.events()) hits += e.fingerprint.test(j) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(train.size());
}

ConditionalModel fit_with(const TrainingMatrix& matrix, const EventStream& train, NodeIndex j,
                          const RegressorConfig& config,
                          const std::shared_ptr<const KernelSupport>& support) {
  const double base_rate = participation_rate(train, j);
  const std::size_t n = train.size();

  if (config.method == RegressionMethod::kernel) {
    return ConditionalModel(j, train.node_count(), n, base_rate, support, config.bandwidth,
                            config.kernel_radius);
  }

  std::vector<RegressionTree> trees;
  if (config.method == RegressionMethod::tree) {
    std::vector<Item> items(n);
    for (std::size_t i = 0; i < n; ++i) items[i] = {static_cast<std::uint32_t>(i), 1};
    TreeBuilder builder(matrix, j, config, train.node_count(), nullptr);
    trees.push_back(builder.build(std::move(items)));
  } else {
    Rng rng(config.seed + j);
    const auto mtry = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(train.node_count() - 1))));
    TreeBuilder builder(matrix, j, config, std::max<std::size_t>(mtry, 1), &rng);
    std::vector<std::uint32_t> counts(n);
    trees.reserve(config.forest_size);
    for (std::size_t b = 0; b < config.forest_size; ++b) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = 0; i < n; ++i) ++counts[rng.below(n)];
      std::vector<Item> items;
      items.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[i] > 0) items.push_back({static_cast<std::uint32_t>(i), counts[i]});
      }
      trees.push_back(builder.build(std::move(items)));
    }
  }
  return ConditionalModel(j, train.node_count(), config.method, n, base_rate, std::move(trees));
}

void check_training(const EventStream& train, const RegressorConfig& config) {
  validate(config);
  if (train.empty()) throw TrainingError("training stream is empty");
  if (train.node_count() < 2) throw TrainingError("need at least two nodes to regress on");
}

}  // namespace

// ---------------------------------------------------------------- kernel

std::shared_ptr<const KernelSupport> KernelSupport::from_stream(const EventStream& train) {
  auto support = std::make_shared<KernelSupport>();
  support->node_count = train.node_count();
  std::map<std::vector<std::uint64_t>, std::size_t> seen;
  for (const Event& e : train.events()) {
    const auto w = e.fingerprint.words();
    std::vector<std::uint64_t> key(w.begin(), w.end());
    auto [it, inserted] = seen.try_emplace(std::move(key), support->patterns.size());
    if (inserted) {
      support->patterns.push_back(e.fingerprint);
      support->multiplicity.push_back(1);
    } else {
      ++support->multiplicity[it->second];
    }
  }
  return support;
}

// ---------------------------------------------------------------- model

ConditionalModel::ConditionalModel(NodeIndex node, std::size_t node_count, RegressionMethod method,
                                   std::size_t train_size, double base_rate,
                                   std::vector<RegressionTree> trees)
    : node_(node),
      node_count_(node_count),
      method_(method),
      train_size_(train_size),
      base_rate_(base_rate),
      trees_(std::move(trees)) {
  if (method_ == RegressionMethod::kernel || trees_.empty()) {
    throw TrainingError("tree-based model needs at least one tree");
  }
}

ConditionalModel::ConditionalModel(NodeIndex node, std::size_t node_count, std::size_t train_size,
                                   double base_rate, std::shared_ptr<const KernelSupport> support,
                                   double bandwidth, int radius)
    : node_(node),
      node_count_(node_count),
      method_(RegressionMethod::kernel),
      train_size_(train_size),
      base_rate_(base_rate),
      support_(std::move(support)),
      bandwidth_(bandwidth),
      radius_(radius),
      kernel_table_(make_kernel_table(node_count, bandwidth, radius)) {
  if (!support_ || support_->node_count != node_count_) {
    throw TrainingError("kernel support does not match the model's node count");
  }
}

double ConditionalModel::predict(const Fingerprint& x_reduced) const {
  if (x_reduced.size() + 1 != node_count_) {
    throw IndexError("predict: reduced fingerprint has length " + std::to_string(x_reduced.size()) +
                     ", expected " + std::to_string(node_count_ - 1));
  }
  return predict_excluding(insert_node(x_reduced, node_, false));
}

double ConditionalModel::predict_excluding(const Fingerprint& full) const {
  if (full.size() != node_count_) {
    throw IndexError("predict: fingerprint has length " + std::to_string(full.size()) +
                     ", expected " + std::to_string(node_count_));
  }
  double value = 0.0;
  if (method_ == RegressionMethod::kernel) {
    Fingerprint query = full;
    query.set(node_, false);
    value = kernel_predict(query);
  } else {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict_excluding(full, node_);
    value = sum / static_cast<double>(trees_.size());
  }
  return std::clamp(value, 0.0, 1.0);
}

std::vector<double> ConditionalModel::predict_events(std::span<const Event> events) const {
  std::vector<double> out(events.size(), 0.0);
  for (const Event& e : events) {
    if (e.fingerprint.size() != node_count_) {
      throw IndexError("predict: fingerprint has length " + std::to_string(e.fingerprint.size()) +
                       ", expected " + std::to_string(node_count_));
    }
  }
  if (method_ == RegressionMethod::kernel) {
    for (std::size_t i = 0; i < events.size(); ++i) out[i] = predict_excluding(events[i].fingerprint);
    return out;
  }
  for (const auto& tree : trees_) {
    for (std::size_t i = 0; i < events.size(); ++i) {
      out[i] += tree.predict_excluding(events[i].fingerprint, node_);
    }
  }
  const auto count = static_cast<double>(trees_.size());
  for (double& v : out) v = std::clamp(v / count, 0.0, 1.0);
  return out;
}

double ConditionalModel::kernel_predict(const Fingerprint& query) const {
  double mass = 0.0;
  double weighted = 0.0;
  const auto& patterns = support_->patterns;
  for (std::size_t u = 0; u < patterns.size(); ++u) {
    const bool y = patterns[u].test(node_);
    // query has bit node_ cleared, so the reduced distance drops y.
    const std::size_t d = hamming_distance(patterns[u], query) - (y ? 1 : 0);
    const double k = kernel_table_[d] * support_->multiplicity[u];
    mass += k;
    if (y) weighted += k;
  }
  if (mass <= 0.0) return base_rate_;
  return weighted / mass;
}

ConditionalModel fit_node(const EventStream& train, NodeIndex j, const RegressorConfig& config) {
  check_training(train, config);
  if (j >= train.node_count()) throw IndexError("fit_node: node index out of range");
  const TrainingMatrix matrix(train);
  std::shared_ptr<const KernelSupport> support;
  if (config.method == RegressionMethod::kernel) support = KernelSupport::from_stream(train);
  return fit_with(matrix, train, j, config, support);
}

double predicted_mean(const ConditionalModel& model, const WindowView& window) {
  double mu = 0.0;
  for (const Event& e : window.events) mu += model.predict_excluding(e.fingerprint);
  return mu;
}

ModelSet::ModelSet(RegressorConfig config, std::size_t node_count, std::uint64_t train_digest,
                   std::vector<ConditionalModel> models)
    : config_(config),
      node_count_(node_count),
      train_digest_(train_digest),
      models_(std::move(models)) {
  if (models_.size() != node_count_) throw TrainingError("model set must hold one model per node");
  for (std::size_t j = 0; j < models_.size(); ++j) {
    if (models_[j].node() != j || models_[j].node_count() != node_count_) {
      throw TrainingError("model set entries out of order");
    }
  }
}

const ConditionalModel& ModelSet::model(NodeIndex j) const {
  if (j >= models_.size()) throw IndexError("ModelSet::model: node index out of range");
  return models_[j];
}

ModelSet fit_all(const EventStream& train, const RegressorConfig& config) {
  check_training(train, config);
  const TrainingMatrix matrix(train);
  std::shared_ptr<const KernelSupport> support;
  if (config.method == RegressionMethod::kernel) support = KernelSupport::from_stream(train);

  const std::size_t n = train.node_count();
  std::vector<std::optional<ConditionalModel>> slots(n);
  detail::parallel_for(n, config.threads, [&](std::size_t j) {
    slots[j].emplace(fit_with(matrix, train, j, config, support));
  });
  std::vector<ConditionalModel> models;
  models.reserve(n);
  for (auto& s : slots) models.push_back(std::move(*s));
  return ModelSet(config, n, stream_digest(train), std::move(models));
}

std::uint64_t stream_digest(const EventStream& stream) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(stream.node_count());
  for (const Event& e : stream.events()) {
    mix(std::bit_cast<std::uint64_t>(e.timestamp));
    for (auto w : e.fingerprint.words()) mix(w);
  }
  return h;
}

}  // namespace cliquewatch
