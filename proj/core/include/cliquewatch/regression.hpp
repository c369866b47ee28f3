#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cliquewatch/stream.hpp"

namespace cliquewatch {

enum class RegressionMethod { tree, forest, kernel };

std::string to_string(RegressionMethod method);
RegressionMethod parse_regression_method(const std::string& name);

struct RegressorConfig {
  RegressionMethod method = RegressionMethod::forest;
  std::size_t forest_size = 100;
  // 0 means unlimited.
  std::size_t max_depth = 12;
  std::size_t min_leaf = 5;
  // Nadaraya-Watson bandwidth h in K_h(u) = exp(-hamming(u) / h).
  double bandwidth = 1.0;
  // Kernel weight is forced to zero beyond this Hamming distance; negative
  // disables truncation. Exists to exercise the zero-mass fallback.
  int kernel_radius = -1;
  std::uint64_t seed = 0;
  // Worker threads for fit_all; 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

void validate(const RegressorConfig& config);

// Binary regression tree over reduced fingerprints. Internal node tests one
// reduced feature; the "one" branch is taken when that bit is set.
class RegressionTree {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    std::uint32_t zero = 0;
    std::uint32_t one = 0;
    double value = 0.0;
  };

  RegressionTree() = default;
  explicit RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const;

  double predict(const Fingerprint& reduced) const;
  // Same as predict(exclude_node(full, excluded)) without building the
  // reduced vector.
  double predict_excluding(const Fingerprint& full, NodeIndex excluded) const;

 private:
  std::vector<Node> nodes_;
};

// Distinct training fingerprints with multiplicities; the Nadaraya-Watson
// predictors of all nodes share one copy.
struct KernelSupport {
  std::size_t node_count = 0;
  std::vector<Fingerprint> patterns;
  std::vector<std::uint32_t> multiplicity;

  static std::shared_ptr<const KernelSupport> from_stream(const EventStream& train);
};

// Estimated conditional participation probability of one node given the
// participation of all others. Immutable once fitted.
class ConditionalModel {
 public:
  ConditionalModel(NodeIndex node, std::size_t node_count, RegressionMethod method,
                   std::size_t train_size, double base_rate, std::vector<RegressionTree> trees);
  ConditionalModel(NodeIndex node, std::size_t node_count, std::size_t train_size,
                   double base_rate, std::shared_ptr<const KernelSupport> support,
                   double bandwidth, int radius);

  NodeIndex node() const noexcept { return node_; }
  std::size_t node_count() const noexcept { return node_count_; }
  RegressionMethod method() const noexcept { return method_; }
  std::size_t train_size() const noexcept { return train_size_; }
  // Fraction of training events in which the node participates.
  double base_rate() const noexcept { return base_rate_; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
  const std::shared_ptr<const KernelSupport>& kernel_support() const noexcept { return support_; }
  double bandwidth() const noexcept { return bandwidth_; }
  int kernel_radius() const noexcept { return radius_; }

  // x_reduced has length N-1. Result lies in [0, 1].
  double predict(const Fingerprint& x_reduced) const;
  // Prediction for the reduced version of a full length-N fingerprint.
  double predict_excluding(const Fingerprint& full) const;
  // predict_excluding for every event, bit-identical to calling it per
  // event but walking one tree at a time, which keeps it in cache.
  std::vector<double> predict_events(std::span<const Event> events) const;

 private:
  double kernel_predict(const Fingerprint& full_with_zero) const;

  NodeIndex node_;
  std::size_t node_count_;
  RegressionMethod method_;
  std::size_t train_size_;
  double base_rate_;
  std::vector<RegressionTree> trees_;
  std::shared_ptr<const KernelSupport> support_;
  double bandwidth_ = 1.0;
  int radius_ = -1;
  std::vector<double> kernel_table_;
};

ConditionalModel fit_node(const EventStream& train, NodeIndex j, const RegressorConfig& config);

// mu_hat: sum of predictions over the window's events.
double predicted_mean(const ConditionalModel& model, const WindowView& window);

class ModelSet {
 public:
  ModelSet(RegressorConfig config, std::size_t node_count, std::uint64_t train_digest,
           std::vector<ConditionalModel> models);

  const RegressorConfig& config() const noexcept { return config_; }
  std::size_t node_count() const noexcept { return node_count_; }
  std::uint64_t train_digest() const noexcept { return train_digest_; }
  const ConditionalModel& model(NodeIndex j) const;
  const std::vector<ConditionalModel>& models() const noexcept { return models_; }

 private:
  RegressorConfig config_;
  std::size_t node_count_;
  std::uint64_t train_digest_;
  std::vector<ConditionalModel> models_;
};

// Per-node sub-seed is config.seed + j, so nodes can be fitted in any order.
ModelSet fit_all(const EventStream& train, const RegressorConfig& config);

// FNV-1a over timestamps and fingerprints.
std::uint64_t stream_digest(const EventStream& stream);

// Binary model file. save -> load -> predict is bit-exact.
void save_models(std::ostream& out, const ModelSet& models);
ModelSet load_models(std::istream& in);
void save_models_file(const std::string& path, const ModelSet& models);
ModelSet load_models_file(const std::string& path);

}  // namespace cliquewatch
