#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "cliquewatch/error.hpp"
#include "cliquewatch/regression.hpp"

// Model file layout (little-endian):
//   "CWMODEL1" u32 version
//   config: u8 method, u64 forest_size, u64 max_depth, u64 min_leaf,
//           f64 bandwidth, i64 kernel_radius, u64 seed
//   u64 node_count, u64 train_digest
//   kernel only: u64 patterns, then per pattern u32 multiplicity + words
//   per node: u64 node, u64 train_size, f64 base_rate,
//             trees only: u64 trees, per tree u64 nodes,
//             per tree node i32 feature, u32 zero, u32 one, f64 value

namespace cliquewatch {

namespace {

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

constexpr char kMagic[8] = {'C', 'W', 'M', 'O', 'D', 'E', 'L', '1'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  template <typename T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in_) throw ValidationError("model file truncated");
    return v;
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_models(std::ostream& out, const ModelSet& models) {
  Writer w(out);
  out.write(kMagic, sizeof kMagic);
  w.put(kVersion);
  const auto& c = models.config();
  w.put(static_cast<std::uint8_t>(c.method));
  w.put(static_cast<std::uint64_t>(c.forest_size));
  w.put(static_cast<std::uint64_t>(c.max_depth));
  w.put(static_cast<std::uint64_t>(c.min_leaf));
  w.put(c.bandwidth);
  w.put(static_cast<std::int64_t>(c.kernel_radius));
  w.put(static_cast<std::uint64_t>(c.seed));
  w.put(static_cast<std::uint64_t>(models.node_count()));
  w.put(models.train_digest());

  if (c.method == RegressionMethod::kernel) {
    const auto& support = *models.model(0).kernel_support();
    w.put(static_cast<std::uint64_t>(support.patterns.size()));
    for (std::size_t u = 0; u < support.patterns.size(); ++u) {
      w.put(support.multiplicity[u]);
      for (auto word : support.patterns[u].words()) w.put(word);
    }
  }

  for (const auto& m : models.models()) {
    w.put(static_cast<std::uint64_t>(m.node()));
    w.put(static_cast<std::uint64_t>(m.train_size()));
    w.put(m.base_rate());
    if (c.method == RegressionMethod::kernel) continue;
    w.put(static_cast<std::uint64_t>(m.trees().size()));
    for (const auto& tree : m.trees()) {
      w.put(static_cast<std::uint64_t>(tree.nodes().size()));
      for (const auto& n : tree.nodes()) {
        w.put(n.feature);
        w.put(n.zero);
        w.put(n.one);
        w.put(n.value);
      }
    }
  }
  if (!out) throw Error("failed to write model file");
}

ModelSet load_models(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ValidationError("not a cliquewatch model file");
  }
  Reader r(in);
  if (const auto version = r.get<std::uint32_t>(); version != kVersion) {
    throw ValidationError("unsupported model file version " + std::to_string(version));
  }
  RegressorConfig c;
  const auto method = r.get<std::uint8_t>();
  if (method > static_cast<std::uint8_t>(RegressionMethod::kernel)) {
    throw ValidationError("corrupt model file: unknown method");
  }
  c.method = static_cast<RegressionMethod>(method);
  c.forest_size = r.get<std::uint64_t>();
  c.max_depth = r.get<std::uint64_t>();
  c.min_leaf = r.get<std::uint64_t>();
  c.bandwidth = r.get<double>();
  c.kernel_radius = static_cast<int>(r.get<std::int64_t>());
  c.seed = r.get<std::uint64_t>();
  const auto node_count = r.get<std::uint64_t>();
  const auto digest = r.get<std::uint64_t>();
  if (node_count < 2 || node_count > (1u << 20)) {
    throw ValidationError("corrupt model file: node count");
  }

  std::shared_ptr<const KernelSupport> support;
  if (c.method == RegressionMethod::kernel) {
    auto s = std::make_shared<KernelSupport>();
    s->node_count = node_count;
    const auto patterns = r.get<std::uint64_t>();
    const std::size_t words = (node_count + 63) / 64;
    for (std::uint64_t u = 0; u < patterns; ++u) {
      s->multiplicity.push_back(r.get<std::uint32_t>());
      Fingerprint fp(node_count);
      for (std::size_t k = 0; k < words; ++k) {
        std::uint64_t word = r.get<std::uint64_t>();
        while (word != 0) {
          const auto bit = static_cast<std::size_t>(std::countr_zero(word));
          fp.set(k * 64 + bit);
          word &= word - 1;
        }
      }
      s->patterns.push_back(std::move(fp));
    }
    support = std::move(s);
  }

  std::vector<ConditionalModel> models;
  models.reserve(node_count);
  for (std::uint64_t j = 0; j < node_count; ++j) {
    const auto node = r.get<std::uint64_t>();
    const auto train_size = r.get<std::uint64_t>();
    const auto base_rate = r.get<double>();
    if (c.method == RegressionMethod::kernel) {
      models.emplace_back(node, node_count, train_size, base_rate, support, c.bandwidth,
                          c.kernel_radius);
      continue;
    }
    const auto tree_count = r.get<std::uint64_t>();
    std::vector<RegressionTree> trees;
    trees.reserve(tree_count);
    for (std::uint64_t t = 0; t < tree_count; ++t) {
      const auto size = r.get<std::uint64_t>();
      std::vector<RegressionTree::Node> nodes(size);
      for (std::uint64_t at = 0; at < size; ++at) {
        auto& n = nodes[at];
        n.feature = r.get<std::int32_t>();
        n.zero = r.get<std::uint32_t>();
        n.one = r.get<std::uint32_t>();
        n.value = r.get<double>();
        if (n.feature >= static_cast<std::int32_t>(node_count - 1) ||
            (n.feature >= 0 && (n.zero >= size || n.one >= size || n.zero <= at || n.one <= at))) {
          throw ValidationError("corrupt model file: tree node out of range");
        }
      }
      if (nodes.empty()) throw ValidationError("corrupt model file: empty tree");
      trees.emplace_back(std::move(nodes));
    }
    models.emplace_back(node, node_count, c.method, train_size, base_rate, std::move(trees));
  }
  return ModelSet(c, node_count, digest, std::move(models));
}

void save_models_file(const std::string& path, const ModelSet& models) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file '" + path + "'");
  save_models(out, models);
}

ModelSet load_models_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path + "'");
  return load_models(in);
}

}  // namespace cliquewatch
