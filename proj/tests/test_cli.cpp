#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

const char kConfig[] =
    "nodes = 6\n"
    "components = 2\n"
    "timestamps = 30\n"
    "train_windows = 15\n"
    "events_per_timestamp = 20\n"
    "visibility = 0.3\n"
    "anomaly_node = 2\n"
    "anomaly_intervals = 20-25\n"
    "anomaly_visibility = 0.5\n";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cliquewatch");
  return cliquewatch::cli::run(args);
}

// Runs the CLI and returns its standard output.
std::string cli_out(std::vector<std::string> args, int* code = nullptr) {
  testing::internal::CaptureStdout();
  const int rc = cli(std::move(args));
  if (code) *code = rc;
  return testing::internal::GetCapturedStdout();
}

class Cli : public testing::Test {
 protected:
  void SetUp() override {
    const auto* info = testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::path(CLIQUEWATCH_TEST_TMP) / (std::string("cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    spit(dir_ / "sim.txt", kConfig);
  }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  // Simulated stream plus train/test splits.
  void simulate() {
    ASSERT_EQ(cli({"simulate", "--config", p("sim.txt"), "--seed", "3", "--out", p("sim")}), 0);
    std::ifstream in(p("sim/stream.jsonl"));
    std::string header, line;
    std::getline(in, header);
    std::ofstream train(p("train.jsonl")), test(p("test.jsonl"));
    train << header << '\n';
    test << header << '\n';
    while (std::getline(in, line)) {
      const double t = nlohmann::json::parse(line)["t"].get<double>();
      (t < 15 ? train : test) << line << '\n';
    }
  }

  void train_model() {
    ASSERT_EQ(cli({"train", "--stream", p("train.jsonl"), "--out", p("model.bin"), "--trees", "5",
                   "--threads", "1"}),
              0);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({"simulate", "--preset", "E9", "--out", p("x")}), 2);
  EXPECT_EQ(cli({"train", "--stream", p("missing.jsonl"), "--out", p("m")}), 2);
  EXPECT_EQ(cli({"bogus"}), 2);
  EXPECT_EQ(cli({}), 2);
  EXPECT_EQ(cli({"--help"}), 0);
}

TEST_F(Cli, DetectRejectsDeltaOutsideUnitInterval) {
  simulate();
  train_model();
  EXPECT_EQ(cli({"detect", "--model", p("model.bin"), "--stream", p("test.jsonl"), "--delta",
                 "1.5", "--out", p("s.csv")}),
            2);
}

TEST_F(Cli, NodeCountMismatchIsADataError) {
  simulate();
  train_model();
  spit(p("other.jsonl"), "{\"N\":4}\n{\"t\":0.5,\"nodes\":[0,1]}\n");
  EXPECT_EQ(cli({"detect", "--model", p("model.bin"), "--stream", p("other.jsonl"), "--out",
                 p("s.csv")}),
            1);
}

TEST_F(Cli, ScanBatchNeedsTraining) {
  simulate();
  EXPECT_EQ(cli({"baseline", "--method", "scan-batch", "--stream", p("test.jsonl"), "--out",
                 p("b.csv")}),
            2);
}

TEST_F(Cli, BaselineRecordsDefaultWindow) {
  simulate();
  ASSERT_EQ(cli({"baseline", "--method", "scan", "--stream", p("test.jsonl"), "--out", p("b.csv")}),
            0);
  const auto m = nlohmann::json::parse(slurp(p("b.csv.manifest.json")));
  EXPECT_EQ(m["config"]["window"].get<int>(), 20);
  EXPECT_EQ(m["command"].get<std::string>(), "baseline");
}

TEST_F(Cli, CalibrateWithTargetOnePrintsLargestGridValue) {
  simulate();
  int code = -1;
  const auto out = cli_out({"calibrate", "--stream", p("train.jsonl"), "--target-fpr", "1.0",
                            "--trees", "3", "--threads", "1", "--out", p("cal.csv")},
                           &code);
  EXPECT_EQ(code, 0);
  EXPECT_EQ(out, "0.2\n");
  EXPECT_EQ(slurp(p("cal.csv")).substr(0, 10), "delta,fpr\n");
}

TEST_F(Cli, CalibrateNeedsMoreWindowsThanFolds) {
  spit(p("short.jsonl"), "{\"N\":3}\n{\"t\":0.5,\"nodes\":[0,1]}\n{\"t\":1.5,\"nodes\":[1,2]}\n");
  EXPECT_EQ(cli({"calibrate", "--stream", p("short.jsonl"), "--folds", "5", "--out", p("c.csv")}),
            1);
}

TEST_F(Cli, TrainOnEmptyStreamFails) {
  spit(p("empty.jsonl"), "{\"N\":3}\n");
  EXPECT_EQ(cli({"train", "--stream", p("empty.jsonl"), "--out", p("m.bin")}), 1);
}

TEST_F(Cli, DetectRestrictedToOneNode) {
  simulate();
  train_model();
  ASSERT_EQ(cli({"detect", "--model", p("model.bin"), "--stream", p("test.jsonl"), "--nodes", "3",
                 "--out", p("s.csv")}),
            0);
  std::ifstream in(p("s.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 17), "node,window_index");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(0, 2), "3,");
  }
  EXPECT_EQ(rows, 15u);
  EXPECT_TRUE(fs::exists(p("s.csv.bands/node_3.csv")));
  EXPECT_FALSE(fs::exists(p("s.csv.bands/node_0.csv")));
  EXPECT_EQ(cli({"detect", "--model", p("model.bin"), "--stream", p("test.jsonl"), "--nodes",
                 "9", "--out", p("s.csv")}),
            2);
}

TEST_F(Cli, EvaluateTwoScoreFiles) {
  simulate();
  train_model();
  ASSERT_EQ(cli({"detect", "--model", p("model.bin"), "--stream", p("test.jsonl"), "--out",
                 p("prop.csv")}),
            0);
  ASSERT_EQ(cli({"baseline", "--method", "heard-node", "--stream", p("test.jsonl"), "--out",
                 p("heard.csv")}),
            0);
  int code = -1;
  const auto out = cli_out({"evaluate", "--scores", "prop=" + p("prop.csv"), "--scores",
                            p("heard.csv"), "--labels", p("sim/labels.csv"), "--out", p("eval")},
                           &code);
  ASSERT_EQ(code, 0);
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 2);
  EXPECT_EQ(out.substr(0, 5), "prop ");
  const auto auc = slurp(p("eval/auc.csv"));
  EXPECT_EQ(std::count(auc.begin(), auc.end(), '\n'), 3);

  // Drop one labeled row from the score file.
  std::string text = slurp(p("heard.csv"));
  text.erase(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n'));
  spit(p("partial.csv"), text);
  EXPECT_EQ(cli({"evaluate", "--scores", p("partial.csv"), "--labels", p("sim/labels.csv"),
                 "--out", p("eval2")}),
            1);
}

TEST_F(Cli, ReplayReproducesOutputs) {
  ASSERT_EQ(cli({"simulate", "--config", p("sim.txt"), "--seed", "5", "--out", p("sim")}), 0);
  const auto stream = slurp(p("sim/stream.jsonl"));
  const auto oracle = slurp(p("sim/oracle.jsonl"));
  const auto manifest = slurp(p("sim/manifest.json"));
  fs::remove(p("sim/stream.jsonl"));
  ASSERT_EQ(cli({"replay", p("sim/manifest.json")}), 0);
  EXPECT_EQ(slurp(p("sim/stream.jsonl")), stream);
  EXPECT_EQ(slurp(p("sim/oracle.jsonl")), oracle);
  EXPECT_EQ(slurp(p("sim/manifest.json")), manifest);
}
