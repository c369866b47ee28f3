#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cliquewatch/error.hpp"
#include "cliquewatch/evaluation.hpp"

namespace cw = cliquewatch;

namespace {

std::vector<cw::ScoredInstance> make(const std::vector<double>& scores,
                                     const std::vector<int>& labels) {
  std::vector<cw::ScoredInstance> out;
  for (std::size_t i = 0; i < scores.size(); ++i)
    out.push_back({static_cast<cw::NodeIndex>(i), 0, scores[i], labels[i]});
  return out;
}

// P(score+ > score-) + P(tie) / 2 over all positive/negative pairs.
double mann_whitney(const std::vector<cw::ScoredInstance>& xs) {
  double wins = 0.0, pairs = 0.0;
  for (const auto& p : xs) {
    if (p.label != 1) continue;
    for (const auto& n : xs) {
      if (n.label != 0) continue;
      pairs += 1.0;
      wins += p.score > n.score ? 1.0 : p.score == n.score ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

}  // namespace

TEST(Roc, Examples) {
  EXPECT_DOUBLE_EQ(cw::roc(make({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0})).auc, 1.0);
  EXPECT_DOUBLE_EQ(cw::roc(make({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0})).auc, 0.5);
  EXPECT_DOUBLE_EQ(cw::roc(make({4, 3, 2, 1}, {1, 0, 1, 0})).auc, 0.75);
}

TEST(Roc, CurveEndpointsAndTies) {
  const auto r = cw::roc(make({3, 3, 2, 1, 1}, {1, 0, 1, 0, 0}), "m");
  EXPECT_EQ(r.method, "m");
  ASSERT_EQ(r.points.size(), 4u);  // origin plus one vertex per distinct score
  EXPECT_EQ(r.points.front().fpr, 0.0);
  EXPECT_EQ(r.points.front().tpr, 0.0);
  EXPECT_EQ(r.points.back().fpr, 1.0);
  EXPECT_EQ(r.points.back().tpr, 1.0);
  EXPECT_DOUBLE_EQ(r.points[1].fpr, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.points[1].tpr, 0.5);
}

TEST(Roc, MatchesMannWhitney) {
  std::mt19937_64 gen(21);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 300)(gen);
    std::vector<double> s(n);
    std::vector<int> l(n);
    std::uniform_int_distribution<int> coarse(0, 9);  // many ties
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = coarse(gen);
      l[i] = static_cast<int>(i % 2 == 0 || coarse(gen) < 3);
    }
    l[0] = 1;
    l[1] = 0;
    const auto xs = make(s, l);
    EXPECT_NEAR(cw::roc(xs).auc, mann_whitney(xs), 1e-12);
  }
}

TEST(Roc, MonotoneTransformInvariantAndNegationComplements) {
  std::mt19937_64 gen(22);
  std::normal_distribution<double> z;
  std::vector<double> s(200);
  std::vector<int> l(200);
  for (std::size_t i = 0; i < s.size(); ++i) {
    l[i] = i % 3 == 0;
    s[i] = z(gen) + l[i];
  }
  const double auc = cw::roc(make(s, l)).auc;
  std::vector<double> t = s, neg = s;
  for (auto& v : t) v = std::exp(3.0 * v) + 1.0;
  for (auto& v : neg) v = -v;
  EXPECT_NEAR(cw::roc(make(t, l)).auc, auc, 1e-12);
  EXPECT_NEAR(cw::roc(make(neg, l)).auc, 1.0 - auc, 1e-12);
}

TEST(Roc, Errors) {
  EXPECT_THROW(cw::roc(make({1, 2}, {1, 1})), cw::EvaluationError);
  EXPECT_THROW(cw::roc(make({1, NAN}, {1, 0})), cw::EvaluationError);
  EXPECT_THROW(cw::roc(make({1, 2}, {1, 2})), cw::EvaluationError);
}

TEST(EmpiricalFpr, Examples) {
  std::vector<cw::AnomalyVerdict> v(20);
  EXPECT_EQ(cw::empirical_fpr(v), 0.0);
  v[4].is_anomaly = true;
  EXPECT_DOUBLE_EQ(cw::empirical_fpr(v), 0.05);
  for (auto& x : v) x.is_anomaly = true;
  EXPECT_EQ(cw::empirical_fpr(v), 1.0);
  EXPECT_THROW(cw::empirical_fpr(std::vector<cw::AnomalyVerdict>{}), cw::EvaluationError);
}

TEST(Compare, UsesLabeledInstancesOnly) {
  cw::LabelTable labels{{{0, 5}, 1}, {{1, 5}, 0}, {{2, 5}, 0}};
  cw::NamedScores a{"a", {{{0, 5}, 3.0}, {{1, 5}, 1.0}, {{2, 5}, 2.0}, {{0, 1}, 99.0}}};
  cw::NamedScores b{"b", {{{0, 5}, 1.0}, {{1, 5}, 1.0}, {{2, 5}, 2.0}}};
  const auto report = cw::compare({a, b}, labels);
  ASSERT_EQ(report.results.size(), 2u);
  EXPECT_EQ(report.results[0].method, "a");
  EXPECT_DOUBLE_EQ(report.results[0].auc, 1.0);
  EXPECT_DOUBLE_EQ(report.results[1].auc, 0.25);
  cw::NamedScores missing{"c", {{{0, 5}, 1.0}}};
  EXPECT_THROW(cw::compare({missing}, labels), cw::EvaluationError);
}

TEST(Files, ScoreAndLabelCsv) {
  std::istringstream scores(
      "node,window_index,n_t,score\n0,7,10,1.5\n3,8,0,-2\n\n");
  const auto s = cw::read_score_csv(scores);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.at({3, 8}), -2.0);
  std::istringstream labels("node,window,label\n0,7,1\n3,8,0\n");
  const auto l = cw::read_labels_csv(labels);
  EXPECT_EQ(l.at({0, 7}), 1);

  std::istringstream dup("node,window_index,score\n0,1,1\n0,1,2\n");
  EXPECT_THROW(cw::read_score_csv(dup), cw::ParseError);
  std::istringstream nocol("node,score\n0,1\n");
  EXPECT_THROW(cw::read_score_csv(nocol), cw::ValidationError);
  std::istringstream bad_label("node,window,label\n0,1,2\n");
  EXPECT_THROW(cw::read_labels_csv(bad_label), cw::ParseError);
  std::istringstream ragged("node,window,label\n0,1\n");
  EXPECT_THROW(cw::read_labels_csv(ragged), cw::ParseError);
}

TEST(Files, DetectionsRoundTripThroughScoreReader) {
  cw::DetectOptions opt;
  std::vector<cw::Detection> dets;
  for (int w = 0; w < 3; ++w)
    dets.push_back(cw::decide(2, 10 + w, 100, 40 + 5 * w, 50.0, 16.28, opt));
  std::stringstream buf;
  cw::write_detections_csv(buf, dets, opt);
  const auto table = cw::read_score_csv(buf);
  ASSERT_EQ(table.size(), 3u);
  for (const auto& d : dets)
    EXPECT_DOUBLE_EQ(table.at({2, d.verdict.window}), d.verdict.score);

  std::ostringstream bands;
  cw::write_band_csv(bands, dets);
  EXPECT_EQ(bands.str().substr(0, bands.str().find('\n')), "window_index,m,lower,upper");
}

TEST(Files, RocAndAucCsv) {
  cw::ComparisonReport report;
  report.results.push_back(cw::roc(make({2, 1}, {1, 0}), "x"));
  std::ostringstream roc, auc;
  cw::write_roc_csv(roc, report);
  cw::write_auc_csv(auc, report);
  EXPECT_EQ(auc.str(), "method,auc\nx,1\n");
  EXPECT_EQ(roc.str().substr(0, 15), "method,fpr,tpr\n");
}
