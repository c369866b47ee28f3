#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cliquewatch/error.hpp"
#include "cliquewatch/regression.hpp"
#include "cliquewatch/scoring.hpp"

namespace cw = cliquewatch;

namespace {

// Direct minimization on a fine grid, no refinement.
double theorem_grid_oracle(double s, double n) {
  double best = 1e300;
  const int steps = 100000;
  for (int i = 0; i <= steps; ++i) {
    const double k = s * i / steps;
    best = std::min(best, 2.0 * std::exp(-2.0 * k * k / n) +
                              2.0 * std::exp(-(s - k) * (s - k) / (2.0 * n)));
  }
  return best;
}

// n events per window, all with the same fingerprint over 3 nodes.
cw::EventStream constant_stream(std::size_t windows, std::size_t per_window) {
  std::vector<cw::Event> events;
  for (std::size_t w = 0; w < windows; ++w)
    for (std::size_t k = 0; k < per_window; ++k)
      events.push_back({static_cast<double>(w) + 0.1 * k, cw::Fingerprint::from_string("111")});
  return cw::EventStream(3, std::move(events));
}

// Model for node 0 of an N=2 stream whose prediction is a fixed constant.
cw::ConditionalModel constant_model(double eta) {
  cw::RegressionTree tree({cw::RegressionTree::Node{-1, 0, 0, eta}});
  return cw::ConditionalModel(0, 2, cw::RegressionMethod::tree, 1, eta, {tree});
}

}  // namespace

TEST(Hoeffding, TailExamples) {
  EXPECT_NEAR(cw::hoeffding_tail(10, 100), 2 * std::exp(-2.0), 1e-12);
  EXPECT_NEAR(cw::hoeffding_tail(10, 100), 0.2707, 1e-4);
  EXPECT_NEAR(cw::hoeffding_tail(20, 100), 6.71e-4, 1e-6);
  EXPECT_DOUBLE_EQ(cw::hoeffding_tail(0, 100), 2.0);
  EXPECT_THROW(cw::hoeffding_tail(-1, 100), cw::DomainError);
  EXPECT_THROW(cw::hoeffding_tail(1, 0), cw::DomainError);
}

TEST(Hoeffding, HalfwidthExamplesAndRoundTrip) {
  EXPECT_NEAR(cw::hoeffding_halfwidth(100, 0.01), std::sqrt(50.0 * std::log(200.0)), 1e-12);
  EXPECT_NEAR(cw::hoeffding_halfwidth(100, 0.01), 16.28, 0.01);
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<std::size_t> n(1, 5000);
  std::uniform_real_distribution<double> d(1e-6, 0.999);
  for (int i = 0; i < 200; ++i) {
    const std::size_t nn = n(gen);
    const double delta = d(gen);
    EXPECT_NEAR(cw::hoeffding_tail(cw::hoeffding_halfwidth(nn, delta), nn), delta, 1e-12);
  }
  EXPECT_THROW(cw::hoeffding_halfwidth(100, 0.0), cw::DomainError);
  EXPECT_THROW(cw::hoeffding_halfwidth(100, 1.0), cw::DomainError);
}

TEST(Scores, BilateralExamples) {
  EXPECT_DOUBLE_EQ(cw::bilateral_score(50, 50.0, 100), 2.0);
  EXPECT_NEAR(cw::bilateral_score(40, 50.0, 100), 2 * std::exp(-2.0), 1e-12);
  EXPECT_NEAR(cw::bilateral_score(60, 50.0, 100), cw::bilateral_score(40, 50.0, 100), 1e-15);
  EXPECT_THROW(cw::bilateral_score(0, 0.0, 0), cw::DomainError);
}

TEST(Scores, UnilateralExamples) {
  EXPECT_DOUBLE_EQ(cw::unilateral_score(50, 50.0, 100), -1.0);
  EXPECT_NEAR(cw::unilateral_score(41, 50.0, 100), -std::exp(-18.0 / 900.0), 1e-15);
  EXPECT_NEAR(cw::unilateral_score(41, 50.0, 100, cw::UnilateralForm::squared),
              -std::exp(-2.0 * 81.0 / 900.0), 1e-15);
  EXPECT_NEAR(cw::unilateral_score(59, 50.0, 100, cw::UnilateralForm::squared),
              -std::exp(2.0 * 81.0 / 900.0), 1e-12);
}

TEST(Scores, UnilateralGrowsAsCountFalls) {
  for (auto form : {cw::UnilateralForm::as_printed, cw::UnilateralForm::squared}) {
    double prev = -1e300;
    for (int m = 100; m >= 0; --m) {
      const double s = cw::unilateral_score(m, 50.0, 100, form);
      EXPECT_GT(s, prev);
      prev = s;
    }
  }
}

TEST(TheoremBound, Examples) {
  EXPECT_DOUBLE_EQ(cw::theorem_bound(0.0, 100), 4.0);
  const double v = cw::theorem_bound(30.0, 100);
  EXPECT_NEAR(v, theorem_grid_oracle(30.0, 100.0), 1e-8);
  EXPECT_NEAR(v, 0.503, 0.005);
  EXPECT_LT(v, cw::theorem_bound_closed(30.0, 100));
  EXPECT_THROW(cw::theorem_bound(-1.0, 100), cw::DomainError);
}

TEST(TheoremBound, MatchesGridOracleAndIsDominatedByClosedForm) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::size_t> n(1, 1000);
  for (int i = 0; i < 40; ++i) {
    const std::size_t nn = n(gen);
    const double s = std::uniform_real_distribution<double>(0.0, 4.0 * std::sqrt(nn))(gen);
    const double v = cw::theorem_bound(s, nn);
    const double o = theorem_grid_oracle(s, static_cast<double>(nn));
    EXPECT_LE(v, o * (1 + 1e-12));
    EXPECT_NEAR(v, o, 1e-7 * std::max(o, 1e-300) + 1e-300);
    EXPECT_LE(v, cw::theorem_bound_closed(s, nn) * (1 + 1e-12));
  }
}

TEST(TheoremBound, ClosedFormIsTheThirdSubstitution) {
  std::mt19937_64 gen(12);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 10000)(gen);
    const double s = std::uniform_real_distribution<double>(0.0, 3.0 * std::sqrt(n))(gen);
    const double k = s / 3.0;
    const double nn = static_cast<double>(n);
    const double sub =
        2.0 * std::exp(-2.0 * k * k / nn) + 2.0 * std::exp(-(s - k) * (s - k) / (2.0 * nn));
    EXPECT_NEAR(cw::theorem_bound_closed(s, n), sub, 1e-12 * sub);
  }
}

TEST(InvertBound, Examples) {
  EXPECT_NEAR(cw::invert_bound(cw::BoundMode::plugin, 100, 0.01),
              cw::hoeffding_halfwidth(100, 0.01), 1e-8);
  EXPECT_NEAR(cw::invert_bound(cw::BoundMode::theorem_closed, 100, 4 * std::exp(-2.0)), 30.0,
              1e-8);
  EXPECT_THROW(cw::invert_bound(cw::BoundMode::plugin, 100, 0.0), cw::DomainError);
  EXPECT_THROW(cw::invert_bound(cw::BoundMode::plugin, 100, 1.5), cw::DomainError);
  EXPECT_THROW(cw::invert_bound(cw::BoundMode::plugin, 0, 0.5), cw::DomainError);
}

TEST(InvertBound, OrderingAndRoundTrip) {
  for (std::size_t n : {1u, 10u, 100u, 1000u}) {
    for (double delta : cw::default_delta_grid()) {
      const double p = cw::invert_bound(cw::BoundMode::plugin, n, delta);
      const double t = cw::invert_bound(cw::BoundMode::theorem, n, delta);
      const double c = cw::invert_bound(cw::BoundMode::theorem_closed, n, delta);
      EXPECT_LE(p, t + 1e-8);
      EXPECT_LE(t, c + 1e-8);
      for (auto mode : {cw::BoundMode::plugin, cw::BoundMode::theorem,
                        cw::BoundMode::theorem_closed}) {
        const double s = cw::invert_bound(mode, n, delta);
        const double b = cw::bound_value(mode, s, n);
        EXPECT_LE(b, delta);
        EXPECT_GE(b, delta - 1e-6);
      }
    }
  }
}

TEST(Names, RoundTrip) {
  for (auto m : {cw::BoundMode::plugin, cw::BoundMode::theorem, cw::BoundMode::theorem_closed})
    EXPECT_EQ(cw::parse_bound_mode(cw::to_string(m)), m);
  for (auto s : {cw::Side::bilateral, cw::Side::unilateral})
    EXPECT_EQ(cw::parse_side(cw::to_string(s)), s);
  EXPECT_THROW(cw::parse_bound_mode("nope"), cw::ConfigError);
}

TEST(Detect, FlagsLargeDeviation) {
  // 100 events, model predicts 0.5, node 0 present in 20 of them.
  std::vector<cw::Event> events;
  for (int k = 0; k < 100; ++k) {
    cw::Fingerprint fp(2);
    fp.set(1);
    fp.set(0, k < 20);
    events.push_back({0.001 * k, fp});
  }
  const cw::EventStream stream(2, std::move(events));
  const cw::WindowedStream ws(stream, 1.0);
  cw::DetectOptions opt;
  opt.delta = 0.01;
  const auto d = cw::detect(constant_model(0.5), ws.window(0), opt);
  EXPECT_TRUE(d.verdict.is_anomaly);
  EXPECT_EQ(d.verdict.observed, 20u);
  EXPECT_NEAR(d.verdict.mu_hat, 50.0, 1e-9);
  EXPECT_NEAR(d.band.lower, 50.0 - 16.28, 0.01);
  EXPECT_NEAR(d.band.upper, 50.0 + 16.28, 0.01);
  EXPECT_NEAR(d.verdict.score, -cw::bilateral_score(20, 50.0, 100), 1e-15);
}

TEST(Detect, NoDeviationIsNormal) {
  const auto d = cw::decide(0, 0, 100, 50, 50.0, 16.28, cw::DetectOptions{});
  EXPECT_FALSE(d.verdict.is_anomaly);
}

TEST(Detect, EmptyWindowIsNeverAnomalous) {
  const auto d = cw::decide(3, 7, 0, 0, 0.0, 0.0, cw::DetectOptions{});
  EXPECT_FALSE(d.verdict.is_anomaly);
  EXPECT_EQ(d.band.lower, 0.0);
  EXPECT_EQ(d.band.upper, 0.0);
  EXPECT_EQ(d.verdict.node, 3u);
  EXPECT_EQ(d.verdict.window, 7);
}

TEST(Detect, BandIsClippedToWindowSize) {
  const auto d = cw::decide(0, 0, 10, 9, 9.5, 5.0, cw::DetectOptions{});
  EXPECT_EQ(d.band.upper, 10.0);
  EXPECT_EQ(d.band.lower, 4.5);
  EXPECT_EQ(d.band.half_width, 5.0);
}

TEST(Detect, RejectsBadDelta) {
  std::vector<cw::Event> events{{0.0, cw::Fingerprint::from_string("11")}};
  const cw::WindowedStream ws(cw::EventStream(2, events), 1.0);
  cw::DetectOptions opt;
  opt.delta = 1.5;
  EXPECT_THROW(cw::detect(constant_model(0.5), ws.window(0), opt), cw::DomainError);
}

TEST(Detect, PluginMatchesScoreThreshold) {
  // Anomaly iff rho < delta, checked away from the boundary.
  const std::size_t n = 50;
  const double mu = 23.7;
  for (double delta : cw::default_delta_grid()) {
    cw::DetectOptions opt;
    opt.delta = delta;
    const double hw = cw::invert_bound(cw::BoundMode::plugin, n, delta);
    for (std::size_t m = 0; m <= n; ++m) {
      const double rho = cw::bilateral_score(m, mu, n);
      if (std::abs(rho - delta) < 1e-6 * delta) continue;
      EXPECT_EQ(cw::decide(0, 0, n, m, mu, hw, opt).verdict.is_anomaly, rho < delta)
          << "m=" << m << " delta=" << delta;
    }
  }
}

TEST(Detect, UnilateralOnlyFlagsDrops) {
  cw::DetectOptions opt;
  opt.side = cw::Side::unilateral;
  EXPECT_TRUE(cw::decide(0, 0, 100, 20, 50.0, 16.28, opt).verdict.is_anomaly);
  EXPECT_FALSE(cw::decide(0, 0, 100, 80, 50.0, 16.28, opt).verdict.is_anomaly);
}

TEST(DetectAll, MatchesPerNodeDetect) {
  std::mt19937_64 gen(3);
  std::bernoulli_distribution coin(0.5);
  std::vector<cw::Event> events;
  for (int k = 0; k < 600; ++k) {
    cw::Fingerprint fp(4);
    for (std::size_t j = 0; j < 4; ++j) fp.set(j, coin(gen));
    if (fp.none()) continue;
    events.push_back({k * 0.05, fp});
  }
  const cw::EventStream stream(4, events);
  cw::RegressorConfig cfg;
  cfg.forest_size = 5;
  cfg.threads = 1;
  const auto models = cw::fit_all(stream.slice(0, 20), cfg);
  const cw::WindowedStream ws(stream.slice(20, 30), 1.0);
  const std::vector<cw::NodeIndex> nodes{0, 2};
  const auto all = cw::detect_all(models, ws, nodes, cw::DetectOptions{}, 1);
  ASSERT_EQ(all.size(), nodes.size() * ws.window_count());
  std::size_t k = 0;
  for (auto j : nodes) {
    for (std::size_t w = 0; w < ws.window_count(); ++w) {
      const auto one = cw::detect(models.model(j), ws.window(w), cw::DetectOptions{});
      const auto& got = all[k++];
      EXPECT_EQ(got.verdict.node, j);
      EXPECT_EQ(got.verdict.window, one.verdict.window);
      EXPECT_NEAR(got.verdict.mu_hat, one.verdict.mu_hat, 1e-9);
      EXPECT_EQ(got.verdict.is_anomaly, one.verdict.is_anomaly);
    }
  }
}

TEST(Calibration, TargetOnePicksLargestDelta) {
  std::mt19937_64 gen(5);
  std::bernoulli_distribution coin(0.5);
  std::vector<cw::Event> events;
  for (int k = 0; k < 400; ++k) {
    cw::Fingerprint fp(3);
    for (std::size_t j = 0; j < 3; ++j) fp.set(j, coin(gen));
    if (fp.none()) continue;
    events.push_back({k * 0.05, fp});
  }
  cw::RegressorConfig cfg;
  cfg.method = cw::RegressionMethod::tree;
  cfg.threads = 1;
  cw::CalibrationOptions opt;
  opt.target_fpr = 1.0;
  const auto r = cw::calibrate_delta(cw::EventStream(3, events), cfg, opt);
  EXPECT_EQ(r.delta, 0.2);
  EXPECT_TRUE(r.achieved);
  ASSERT_EQ(r.fpr.size(), r.grid.size());
  for (std::size_t g = 1; g < r.fpr.size(); ++g) EXPECT_LE(r.fpr[g], r.fpr[g - 1]);
  EXPECT_EQ(r.instances, 3u * 20u);
}

TEST(Calibration, PerfectModelHasNoFalsePositives) {
  cw::RegressorConfig cfg;
  cfg.method = cw::RegressionMethod::tree;
  cfg.threads = 1;
  cw::CalibrationOptions opt;
  opt.target_fpr = 0.01;
  const auto r = cw::calibrate_delta(constant_stream(20, 5), cfg, opt);
  EXPECT_EQ(r.delta, 0.2);
  for (double f : r.fpr) EXPECT_EQ(f, 0.0);
}

TEST(Calibration, Errors) {
  cw::RegressorConfig cfg;
  cfg.method = cw::RegressionMethod::tree;
  cw::CalibrationOptions opt;
  opt.folds = 10;
  EXPECT_THROW(cw::calibrate_delta(constant_stream(3, 2), cfg, opt), cw::ValidationError);
  opt.folds = 2;
  opt.target_fpr = 0.0;
  EXPECT_THROW(cw::calibrate_delta(constant_stream(3, 2), cfg, opt), cw::DomainError);
  opt.target_fpr = 0.05;
  opt.folds = 1;
  EXPECT_THROW(cw::calibrate_delta(constant_stream(3, 2), cfg, opt), cw::ConfigError);
}
